#include "spincav/dynamics.hpp"

#include "spincav/constants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spincav {

namespace {

struct DressedSystem {
  EigenSystem es;
  Eigen::VectorXd energies_rel;  // E_m - E_1, MHz
  MatrixXcd a_op;                // V^dag (a (x) I) V
  MatrixXcd z_op;                // V^dag (I (x) S_z) V
  MatrixXcd top_fock;            // V^dag (|n_max><n_max| (x) I) V
};

DressedSystem build_dressed(const DickeConfig& cfg) {
  if (cfg.cavity.n_max < 2) {
    throw std::invalid_argument("driven dynamics needs n_max >= 2 for headroom");
  }
  DressedSystem ds;
  ds.es = diagonalize(dicke_hamiltonian(cfg), cfg.cavity.n_max + 1);
  ds.energies_rel = ds.es.energies.array() - ds.es.energies(0);

  const int np = ds.es.photon_levels;
  const int ns = ds.es.spin_dim;
  const MatrixXcd& v = ds.es.states;
  ds.a_op = v.adjoint() * lift_photon(photon_annihilator(np), ns) * v;
  ds.z_op = v.adjoint() *
            lift_spin(np, spin_operators<double>(0.5 * (ns - 1)).sz) * v;
  MatrixXcd proj = MatrixXcd::Zero(np, np);
  proj(np - 1, np - 1) = 1.0;
  ds.top_fock = v.adjoint() * lift_photon(proj, ns) * v;
  return ds;
}

// Rotating-frame data for one drive tone. The composite Hamiltonian enters
// exactly through the dressed energies; only the drive is truncated to its
// secular matrix elements (the parts static in this frame).
struct Frame {
  Eigen::VectorXd delta_mhz;  // E_m - E_1 - k_m * omega_d
  MatrixXcd h_rf;             // diag(delta) + eps (W + W^dag)
  double max_scale_mhz = 0.0;
};

Frame make_frame(const DressedSystem& ds, double omega_d, double eps) {
  const int dim = static_cast<int>(ds.energies_rel.size());
  Frame frame;
  frame.delta_mhz.resize(dim);
  Eigen::VectorXi manifold(dim);
  for (int m = 0; m < dim; ++m) {
    manifold(m) =
        omega_d > 0.0
            ? static_cast<int>(std::lround(ds.energies_rel(m) / omega_d))
            : 0;
    frame.delta_mhz(m) = ds.energies_rel(m) - manifold(m) * omega_d;
  }
  MatrixXcd w = MatrixXcd::Zero(dim, dim);
  for (int m = 0; m < dim; ++m) {
    for (int n = 0; n < dim; ++n) {
      if (manifold(n) == manifold(m) + 1) w(m, n) = ds.a_op(m, n);
    }
  }
  frame.h_rf = frame.delta_mhz.cast<std::complex<double>>().asDiagonal();
  frame.h_rf += eps * (w + MatrixXcd(w.adjoint()));
  frame.max_scale_mhz = frame.delta_mhz.cwiseAbs().maxCoeff();
  return frame;
}

class Integrator {
 public:
  Integrator(const DressedSystem& ds, const Dissipation& diss)
      : a_(ds.a_op),
        a_dag_(ds.a_op.adjoint()),
        a_dag_a_(a_dag_ * a_),
        z_(ds.z_op),
        z2_(ds.z_op * ds.z_op),
        kappa_(diss.kappa_c_mhz),
        gamma_(diss.gamma_s_mhz) {
    if (kappa_ < 0.0 || gamma_ < 0.0) {
      throw std::invalid_argument("dissipation rates must be non-negative");
    }
  }

  void rhs(const MatrixXcd& h, const MatrixXcd& rho, MatrixXcd& out) const {
    const std::complex<double> i2pi(0.0, kTwoPi);
    out.noalias() = h * rho;
    out.noalias() -= rho * h;
    out *= -i2pi;
    if (kappa_ > 0.0) {
      tmp_.noalias() = a_ * rho;
      out.noalias() += (kTwoPi * kappa_) * (tmp_ * a_dag_);
      tmp_.noalias() = a_dag_a_ * rho;
      tmp_.noalias() += rho * a_dag_a_;
      out.noalias() -= (kPi * kappa_) * tmp_;
    }
    if (gamma_ > 0.0) {
      tmp_.noalias() = z_ * rho;
      out.noalias() += (kTwoPi * gamma_) * (tmp_ * z_);
      tmp_.noalias() = z2_ * rho;
      tmp_.noalias() += rho * z2_;
      out.noalias() -= (kPi * gamma_) * tmp_;
    }
  }

  void step(const MatrixXcd& h, MatrixXcd& rho, double dt) const {
    rhs(h, rho, k1_);
    work_ = rho + (0.5 * dt) * k1_;
    rhs(h, work_, k2_);
    work_ = rho + (0.5 * dt) * k2_;
    rhs(h, work_, k3_);
    work_ = rho + dt * k3_;
    rhs(h, work_, k4_);
    rho += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    rho = 0.5 * (rho + MatrixXcd(rho.adjoint()));  // clear roundoff skew
  }

  double dissipation_scale() const { return std::max(kappa_, gamma_); }

 private:
  MatrixXcd a_, a_dag_, a_dag_a_, z_, z2_;
  double kappa_, gamma_;
  mutable MatrixXcd tmp_, work_, k1_, k2_, k3_, k4_;
};

void check_norm(const MatrixXcd& rho, double time_us) {
  const double trace = rho.real().trace();
  double max_diag = 0.0, min_diag = 0.0;
  for (int m = 0; m < rho.rows(); ++m) {
    max_diag = std::max(max_diag, rho(m, m).real());
    min_diag = std::min(min_diag, rho(m, m).real());
  }
  if (std::abs(trace - 1.0) > 1e-4 || max_diag > 1.0 + 1e-4 ||
      min_diag < -1e-4) {
    std::ostringstream msg;
    msg << "norm drift above 1e-4 at t = " << time_us
        << " us (trace = " << trace << ", max population = " << max_diag
        << "); reduce the time step";
    throw std::runtime_error(msg.str());
  }
}

// interaction-picture <-> rotating-frame phase sandwich, exact and diagonal
void apply_phases(MatrixXcd& rho, const Eigen::VectorXd& freqs_mhz,
                  double time_us, double sign) {
  const int dim = static_cast<int>(rho.rows());
  Eigen::VectorXcd phase(dim);
  for (int m = 0; m < dim; ++m) {
    phase(m) = std::polar(1.0, sign * kTwoPi * freqs_mhz(m) * time_us);
  }
  rho = phase.asDiagonal() * rho * phase.conjugate().asDiagonal();
}

MatrixXcd initial_density(const DressedSystem& ds, const DynamicsConfig& cfg) {
  const int dim = static_cast<int>(ds.energies_rel.size());
  MatrixXcd rho = MatrixXcd::Zero(dim, dim);
  if (cfg.initial.kind == InitialState::Kind::pure) {
    if (cfg.initial.index < 0 || cfg.initial.index >= dim) {
      throw std::invalid_argument("initial state index out of range");
    }
    rho(cfg.initial.index, cfg.initial.index) = 1.0;
    return rho;
  }
  const double kt = kBoltzmannMHzPerK * cfg.dicke.temperature;
  double z = 0.0;
  for (int m = 0; m < dim; ++m) z += std::exp(-ds.energies_rel(m) / kt);
  for (int m = 0; m < dim; ++m) {
    rho(m, m) = std::exp(-ds.energies_rel(m) / kt) / z;
  }
  return rho;
}

double admissible_step(const Frame& frame, const Integrator& integrator) {
  const double f_max =
      std::max({frame.max_scale_mhz, integrator.dissipation_scale(), 1.0});
  return 1.0 / (20.0 * f_max);
}

struct Sampler {
  std::vector<double> time, p1, p2, p4, p5, norm, purity;
  void record(double t, const MatrixXcd& rho) {
    time.push_back(t);
    p1.push_back(rho(0, 0).real());
    p2.push_back(rho(1, 1).real());
    p4.push_back(rho(3, 3).real());
    p5.push_back(rho(4, 4).real());
    norm.push_back(rho.real().trace());
    purity.push_back((rho * rho).real().trace());
  }
};

// Advances rho (interaction picture) through one driven segment. The phase
// sandwiches keep multi-pulse sequences consistent across frame changes.
void run_segment(const DressedSystem& ds, const Integrator& integrator,
                 const PulseSpec& pulse, double dt, double& t_global,
                 MatrixXcd& rho_int, Sampler* sampler, int sample_every) {
  validate(pulse);
  const Frame frame = make_frame(ds, pulse.drive_freq_mhz, pulse.drive_amp_mhz);
  if (!(dt > 0.0) || dt > admissible_step(frame, integrator)) {
    std::ostringstream msg;
    msg << "time step " << dt << " us exceeds the resolution guard "
        << admissible_step(frame, integrator) << " us";
    throw std::invalid_argument(msg.str());
  }
  const long n_steps =
      std::max<long>(1, std::lround(pulse.duration_us / dt));
  const double step_us = pulse.duration_us / static_cast<double>(n_steps);

  apply_phases(rho_int, frame.delta_mhz, t_global, -1.0);
  for (long s = 0; s < n_steps; ++s) {
    integrator.step(frame.h_rf, rho_int, step_us);
    if (sampler != nullptr && ((s + 1) % sample_every == 0 || s + 1 == n_steps)) {
      sampler->record(t_global + (s + 1) * step_us, rho_int);
    }
    if ((s + 1) % 512 == 0 || s + 1 == n_steps) {
      check_norm(rho_int, t_global + (s + 1) * step_us);
    }
  }
  t_global += pulse.duration_us;
  apply_phases(rho_int, frame.delta_mhz, t_global, +1.0);
}

// Undriven stretch in the interaction picture: dissipators only.
void run_idle(const Integrator& integrator, double duration_us, double dt,
              double& t_global, MatrixXcd& rho_int) {
  if (duration_us <= 0.0) return;
  const MatrixXcd h_zero =
      MatrixXcd::Zero(rho_int.rows(), rho_int.cols());
  const long n_steps = std::max<long>(1, std::lround(duration_us / dt));
  const double step_us = duration_us / static_cast<double>(n_steps);
  for (long s = 0; s < n_steps; ++s) {
    integrator.step(h_zero, rho_int, step_us);
  }
  check_norm(rho_int, t_global + duration_us);
  t_global += duration_us;
}

}  // namespace

PopulationTrace evolve(const DynamicsConfig& cfg, const PulseSpec& pulse) {
  validate(cfg.dicke);
  const DressedSystem ds = build_dressed(cfg.dicke);
  const Integrator integrator(ds, cfg.dissipation);
  MatrixXcd rho = initial_density(ds, cfg);

  Sampler sampler;
  sampler.record(0.0, rho);
  const long total_steps = std::max<long>(
      1, std::lround(pulse.duration_us / cfg.time_step_us));
  const int sample_every =
      std::max<int>(1, static_cast<int>(total_steps / 2000));

  double t_global = 0.0;
  run_segment(ds, integrator, pulse, cfg.time_step_us, t_global, rho, &sampler,
              sample_every);

  PopulationTrace trace;
  const int n = static_cast<int>(sampler.time.size());
  auto to_vec = [n](const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), n).eval();
  };
  trace.time_us = to_vec(sampler.time);
  trace.p1 = to_vec(sampler.p1);
  trace.p2 = to_vec(sampler.p2);
  trace.p4 = to_vec(sampler.p4);
  trace.p5 = to_vec(sampler.p5);
  trace.norm = to_vec(sampler.norm);
  trace.purity = to_vec(sampler.purity);
  trace.leak_top_fock = (ds.top_fock * rho).real().trace();
  trace.dressed_energies_mhz = ds.es.energies;
  return trace;
}

std::vector<InversionPoint> inversion_scan(const DynamicsConfig& cfg,
                                           double drive_freq_mhz,
                                           const Eigen::VectorXd& amps_mhz,
                                           double tau_max_us) {
  for (int k = 0; k < amps_mhz.size(); ++k) {
    if (!(amps_mhz(k) > 0.0) || (k > 0 && amps_mhz(k) <= amps_mhz(k - 1))) {
      throw std::invalid_argument("amplitudes must be positive and ascending");
    }
  }
  std::vector<InversionPoint> points;
  for (int k = 0; k < amps_mhz.size(); ++k) {
    PulseSpec pulse{drive_freq_mhz, amps_mhz(k), tau_max_us};
    const PopulationTrace trace = evolve(cfg, pulse);
    InversionPoint point;
    point.amp_mhz = amps_mhz(k);

    const auto& p2 = trace.p2;
    const double baseline = p2(0);
    for (int j = 1; j + 1 < p2.size(); ++j) {
      if (p2(j) < p2(j - 1) && p2(j) <= p2(j + 1) &&
          p2(j) < baseline * (1.0 - 1e-3)) {
        // parabolic refinement on the sampled grid
        const double ym = p2(j - 1), y0 = p2(j), yp = p2(j + 1);
        const double denom = ym - 2.0 * y0 + yp;
        const double offset = denom > 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
        const double dt = trace.time_us(j) - trace.time_us(j - 1);
        point.tau_inv_us = trace.time_us(j) + offset * dt;
        break;
      }
    }
    points.push_back(point);
  }
  return points;
}

CoolingResult cooling_sequence(const DynamicsConfig& cfg, const PulseSpec& pulse_a,
                               const PulseSpec& pulse_b, int repetitions,
                               double gap_us) {
  if (repetitions < 0) {
    throw std::invalid_argument("repetitions must be non-negative");
  }
  validate(cfg.dicke);
  const DressedSystem ds = build_dressed(cfg.dicke);
  const Integrator integrator(ds, cfg.dissipation);
  MatrixXcd rho = initial_density(ds, cfg);

  std::vector<double> p1{rho(0, 0).real()};
  std::vector<double> p2{rho(1, 1).real()};
  double t_global = 0.0;
  for (int rep = 0; rep < repetitions; ++rep) {
    run_segment(ds, integrator, pulse_a, cfg.time_step_us, t_global, rho,
                nullptr, 1);
    run_segment(ds, integrator, pulse_b, cfg.time_step_us, t_global, rho,
                nullptr, 1);
    run_idle(integrator, gap_us, cfg.time_step_us, t_global, rho);
    p1.push_back(rho(0, 0).real());
    p2.push_back(rho(1, 1).real());
  }
  CoolingResult result;
  result.p1_after_cycle =
      Eigen::Map<const Eigen::VectorXd>(p1.data(), p1.size());
  result.p2_after_cycle =
      Eigen::Map<const Eigen::VectorXd>(p2.data(), p2.size());
  return result;
}

}  // namespace spincav
