#include "spincav/dicke.hpp"

#include "spincav/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spincav {

MatrixXcd photon_annihilator(int photon_levels) {
  if (photon_levels < 1) {
    throw std::invalid_argument("need at least one Fock level");
  }
  MatrixXcd a = MatrixXcd::Zero(photon_levels, photon_levels);
  for (int n = 1; n < photon_levels; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

MatrixXcd lift_photon(const MatrixXcd& op_photon, int spin_dim) {
  const int np = static_cast<int>(op_photon.rows());
  MatrixXcd out = MatrixXcd::Zero(np * spin_dim, np * spin_dim);
  for (int r = 0; r < np; ++r) {
    for (int c = 0; c < np; ++c) {
      if (op_photon(r, c) != 0.0) {
        out.block(r * spin_dim, c * spin_dim, spin_dim, spin_dim) =
            op_photon(r, c) * MatrixXcd::Identity(spin_dim, spin_dim);
      }
    }
  }
  return out;
}

MatrixXcd lift_spin(int photon_levels, const MatrixXcd& op_spin) {
  const int ns = static_cast<int>(op_spin.rows());
  MatrixXcd out = MatrixXcd::Zero(photon_levels * ns, photon_levels * ns);
  for (int n = 0; n < photon_levels; ++n) {
    out.block(n * ns, n * ns, ns, ns) = op_spin;
  }
  return out;
}

MatrixXcd dicke_hamiltonian(const DickeConfig& cfg) {
  validate(cfg);
  const int spin_dim = multiplicity(cfg.spin.spin);
  const int photon_levels = cfg.cavity.n_max + 1;

  const MatrixXcd hs = spin_hamiltonian(cfg.spin, cfg.cf, cfg.zeeman);
  const MatrixXcd a = photon_annihilator(photon_levels);
  const MatrixXcd number = a.adjoint() * a;
  const auto ops = spin_operators<double>(cfg.spin.spin);

  MatrixXcd h = lift_spin(photon_levels, hs);
  h += cfg.cavity.omega_c * lift_photon(number, spin_dim);
  if (cfg.g_c != 0.0) {
    const MatrixXcd quad = a + MatrixXcd(a.adjoint());
    const MatrixXcd ladder = ops.sp + ops.sm;
    // (a^dag + a) (x) (S+ + S-), no rotating-wave approximation
    const int ns = spin_dim;
    MatrixXcd coupling = MatrixXcd::Zero(h.rows(), h.cols());
    for (int r = 0; r < photon_levels; ++r) {
      for (int c = 0; c < photon_levels; ++c) {
        if (quad(r, c) != 0.0) {
          coupling.block(r * ns, c * ns, ns, ns) = quad(r, c) * ladder;
        }
      }
    }
    h += cfg.g_c * coupling;
  }
  return h;
}

namespace {

void check_hermitian(const MatrixXcd& h) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double dev = (h - MatrixXcd(h.adjoint())).cwiseAbs().maxCoeff();
  if (dev > 1e-9 * scale) {
    throw std::invalid_argument("matrix is not Hermitian");
  }
}

void fix_gauge(MatrixXcd& states) {
  for (int k = 0; k < states.cols(); ++k) {
    int imax = 0;
    double best = -1.0;
    for (int r = 0; r < states.rows(); ++r) {
      const double mag = std::abs(states(r, k));
      if (mag > best + 1e-15) {
        best = mag;
        imax = r;
      }
    }
    const std::complex<double> pivot = states(imax, k);
    if (std::abs(pivot) > 0.0) {
      states.col(k) *= std::conj(pivot) / std::abs(pivot);
    }
  }
}

}  // namespace

EigenSystem diagonalize(const MatrixXcd& h, int photon_levels) {
  check_hermitian(h);
  if (photon_levels < 1 || h.rows() % photon_levels != 0) {
    throw std::invalid_argument("photon_levels does not divide the dimension");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed to converge");
  }
  EigenSystem es;
  es.energies = solver.eigenvalues();
  es.states = solver.eigenvectors();
  es.photon_levels = photon_levels;
  es.spin_dim = static_cast<int>(h.rows()) / photon_levels;
  fix_gauge(es.states);

  const double tol =
      1e-8 * std::max(1.0, es.energies.cwiseAbs().maxCoeff());
  for (int k = 0; k < es.energies.size(); ++k) {
    const double residual =
        (h * es.states.col(k) - es.energies(k) * es.states.col(k))
            .cwiseAbs()
            .maxCoeff();
    if (residual > tol) {
      throw std::runtime_error("eigenpair residual above tolerance");
    }
  }
  return es;
}

EigenSystem diagonalize(const MatrixXcd& h) { return diagonalize(h, 1); }

double transition_amplitude(const EigenSystem& es, int i, int f,
                            double temperature_k) {
  const int dim = static_cast<int>(es.energies.size());
  if (i < 0 || i >= dim || f < 0 || f >= dim) {
    throw std::invalid_argument("state index out of range");
  }
  if (i == f) {
    throw std::invalid_argument("initial and final state must differ");
  }
  if (!(temperature_k > 0.0)) {
    throw std::invalid_argument("temperature must be positive");
  }
  const MatrixXcd a =
      lift_photon(photon_annihilator(es.photon_levels), es.spin_dim);
  const std::complex<double> elem =
      (es.states.col(f).adjoint() * (a * es.states.col(i)))(0, 0);
  const double e_rel = es.energies(i) - es.energies.minCoeff();
  const double kt = kBoltzmannMHzPerK * temperature_k;
  return std::norm(elem) * std::exp(-e_rel / kt);
}

double matrix_element(const EigenSystem& es, int i, int f, Axis axis) {
  const int dim = static_cast<int>(es.energies.size());
  if (i < 0 || i >= dim || f < 0 || f >= dim) {
    throw std::invalid_argument("state index out of range");
  }
  const double spin = 0.5 * (es.spin_dim - 1);
  const auto ops = spin_operators<double>(spin);
  const MatrixXcd* op = nullptr;
  switch (axis) {
    case Axis::x: op = &ops.sx; break;
    case Axis::y: op = &ops.sy; break;
    case Axis::z: op = &ops.sz; break;
  }
  const MatrixXcd lifted = lift_spin(es.photon_levels, *op);
  const std::complex<double> elem =
      (es.states.col(f).adjoint() * (lifted * es.states.col(i)))(0, 0);
  return std::abs(elem);
}

std::vector<int> overlap_labels(const MatrixXcd& prev_labeled,
                                const MatrixXcd& current) {
  const int dim = static_cast<int>(current.cols());
  Eigen::MatrixXd overlap = (prev_labeled.adjoint() * current).cwiseAbs();
  std::vector<int> label_of_column(dim, -1);
  std::vector<bool> label_used(dim, false);
  std::vector<bool> column_used(dim, false);
  for (int n = 0; n < dim; ++n) {
    int best_label = -1, best_col = -1;
    double best = -1.0;
    for (int l = 0; l < dim; ++l) {
      if (label_used[l]) continue;
      for (int c = 0; c < dim; ++c) {
        if (column_used[c]) continue;
        if (overlap(l, c) > best) {
          best = overlap(l, c);
          best_label = l;
          best_col = c;
        }
      }
    }
    label_of_column[best_col] = best_label;
    label_used[best_label] = true;
    column_used[best_col] = true;
  }
  return label_of_column;
}

EigenSystem relabel(const EigenSystem& es, const std::vector<int>& label_of_column) {
  EigenSystem out = es;
  for (int c = 0; c < es.states.cols(); ++c) {
    const int l = label_of_column[c];
    out.states.col(l) = es.states.col(c);
    out.energies(l) = es.energies(c);
  }
  return out;
}

TransitionSpectrum sweep_spectrum(const DickeConfig& cfg,
                                  const Eigen::VectorXd& field_grid,
                                  const std::vector<std::pair<int, int>>& transitions) {
  validate(cfg);
  if (field_grid.size() == 0) {
    throw std::invalid_argument("field grid must be nonempty");
  }
  const int n_points = static_cast<int>(field_grid.size());

  // Diagonalizations are independent; label tracking below is sequential.
  std::vector<EigenSystem> systems(n_points);
  parallel_for(n_points, [&](int idx) {
    DickeConfig local = cfg;
    local.zeeman.h0 = field_grid(idx);
    systems[idx] =
        diagonalize(dicke_hamiltonian(local), local.cavity.n_max + 1);
  });

  TransitionSpectrum spectrum;
  spectrum.points.resize(n_points);
  MatrixXcd prev_states;
  for (int idx = 0; idx < n_points; ++idx) {
    EigenSystem labeled = systems[idx];
    if (idx > 0) {
      labeled = relabel(systems[idx],
                        overlap_labels(prev_states, systems[idx].states));
    }
    prev_states = labeled.states;

    SweepPoint& point = spectrum.points[idx];
    point.field_g = field_grid(idx);
    point.lines.reserve(transitions.size());
    for (const auto& [i, f] : transitions) {
      TransitionLine line;
      line.i = i;
      line.f = f;
      line.freq_mhz = std::abs(labeled.energies(f) - labeled.energies(i));
      line.amplitude = transition_amplitude(labeled, i, f, cfg.temperature);
      point.lines.push_back(line);
    }
  }
  return spectrum;
}

PowerMap render_absorption_map(const TransitionSpectrum& spectrum,
                               const Eigen::VectorXd& freq_grid,
                               double gamma_mhz) {
  if (!(gamma_mhz > 0.0)) {
    throw std::invalid_argument("Lorentzian half-width must be positive");
  }
  PowerMap map;
  const int nh = static_cast<int>(spectrum.points.size());
  map.field_g.resize(nh);
  map.freq_mhz = freq_grid;
  map.power = Eigen::MatrixXd::Zero(nh, freq_grid.size());
  const double g2 = gamma_mhz * gamma_mhz;
  for (int r = 0; r < nh; ++r) {
    map.field_g(r) = spectrum.points[r].field_g;
    for (const auto& line : spectrum.points[r].lines) {
      for (int c = 0; c < freq_grid.size(); ++c) {
        const double d = freq_grid(c) - line.freq_mhz;
        map.power(r, c) += line.amplitude * g2 / (d * d + g2);
      }
    }
  }
  return map;
}

PowerMap render_reflection_map(const TransitionSpectrum& spectrum,
                               const Eigen::VectorXd& freq_grid,
                               double gamma_mhz, double depth) {
  if (!(depth > 0.0) || depth >= 1.0) {
    throw std::invalid_argument("dip depth must lie in (0, 1)");
  }
  PowerMap map;
  const int nh = static_cast<int>(spectrum.points.size());
  map.field_g.resize(nh);
  map.freq_mhz = freq_grid;
  map.power = Eigen::MatrixXd::Ones(nh, freq_grid.size());
  const double g2 = gamma_mhz * gamma_mhz;
  for (int r = 0; r < nh; ++r) {
    map.field_g(r) = spectrum.points[r].field_g;
    for (const auto& line : spectrum.points[r].lines) {
      for (int c = 0; c < freq_grid.size(); ++c) {
        const double d = freq_grid(c) - line.freq_mhz;
        map.power(r, c) *= 1.0 - depth * g2 / (d * d + g2);
      }
    }
  }
  return map;
}

std::vector<ScanRow> ground_state_perturbation_scan(const DickeConfig& cfg,
                                                    ScanVar var,
                                                    const Eigen::VectorXd& grid) {
  validate(cfg);
  if (cfg.zeeman.h0 != 0.0) {
    throw std::invalid_argument("perturbation scan requires H0 = 0");
  }
  std::vector<ScanRow> rows(grid.size());

  if (var == ScanVar::b44) {
    DickeConfig reference = cfg;
    reference.cf.b44 = 0.0;
    const double e1_ref =
        diagonalize(dicke_hamiltonian(reference), cfg.cavity.n_max + 1)
            .energies(0);
    parallel_for(static_cast<int>(grid.size()), [&](int idx) {
      DickeConfig local = cfg;
      local.cf.b44 = grid(idx);
      const double e1 =
          diagonalize(dicke_hamiltonian(local), cfg.cavity.n_max + 1)
              .energies(0);
      rows[idx] = {grid(idx), e1 - e1_ref};
    });
  } else {
    parallel_for(static_cast<int>(grid.size()), [&](int idx) {
      DickeConfig local = cfg;
      if (!(grid(idx) >= 0.0)) {
        throw std::invalid_argument("coupling scan values must be >= 0");
      }
      local.g_c = grid(idx);
      const auto es =
          diagonalize(dicke_hamiltonian(local), cfg.cavity.n_max + 1);
      rows[idx] = {grid(idx),
                   (es.energies(2) - es.energies(0)) - cfg.cavity.omega_c};
    });
  }
  return rows;
}

}  // namespace spincav
