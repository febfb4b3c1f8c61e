#pragma once

#include "spincav/hamiltonian.hpp"

#include <utility>
#include <vector>

namespace spincav {

struct CavityParams {
  double omega_c = 0.0;  // mode frequency, MHz
  double kappa_c = 0.0;  // total damping, MHz
  double kappa_e = 0.0;  // external damping, MHz
  int n_max = 1;         // Fock truncation
};

inline void validate(const CavityParams& c) {
  if (!(c.omega_c > 0.0)) {
    throw std::invalid_argument("cavity frequency must be positive");
  }
  if (!(c.kappa_e > 0.0) || !(c.kappa_e <= c.kappa_c)) {
    throw std::invalid_argument("cavity damping requires 0 < kappa_e <= kappa_c");
  }
  if (c.n_max < 1) {
    throw std::invalid_argument("Fock truncation n_max must be >= 1");
  }
}

struct DickeConfig {
  double g_c = 0.0;  // ensemble coupling, MHz
  SpinParams spin;
  CrystalFieldParams cf;
  ZeemanConfig zeeman;
  CavityParams cavity;
  double temperature = 0.38;  // Kelvin
};

inline void validate(const DickeConfig& d) {
  if (!(d.g_c >= 0.0)) {
    throw std::invalid_argument("coupling g_c must be non-negative");
  }
  if (!(d.temperature > 0.0)) {
    throw std::invalid_argument("temperature must be positive");
  }
  validate(d.spin);
  validate(d.cf);
  validate(d.zeeman);
  validate(d.cavity);
}

/// Photon annihilation operator on a truncated Fock space, |n> ascending.
MatrixXcd photon_annihilator(int photon_levels);

/// op_photon (x) I_spin on the product space |n> (outer) (x) |S_z> (inner).
MatrixXcd lift_photon(const MatrixXcd& op_photon, int spin_dim);

/// I_photon (x) op_spin.
MatrixXcd lift_spin(int photon_levels, const MatrixXcd& op_spin);

/// Full composite Hamiltonian in MHz:
///   H = I (x) H_s + omega_c a^dag a (x) I + g_c (a^dag + a) (x) (S+ + S-).
/// Counter-rotating terms kept; dimension (n_max+1)(2S+1).
MatrixXcd dicke_hamiltonian(const DickeConfig& cfg);

/// Eigendecomposition over the product basis. Energies ascending (MHz);
/// column k of `states` is eigenvector |k>, gauge-fixed so the
/// largest-magnitude component is real and positive.
struct EigenSystem {
  Eigen::VectorXd energies;
  MatrixXcd states;
  int photon_levels = 1;
  int spin_dim = 0;
};

/// Exact diagonalization of a Hermitian matrix (checked to 1e-9 relative).
/// photon_levels describes the product structure; the single-argument overload
/// treats the whole space as one spin multiplet.
EigenSystem diagonalize(const MatrixXcd& h, int photon_levels);
EigenSystem diagonalize(const MatrixXcd& h);

/// |<f| a (x) I |i>|^2 exp(-(E_i - E_ground)/(k_B T/h)).
/// Boltzmann energies are referenced to the instantaneous ground state so the
/// amplitude is invariant under a uniform level shift. Indices are 0-based.
double transition_amplitude(const EigenSystem& es, int i, int f,
                            double temperature_k);

enum class Axis { x, y, z };

/// |<f| I (x) S_axis |i>|, dimensionless.
double matrix_element(const EigenSystem& es, int i, int f, Axis axis);

/// Greedy maximal-overlap assignment between adjacent eigenbases;
/// returns labels[column] = label inherited from prev_labeled.
std::vector<int> overlap_labels(const MatrixXcd& prev_labeled,
                                const MatrixXcd& current);

/// Reorders columns/energies so column k carries label k.
EigenSystem relabel(const EigenSystem& es, const std::vector<int>& label_of_column);

struct TransitionLine {
  int i = 0;
  int f = 0;
  double freq_mhz = 0.0;
  double amplitude = 0.0;
};

struct SweepPoint {
  double field_g = 0.0;
  std::vector<TransitionLine> lines;
};

struct TransitionSpectrum {
  std::vector<SweepPoint> points;
};

/// Rebuilds and diagonalizes H at every field point. State labels are assigned
/// by energy order at the first point, then carried along the grid by
/// maximal-overlap matching so a labeled transition follows its branch through
/// avoided crossings. Points are independent; set SPINCAV_THREADS to
/// diagonalize them in parallel (output order is fixed by grid index).
TransitionSpectrum sweep_spectrum(const DickeConfig& cfg,
                                  const Eigen::VectorXd& field_grid,
                                  const std::vector<std::pair<int, int>>& transitions);

/// Dense map rendered from a sweep: unit-peak Lorentzians of half-width
/// gamma_mhz weighted by the transition amplitudes.
struct PowerMap {
  Eigen::VectorXd field_g;
  Eigen::VectorXd freq_mhz;
  Eigen::MatrixXd power;  // (field, freq)
};

PowerMap render_absorption_map(const TransitionSpectrum& spectrum,
                               const Eigen::VectorXd& freq_grid,
                               double gamma_mhz);

/// Reflection-style map with dips carved at the line positions; used by the
/// synthetic-data generator feeding dip extraction.
PowerMap render_reflection_map(const TransitionSpectrum& spectrum,
                               const Eigen::VectorXd& freq_grid,
                               double gamma_mhz, double depth = 0.9);

enum class ScanVar { b44, gc };

struct ScanRow {
  double value = 0.0;
  double shift_mhz = 0.0;
};

/// Zero-field ground-state perturbation traces (requires H0 = 0):
///   b44: E1(B44) - E1(B44 = 0) at the configured g_c;
///   gc:  (E3 - E1) - omega_c at the configured B44.
std::vector<ScanRow> ground_state_perturbation_scan(const DickeConfig& cfg,
                                                    ScanVar var,
                                                    const Eigen::VectorXd& grid);

}  // namespace spincav
