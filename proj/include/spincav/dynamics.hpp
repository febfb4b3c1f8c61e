#pragma once

#include "spincav/dicke.hpp"

#include <optional>
#include <vector>

namespace spincav {

struct PulseSpec {
  double drive_freq_mhz = 0.0;
  double drive_amp_mhz = 0.0;  // coherent cavity-drive rate epsilon
  double duration_us = 0.0;
};

inline void validate(const PulseSpec& p) {
  if (!(p.duration_us > 0.0)) {
    throw std::invalid_argument("pulse duration must be positive");
  }
  if (!(p.drive_amp_mhz >= 0.0)) {
    throw std::invalid_argument("drive amplitude must be non-negative");
  }
  if (!(p.drive_freq_mhz > 0.0)) {
    throw std::invalid_argument("drive frequency must be positive");
  }
}

struct Dissipation {
  double kappa_c_mhz = 0.0;  // cavity decay, D[a]
  double gamma_s_mhz = 0.0;  // collective dephasing, D[I (x) S_z]
};

struct InitialState {
  enum class Kind { thermal, pure };
  Kind kind = Kind::thermal;
  int index = 0;  // dressed-state index for `pure`
};

/// Driven master-equation configuration. The composite Hamiltonian keeps the
/// full g_c coupling; the drive is treated in the frame rotating at the drive
/// frequency where only its secular (co-rotating) matrix elements survive.
/// Requires n_max >= 2 so the drive has Fock headroom.
struct DynamicsConfig {
  DickeConfig dicke;
  Dissipation dissipation;
  InitialState initial;
  double time_step_us = 1e-5;
};

struct PopulationTrace {
  Eigen::VectorXd time_us;
  Eigen::VectorXd p1, p2, p4, p5;  // labeled dressed states (1-based names)
  Eigen::VectorXd norm;            // tr(rho)
  Eigen::VectorXd purity;          // tr(rho^2)
  double leak_top_fock = 0.0;      // final P(n = n_max); want < 1e-3
  Eigen::VectorXd dressed_energies_mhz;
};

/// Integrates drho/dt = -i[H + H_drive, rho] + kappa_c D[a] + gamma_s D[S_z]
/// (rates converted to angular units internally) with fixed-step RK4 in the
/// dressed rotating frame. Populations refer to the undriven dressed basis.
/// Aborts with a diagnostic if the norm drifts by more than 1e-4.
PopulationTrace evolve(const DynamicsConfig& cfg, const PulseSpec& pulse);

struct InversionPoint {
  double amp_mhz = 0.0;
  std::optional<double> tau_inv_us;  // absent when no minimum before tau_max
};

/// First minimum of P(|2>) versus pulse length, parabolic-refined, for each
/// drive amplitude.
std::vector<InversionPoint> inversion_scan(const DynamicsConfig& cfg,
                                           double drive_freq_mhz,
                                           const Eigen::VectorXd& amps_mhz,
                                           double tau_max_us);

struct CoolingResult {
  Eigen::VectorXd p1_after_cycle;  // index 0 = initial thermal value
  Eigen::VectorXd p2_after_cycle;
};

/// Alternates pulse_a (depletes |2> into |4>), pulse_b (drains |4> into |1>)
/// and an idle gap, reporting P(|1>) after each full cycle.
CoolingResult cooling_sequence(const DynamicsConfig& cfg, const PulseSpec& pulse_a,
                               const PulseSpec& pulse_b, int repetitions,
                               double gap_us);

}  // namespace spincav
