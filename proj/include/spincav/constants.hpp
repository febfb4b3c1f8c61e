#pragma once

// Physical constants in the unit system used throughout: energies as E/h in MHz,
// magnetic fields in Gauss, temperatures in Kelvin, lengths in micrometres.

namespace spincav {

// mu_B / h
inline constexpr double kBohrMagnetonMHzPerG = 1.3996245;

// k_B / h
inline constexpr double kBoltzmannMHzPerK = 20836.619;

// electron gyromagnetic ratio gamma_e / (2 pi)
inline constexpr double kGammaElectronMHzPerG = 2.8025;

inline constexpr double kPlanckJs = 6.62607015e-34;
inline constexpr double kHbarJs = 1.054571817e-34;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr double kGaussPerTesla = 1.0e4;

}  // namespace spincav
