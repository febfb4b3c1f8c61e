#pragma once

#include <Eigen/Dense>

namespace spincav {

/// Input-output reflection model parameters; every rate is an ordinary
/// frequency in MHz (the omega/2pi convention used throughout).
struct ReflectionParams {
  double omega_c = 0.0;
  double kappa_c = 0.0;
  double kappa_e = 0.0;
  double omega_s = 0.0;   // spin transition frequency
  double gc_2l = 0.0;     // two-level effective coupling
  double gamma_s = 0.0;   // spin dephasing rate
};

/// |S11|^2 = |1 + kappa_e / (i(w - w_c) - kappa_c + g^2/(i(w - w_s) - gamma_s))|^2
double s11_squared(const ReflectionParams& p, double omega_mhz);

struct ReflectionTrace {
  Eigen::VectorXd freq_mhz;
  Eigen::VectorXd power;  // linear |S11|^2
};

/// Synthesizes a trace on the given grid.
ReflectionTrace synthesize_s11(const ReflectionParams& p,
                               const Eigen::VectorXd& freq_grid);

/// Two-parameter least-squares fit of (gc_2l, gamma_s) with everything else
/// fixed. Non-convergence is reported, not thrown; the last iterate and
/// residual norm are always populated.
struct S11FitResult {
  double gc_2l = 0.0;
  double gamma_s = 0.0;
  double gc_2l_sigma = 0.0;
  double gamma_s_sigma = 0.0;
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0;
};

S11FitResult fit_s11(const ReflectionTrace& trace, const ReflectionParams& fixed,
                     double gc_2l_init, double gamma_s_init);

}  // namespace spincav
