#include "spincav/reflection.hpp"

#include "spincav/optim.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace spincav {

double s11_squared(const ReflectionParams& p, double omega_mhz) {
  if (!(p.gamma_s > 0.0)) {
    throw std::invalid_argument("spin linewidth gamma_s must be positive");
  }
  if (!(p.gc_2l >= 0.0)) {
    throw std::invalid_argument("coupling must be non-negative");
  }
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> spin_term =
      p.gc_2l * p.gc_2l / (i * (omega_mhz - p.omega_s) - p.gamma_s);
  const std::complex<double> s11 =
      1.0 + p.kappa_e / (i * (omega_mhz - p.omega_c) - p.kappa_c + spin_term);
  return std::norm(s11);
}

ReflectionTrace synthesize_s11(const ReflectionParams& p,
                               const Eigen::VectorXd& freq_grid) {
  ReflectionTrace trace;
  trace.freq_mhz = freq_grid;
  trace.power.resize(freq_grid.size());
  for (int k = 0; k < freq_grid.size(); ++k) {
    trace.power(k) = s11_squared(p, freq_grid(k));
  }
  return trace;
}

S11FitResult fit_s11(const ReflectionTrace& trace, const ReflectionParams& fixed,
                     double gc_2l_init, double gamma_s_init) {
  if (trace.freq_mhz.size() < 20) {
    throw std::invalid_argument("trace needs at least 20 points");
  }
  if (trace.freq_mhz.size() != trace.power.size()) {
    throw std::invalid_argument("trace grids have mismatched lengths");
  }

  auto residuals = [&](const Eigen::VectorXd& x) {
    ReflectionParams p = fixed;
    p.gc_2l = std::abs(x(0));
    p.gamma_s = std::max(std::abs(x(1)), 1e-9);
    Eigen::VectorXd r(trace.freq_mhz.size());
    for (int k = 0; k < trace.freq_mhz.size(); ++k) {
      r(k) = s11_squared(p, trace.freq_mhz(k)) - trace.power(k);
    }
    return r;
  };

  Eigen::VectorXd init(2);
  init << gc_2l_init, gamma_s_init;
  const LmResult lm = levenberg_marquardt(residuals, init);

  S11FitResult result;
  result.gc_2l = std::abs(lm.params(0));
  result.gamma_s = std::abs(lm.params(1));
  result.gc_2l_sigma = std::sqrt(std::max(lm.covariance(0, 0), 0.0));
  result.gamma_s_sigma = std::sqrt(std::max(lm.covariance(1, 1), 0.0));
  result.converged = lm.converged;
  result.iterations = lm.iterations;
  result.residual_norm = lm.residual_norm;
  return result;
}

}  // namespace spincav
