#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace spincav {

/// Levenberg-Marquardt on a residual vector, Jacobian by central differences.
struct LmOptions {
  int max_iterations = 500;
  double step_tol = 1e-8;       // relative parameter step
  double fd_step = 1e-6;        // relative finite-difference step
  double lambda_init = 1e-3;
};

struct LmResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;   // (J^T J)^-1 * SSR/(N-p)
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

LmResult levenberg_marquardt(const ResidualFn& residuals,
                             const Eigen::VectorXd& init,
                             const LmOptions& opts = {});

/// Bounded derivative-free Nelder-Mead simplex with deterministic restarts
/// from the perturbed best point. Coordinates are pre-scaled by the caller;
/// convergence is simplex diameter < diameter_tol relative to the best vertex.
struct SimplexOptions {
  Eigen::VectorXd lower;        // bounds (same size as init); may be empty
  Eigen::VectorXd upper;
  double diameter_tol = 1e-6;
  double initial_step = 0.02;   // fraction of max(|x|,1) per coordinate
  int max_evals = 40000;        // per restart leg
  int restarts = 3;
  std::uint64_t seed = 1;
};

struct SimplexResult {
  Eigen::VectorXd best;
  double value = 0.0;
  bool converged = false;
  long evaluations = 0;
  std::vector<double> history;  // best value after each accepted iteration
};

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

SimplexResult nelder_mead(const ScalarFn& objective, const Eigen::VectorXd& init,
                          const SimplexOptions& opts = {});

}  // namespace spincav
