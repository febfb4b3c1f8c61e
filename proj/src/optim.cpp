#include "spincav/optim.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace spincav {

namespace {

Eigen::MatrixXd central_difference_jacobian(const ResidualFn& residuals,
                                            const Eigen::VectorXd& x,
                                            double rel_step) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd probe = x;
  Eigen::MatrixXd jac;
  for (int j = 0; j < n; ++j) {
    const double h = rel_step * std::max(std::abs(x(j)), 1.0);
    probe(j) = x(j) + h;
    const Eigen::VectorXd rp = residuals(probe);
    probe(j) = x(j) - h;
    const Eigen::VectorXd rm = residuals(probe);
    probe(j) = x(j);
    if (jac.size() == 0) jac.resize(rp.size(), n);
    jac.col(j) = (rp - rm) / (2.0 * h);
  }
  return jac;
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& residuals,
                             const Eigen::VectorXd& init,
                             const LmOptions& opts) {
  const int n = static_cast<int>(init.size());
  Eigen::VectorXd x = init;
  Eigen::VectorXd r = residuals(x);
  double cost = r.squaredNorm();
  double lambda = opts.lambda_init;

  LmResult result;
  result.params = x;
  result.residual_norm = std::sqrt(cost);

  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    result.iterations = iter;
    const Eigen::MatrixXd jac =
        central_difference_jacobian(residuals, x, opts.fd_step);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;

    bool stepped = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd delta = damped.ldlt().solve(-jtr);
      const Eigen::VectorXd x_try = x + delta;
      const Eigen::VectorXd r_try = residuals(x_try);
      const double cost_try = r_try.squaredNorm();
      if (cost_try <= cost) {
        const double rel_step =
            (delta.cwiseAbs().array() /
             x.cwiseAbs().array().max(1.0)).maxCoeff();
        x = x_try;
        r = r_try;
        cost = cost_try;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (rel_step < opts.step_tol) {
          result.converged = true;
        }
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
    result.params = x;
    result.residual_norm = std::sqrt(cost);
    if (result.converged || !stepped) {
      // a fully rejected sweep means no further progress is possible
      result.converged = result.converged || !stepped;
      break;
    }
  }

  // Gauss-Newton covariance at the final iterate.
  const Eigen::MatrixXd jac =
      central_difference_jacobian(residuals, x, opts.fd_step);
  const int dof = std::max<int>(1, static_cast<int>(r.size()) - n);
  const double variance = cost / dof;
  Eigen::MatrixXd jtj = jac.transpose() * jac;
  result.covariance =
      jtj.completeOrthogonalDecomposition().pseudoInverse() * variance;
  return result;
}

namespace {

Eigen::VectorXd clamp_to_bounds(Eigen::VectorXd x, const SimplexOptions& opts) {
  if (opts.lower.size() == x.size()) x = x.cwiseMax(opts.lower);
  if (opts.upper.size() == x.size()) x = x.cwiseMin(opts.upper);
  return x;
}

struct Vertex {
  Eigen::VectorXd x;
  double f = std::numeric_limits<double>::infinity();
};

double simplex_diameter(const std::vector<Vertex>& simplex) {
  const Eigen::VectorXd& best = simplex.front().x;
  const double scale = std::max(1.0, best.cwiseAbs().maxCoeff());
  double diameter = 0.0;
  for (const auto& v : simplex) {
    diameter = std::max(diameter, (v.x - best).cwiseAbs().maxCoeff());
  }
  return diameter / scale;
}

}  // namespace

SimplexResult nelder_mead(const ScalarFn& objective, const Eigen::VectorXd& init,
                          const SimplexOptions& opts) {
  const int n = static_cast<int>(init.size());
  if (n == 0) throw std::invalid_argument("empty parameter vector");

  SimplexResult result;
  long evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return objective(x);
  };

  Eigen::VectorXd start = clamp_to_bounds(init, opts);
  double f_start = eval(start);
  result.best = start;
  result.value = f_start;
  result.history.push_back(f_start);
  if (f_start == 0.0) {  // already at an exact minimum
    result.converged = true;
    result.evaluations = evals;
    return result;
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);

  for (int leg = 0; leg <= opts.restarts; ++leg) {
    // fresh simplex around the current best point
    Eigen::VectorXd anchor = result.best;
    if (leg > 0) {
      for (int j = 0; j < n; ++j) {
        anchor(j) += 0.25 * opts.initial_step *
                     std::max(std::abs(anchor(j)), 1.0) * jitter(rng);
      }
      anchor = clamp_to_bounds(anchor, opts);
    }
    std::vector<Vertex> simplex(n + 1);
    simplex[0] = {anchor, eval(anchor)};
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd v = anchor;
      const double h = opts.initial_step * std::max(std::abs(v(j)), 1.0);
      v(j) += h;
      v = clamp_to_bounds(v, opts);
      if ((v - anchor).cwiseAbs().maxCoeff() < 0.5 * h) {
        v = anchor;
        v(j) -= h;  // bound was in the way; expand the other side
        v = clamp_to_bounds(v, opts);
      }
      simplex[j + 1] = {v, eval(v)};
    }

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    bool leg_converged = false;
    while (evals < static_cast<long>(opts.max_evals) * (leg + 1)) {
      std::sort(simplex.begin(), simplex.end(),
                [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
      if (simplex[0].f < result.value) {
        result.value = simplex[0].f;
        result.best = simplex[0].x;
        result.history.push_back(result.value);
      }
      if (simplex_diameter(simplex) < opts.diameter_tol) {
        leg_converged = true;
        break;
      }

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < n; ++j) centroid += simplex[j].x;
      centroid /= n;

      const Vertex& worst = simplex[n];
      Eigen::VectorXd xr =
          clamp_to_bounds(centroid + alpha * (centroid - worst.x), opts);
      const double fr = eval(xr);
      if (fr < simplex[0].f) {
        Eigen::VectorXd xe =
            clamp_to_bounds(centroid + gamma * (centroid - worst.x), opts);
        const double fe = eval(xe);
        simplex[n] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      } else if (fr < simplex[n - 1].f) {
        simplex[n] = {xr, fr};
      } else {
        Eigen::VectorXd xc =
            clamp_to_bounds(centroid + rho * (worst.x - centroid), opts);
        const double fc = eval(xc);
        if (fc < worst.f) {
          simplex[n] = {xc, fc};
        } else {
          for (int j = 1; j <= n; ++j) {
            simplex[j].x =
                simplex[0].x + sigma * (simplex[j].x - simplex[0].x);
            simplex[j].f = eval(simplex[j].x);
          }
        }
      }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    if (simplex[0].f < result.value) {
      result.value = simplex[0].f;
      result.best = simplex[0].x;
      result.history.push_back(result.value);
    }
    result.converged = leg_converged;
  }
  result.evaluations = evals;
  return result;
}

}  // namespace spincav
