#include "spincav/fit.hpp"

#include "spincav/optim.hpp"
#include "spincav/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spincav {

const char* fit_param_name(FitParam p) {
  switch (p) {
    case FitParam::b20: return "B20";
    case FitParam::b40: return "B40";
    case FitParam::b44: return "B44";
    case FitParam::b60: return "B60";
    case FitParam::b64: return "B64";
    case FitParam::omega_c: return "omega_c";
    case FitParam::theta: return "theta";
    case FitParam::gc: return "gc";
  }
  return "?";
}

std::optional<FitParam> fit_param_from_name(const std::string& name) {
  for (FitParam p : kAllFitParams) {
    if (name == fit_param_name(p)) return p;
  }
  return std::nullopt;
}

double fit_param_scale(FitParam p) {
  switch (p) {
    case FitParam::b20: return 1e3;
    case FitParam::b40: return 1e0;
    case FitParam::b44: return 1e1;
    case FitParam::b60: return 1e-3;
    case FitParam::b64: return 1e-2;
    case FitParam::omega_c: return 1e4;
    case FitParam::theta: return 1e2;
    case FitParam::gc: return 1e2;
  }
  return 1.0;
}

double get_param(const DickeConfig& cfg, FitParam p) {
  switch (p) {
    case FitParam::b20: return cfg.cf.b20;
    case FitParam::b40: return cfg.cf.b40;
    case FitParam::b44: return cfg.cf.b44;
    case FitParam::b60: return cfg.cf.b60;
    case FitParam::b64: return cfg.cf.b64;
    case FitParam::omega_c: return cfg.cavity.omega_c;
    case FitParam::theta: return cfg.zeeman.theta_deg;
    case FitParam::gc: return cfg.g_c;
  }
  return 0.0;
}

void set_param(DickeConfig& cfg, FitParam p, double value) {
  switch (p) {
    case FitParam::b20: cfg.cf.b20 = value; break;
    case FitParam::b40: cfg.cf.b40 = value; break;
    case FitParam::b44: cfg.cf.b44 = value; break;
    case FitParam::b60: cfg.cf.b60 = value; break;
    case FitParam::b64: cfg.cf.b64 = value; break;
    case FitParam::omega_c: cfg.cavity.omega_c = value; break;
    case FitParam::theta: cfg.zeeman.theta_deg = value; break;
    case FitParam::gc: cfg.g_c = value; break;
  }
}

LinePair predict_lines(const DickeConfig& cfg, double field_g) {
  DickeConfig local = cfg;
  local.zeeman.h0 = field_g;
  const auto es =
      diagonalize(dicke_hamiltonian(local), local.cavity.n_max + 1);
  const double lower = es.energies(3) - es.energies(1);
  const double upper = es.energies(4) - es.energies(1);
  return {std::min(lower, upper), std::max(lower, upper)};
}

std::vector<LinePair> predict_lines(const DickeConfig& cfg,
                                    const Eigen::VectorXd& fields) {
  const int n = static_cast<int>(fields.size());
  std::vector<EigenSystem> systems(n);
  parallel_for(n, [&](int idx) {
    DickeConfig local = cfg;
    local.zeeman.h0 = fields(idx);
    systems[idx] =
        diagonalize(dicke_hamiltonian(local), local.cavity.n_max + 1);
  });

  std::vector<LinePair> lines(n);
  MatrixXcd prev;
  for (int idx = 0; idx < n; ++idx) {
    EigenSystem labeled = systems[idx];
    if (idx > 0) {
      labeled = relabel(systems[idx], overlap_labels(prev, systems[idx].states));
    }
    prev = labeled.states;
    const double a = std::abs(labeled.energies(3) - labeled.energies(1));
    const double b = std::abs(labeled.energies(4) - labeled.energies(1));
    lines[idx] = {std::min(a, b), std::max(a, b)};
  }
  return lines;
}

DipExtraction extract_dips(const PowerMap& map, double prominence_db,
                           double branch_ref_mhz) {
  const int nh = static_cast<int>(map.field_g.size());
  const int nf = static_cast<int>(map.freq_mhz.size());
  if (nh == 0 || nf < 3 || map.power.rows() != nh || map.power.cols() != nf) {
    throw std::invalid_argument("power map must be a regular field x freq grid");
  }

  DipExtraction out;
  for (int r = 0; r < nh; ++r) {
    std::vector<double> column(map.power.row(r).begin(),
                               map.power.row(r).end());
    std::vector<double> sorted = column;
    std::nth_element(sorted.begin(), sorted.begin() + nf / 2, sorted.end());
    const double baseline = std::max(sorted[nf / 2], 1e-300);

    struct Candidate {
      int j;
      double power;
    };
    std::vector<Candidate> candidates;
    for (int j = 1; j + 1 < nf; ++j) {
      if (!(column[j] < column[j - 1]) || !(column[j] < column[j + 1])) continue;
      const double depth_db =
          10.0 * std::log10(std::max(column[j], 1e-300) / baseline);
      if (depth_db <= -prominence_db) candidates.push_back({j, column[j]});
    }
    if (candidates.empty()) {
      out.skipped_columns.push_back(r);
      continue;
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                return a.power < b.power;
              });
    if (candidates.size() > 2) candidates.resize(2);

    std::vector<DipPoint> points;
    for (const auto& c : candidates) {
      // sub-bin quadratic through the three samples around the minimum
      const double ym = column[c.j - 1], y0 = column[c.j], yp = column[c.j + 1];
      const double denom = ym - 2.0 * y0 + yp;
      const double offset = denom > 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
      const double df = map.freq_mhz(1) - map.freq_mhz(0);
      DipPoint point;
      point.field_g = map.field_g(r);
      point.freq_mhz = map.freq_mhz(c.j) + offset * df;
      points.push_back(point);
    }
    if (points.size() == 2) {
      const bool swapped = points[0].freq_mhz > points[1].freq_mhz;
      points[swapped ? 1 : 0].branch = Branch::lower;
      points[swapped ? 0 : 1].branch = Branch::upper;
    } else {
      points[0].branch =
          points[0].freq_mhz < branch_ref_mhz ? Branch::lower : Branch::upper;
    }
    for (auto& p : points) out.dips.push_back(p);
  }
  return out;
}

void validate(const FitProblem& prob) {
  validate(prob.base);
  if (prob.free.empty()) {
    throw std::invalid_argument("fit needs at least one free parameter");
  }
  if (prob.data.size() < 2 * prob.free.size()) {
    throw std::invalid_argument(
        "fit needs at least twice as many data points as free parameters");
  }
  for (FitParam p : prob.free) {
    const auto it_init = prob.init.find(p);
    const double guess =
        it_init != prob.init.end() ? it_init->second : get_param(prob.base, p);
    const auto it_b = prob.bounds.find(p);
    if (it_b != prob.bounds.end()) {
      if (guess < it_b->second.first || guess > it_b->second.second) {
        throw std::invalid_argument(std::string("initial guess for ") +
                                    fit_param_name(p) + " is outside its bounds");
      }
    }
  }
  for (const auto& d : prob.data) {
    if (!(d.freq_mhz > 0.0)) {
      throw std::invalid_argument("dip frequencies must be positive");
    }
  }
}

namespace {

struct PreparedData {
  Eigen::VectorXd fields;            // unique, ascending
  std::vector<int> field_index;      // per dip point
  std::vector<double> weights;       // per dip point, crossing upweight folded in
};

PreparedData prepare(const FitProblem& prob) {
  PreparedData prep;
  std::vector<double> unique_fields;
  for (const auto& d : prob.data) unique_fields.push_back(d.field_g);
  std::sort(unique_fields.begin(), unique_fields.end());
  unique_fields.erase(std::unique(unique_fields.begin(), unique_fields.end()),
                      unique_fields.end());
  prep.fields =
      Eigen::Map<Eigen::VectorXd>(unique_fields.data(), unique_fields.size());

  for (const auto& d : prob.data) {
    const auto it = std::lower_bound(unique_fields.begin(),
                                     unique_fields.end(), d.field_g);
    prep.field_index.push_back(
        static_cast<int>(std::distance(unique_fields.begin(), it)));
    double w = d.weight;
    if (prob.crossing_weight != 1.0 &&
        std::abs(std::abs(d.field_g) - std::abs(prob.crossing_center_g)) <=
            prob.crossing_window_g) {
      w *= prob.crossing_weight;
    }
    prep.weights.push_back(w);
  }
  return prep;
}

}  // namespace

CrystalFieldFitResult fit_crystal_field(const FitProblem& prob) {
  validate(prob);
  const PreparedData prep = prepare(prob);
  const int n_free = static_cast<int>(prob.free.size());

  auto to_config = [&](const Eigen::VectorXd& scaled) {
    DickeConfig cfg = prob.base;
    for (int j = 0; j < n_free; ++j) {
      set_param(cfg, prob.free[j], scaled(j) * fit_param_scale(prob.free[j]));
    }
    return cfg;
  };

  auto residual_vector = [&](const Eigen::VectorXd& scaled) {
    const DickeConfig cfg = to_config(scaled);
    const std::vector<LinePair> lines = predict_lines(cfg, prep.fields);
    Eigen::VectorXd r(prob.data.size());
    for (size_t k = 0; k < prob.data.size(); ++k) {
      const LinePair& line = lines[prep.field_index[k]];
      const double pred = prob.data[k].branch == Branch::lower
                              ? line.lower_mhz
                              : line.upper_mhz;
      r(k) = std::sqrt(prep.weights[k]) * (pred - prob.data[k].freq_mhz);
    }
    return r;
  };

  auto objective = [&](const Eigen::VectorXd& scaled) {
    return residual_vector(scaled).squaredNorm();
  };

  Eigen::VectorXd init(n_free), lower(n_free), upper(n_free);
  for (int j = 0; j < n_free; ++j) {
    const FitParam p = prob.free[j];
    const double scale = fit_param_scale(p);
    const auto it = prob.init.find(p);
    init(j) = (it != prob.init.end() ? it->second : get_param(prob.base, p)) /
              scale;
    const auto it_b = prob.bounds.find(p);
    lower(j) = it_b != prob.bounds.end()
                   ? it_b->second.first / scale
                   : -std::numeric_limits<double>::infinity();
    upper(j) = it_b != prob.bounds.end()
                   ? it_b->second.second / scale
                   : std::numeric_limits<double>::infinity();
  }

  SimplexOptions opts;
  opts.lower = lower;
  opts.upper = upper;
  opts.restarts = prob.restarts;
  opts.max_evals = prob.max_evals;
  opts.seed = prob.seed;
  const SimplexResult simplex = nelder_mead(objective, init, opts);

  CrystalFieldFitResult result;
  result.converged = simplex.converged;
  result.residual_norm = std::sqrt(simplex.value);
  result.residual_history = simplex.history;
  result.evaluations = simplex.evaluations;
  for (int j = 0; j < n_free; ++j) {
    result.values[prob.free[j]] =
        simplex.best(j) * fit_param_scale(prob.free[j]);
  }

  // Approximate 1-sigma from the finite-difference Gauss-Newton Hessian.
  const Eigen::VectorXd r0 = residual_vector(simplex.best);
  Eigen::MatrixXd jac(r0.size(), n_free);
  for (int j = 0; j < n_free; ++j) {
    Eigen::VectorXd probe = simplex.best;
    const double h = 1e-5 * std::max(std::abs(probe(j)), 1e-3);
    probe(j) += h;
    const Eigen::VectorXd rp = residual_vector(probe);
    probe(j) -= 2.0 * h;
    const Eigen::VectorXd rm = residual_vector(probe);
    jac.col(j) = (rp - rm) / (2.0 * h);
  }
  const int dof =
      std::max<int>(1, static_cast<int>(r0.size()) - n_free);
  const double variance = r0.squaredNorm() / dof;
  const Eigen::MatrixXd cov =
      (jac.transpose() * jac).completeOrthogonalDecomposition().pseudoInverse() *
      variance;
  for (int j = 0; j < n_free; ++j) {
    result.sigmas[prob.free[j]] =
        std::sqrt(std::max(cov(j, j), 0.0)) * fit_param_scale(prob.free[j]);
  }
  return result;
}

}  // namespace spincav
