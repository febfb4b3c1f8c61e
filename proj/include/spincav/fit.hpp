#pragma once

#include "spincav/dicke.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spincav {

enum class Branch { lower, upper };

struct DipPoint {
  double field_g = 0.0;
  double freq_mhz = 0.0;
  Branch branch = Branch::lower;
  double weight = 1.0;
};

using DipData = std::vector<DipPoint>;

/// The eight model parameters the resonance-line fit can free.
enum class FitParam { b20, b40, b44, b60, b64, omega_c, theta, gc };

inline constexpr std::array<FitParam, 8> kAllFitParams = {
    FitParam::b20, FitParam::b40, FitParam::b44,  FitParam::b60,
    FitParam::b64, FitParam::omega_c, FitParam::theta, FitParam::gc};

const char* fit_param_name(FitParam p);
std::optional<FitParam> fit_param_from_name(const std::string& name);

/// Decade scale used to normalize simplex coordinates, 10^round(log10|ref|).
double fit_param_scale(FitParam p);

double get_param(const DickeConfig& cfg, FitParam p);
void set_param(DickeConfig& cfg, FitParam p, double value);

/// Lower/upper branch frequencies (E4 - E2, E5 - E2 with energy-ordered labels
/// at a single point; overlap-tracked along a grid).
struct LinePair {
  double lower_mhz = 0.0;
  double upper_mhz = 0.0;
};

LinePair predict_lines(const DickeConfig& cfg, double field_g);
std::vector<LinePair> predict_lines(const DickeConfig& cfg,
                                    const Eigen::VectorXd& fields);

/// Per-column dip extraction from a reflection-style power map. A local
/// minimum qualifies when it sits at least prominence_db below the column
/// median; up to two per column, sub-bin refined by a quadratic through the
/// three samples around the minimum. With two dips the branch is assigned by
/// frequency ordering, with one by its position relative to branch_ref_mhz.
struct DipExtraction {
  DipData dips;
  std::vector<int> skipped_columns;  // field-grid indices with no dip
};

DipExtraction extract_dips(const PowerMap& map, double prominence_db,
                           double branch_ref_mhz);

struct FitProblem {
  DickeConfig base;                 // carries every fixed value
  DipData data;
  std::vector<FitParam> free;
  std::map<FitParam, std::pair<double, double>> bounds;
  std::map<FitParam, double> init;
  // points within crossing_window_g of the minimum-splitting field can be
  // up-weighted; the splitting region carries the coupling information
  double crossing_weight = 1.0;
  double crossing_window_g = 10.0;
  double crossing_center_g = 0.0;
  int restarts = 3;
  int max_evals = 40000;
  std::uint64_t seed = 1;
};

void validate(const FitProblem& prob);

struct CrystalFieldFitResult {
  std::map<FitParam, double> values;
  std::map<FitParam, double> sigmas;  // finite-difference Gauss-Newton, approximate
  std::vector<double> residual_history;
  bool converged = false;
  double residual_norm = 0.0;
  long evaluations = 0;
};

/// Bounded simplex minimization of the weighted squared frequency misfit.
/// Deterministic for a given seed and initial guess.
CrystalFieldFitResult fit_crystal_field(const FitProblem& prob);

}  // namespace spincav
