#include "spincav/coupling.hpp"

#include "spincav/constants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace spincav {

namespace {

constexpr double kMu0 = 4.0e-7 * kPi;  // T m / A

double axis_spacing(const Eigen::VectorXd& axis, const char* name) {
  if (axis.size() < 1) {
    throw std::invalid_argument(std::string("field map axis ") + name +
                                " is empty");
  }
  if (axis.size() == 1) return 1.0;  // degenerate axis, unit cell extent
  const double d = axis(1) - axis(0);
  if (!(d > 0.0)) {
    throw std::invalid_argument(std::string("field map axis ") + name +
                                " must be ascending");
  }
  for (int i = 1; i + 1 < axis.size(); ++i) {
    if (std::abs((axis(i + 1) - axis(i)) - d) > 1e-6 * std::max(d, 1.0)) {
      throw std::invalid_argument(std::string("field map axis ") + name +
                                  " is not uniformly spaced");
    }
  }
  return d;
}

// deterministic pairwise reduction
double pairwise_sum(const std::vector<double>& values, size_t lo, size_t hi) {
  const size_t n = hi - lo;
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (size_t i = lo; i < hi; ++i) s += values[i];
    return s;
  }
  const size_t mid = lo + n / 2;
  return pairwise_sum(values, lo, mid) + pairwise_sum(values, mid, hi);
}

}  // namespace

void validate(const FieldMap& map) {
  axis_spacing(map.x_um, "x");
  axis_spacing(map.y_um, "y");
  axis_spacing(map.z_um, "z");
  const size_t expected = static_cast<size_t>(map.nx()) * map.ny() * map.nz();
  if (map.field_g.size() != expected) {
    throw std::invalid_argument("field map node count does not match the grid");
  }
  for (const auto& v : map.field_g) {
    if (!v.allFinite()) {
      throw std::invalid_argument("field map contains non-finite values");
    }
  }
}

double vacuum_power_dbm(double omega_c_mhz, double kappa_c_mhz) {
  if (!(omega_c_mhz > 0.0) || !(kappa_c_mhz > 0.0)) {
    throw std::invalid_argument("frequencies must be positive");
  }
  const double omega_rad = kTwoPi * omega_c_mhz * 1e6;
  const double kappa_rad = kTwoPi * kappa_c_mhz * 1e6;
  const double watts = kHbarJs * omega_rad * kappa_rad / 2.0;
  return 10.0 * std::log10(watts / 1e-3);
}

double photon_number(double pin_dbm, double omega_c_mhz, double kappa_c_mhz) {
  if (!(omega_c_mhz > 0.0) || !(kappa_c_mhz > 0.0)) {
    throw std::invalid_argument("frequencies must be positive");
  }
  if (pin_dbm == -std::numeric_limits<double>::infinity()) return 0.0;
  const double watts = 1e-3 * std::pow(10.0, pin_dbm / 10.0);
  return watts / (kPlanckJs * omega_c_mhz * 1e6 * kappa_c_mhz * 1e6);
}

CouplingEstimate ensemble_coupling(const FieldMap& map, double vm_um3,
                                   const CouplingSpec& spec) {
  validate(map);
  if (!(vm_um3 > 0.0)) {
    throw std::invalid_argument("mode volume must be positive");
  }
  if (!(spec.rho_per_um3 > 0.0)) {
    throw std::invalid_argument("spin density must be positive");
  }
  const double dx = axis_spacing(map.x_um, "x");
  const double dy = axis_spacing(map.y_um, "y");
  const double dz = axis_spacing(map.z_um, "z");
  const double cell = dx * dy * dz;
  const double side = std::cbrt(vm_um3);

  const auto check_axis = [&](const Eigen::VectorXd& axis, double spacing,
                              double center) {
    const double lo = axis(0) - 0.5 * spacing;
    const double hi = axis(axis.size() - 1) + 0.5 * spacing;
    if (center - 0.5 * side < lo - 1e-9 || center + 0.5 * side > hi + 1e-9) {
      throw std::invalid_argument("integration region exceeds the map bounds");
    }
  };
  check_axis(map.x_um, dx, spec.center.x());
  check_axis(map.y_um, dy, spec.center.y());
  check_axis(map.z_um, dz, spec.center.z());

  const auto inside = [&](double coord, double center) {
    return std::abs(coord - center) <= 0.5 * side;
  };

  std::vector<double> contributions;
  long n_cells = 0;
  for (int iz = 0; iz < map.nz(); ++iz) {
    if (!inside(map.z_um(iz), spec.center.z())) continue;
    for (int iy = 0; iy < map.ny(); ++iy) {
      if (!inside(map.y_um(iy), spec.center.y())) continue;
      for (int ix = 0; ix < map.nx(); ++ix) {
        if (!inside(map.x_um(ix), spec.center.x())) continue;
        const Eigen::Vector3d& h = map.at(ix, iy, iz);
        double value = spec.matrix_element * spec.matrix_element * h.x() * h.x();
        if (spec.all_axes) {
          value += spec.matrix_element_y * spec.matrix_element_y * h.y() * h.y();
          value += spec.matrix_element_z * spec.matrix_element_z * h.z() * h.z();
        }
        contributions.push_back(value * cell);
        ++n_cells;
      }
    }
  }
  if (n_cells == 0) {
    throw std::invalid_argument("integration region contains no grid cell");
  }

  const double integral = pairwise_sum(contributions, 0, contributions.size());
  const double rho_eff =
      spec.rho_per_um3 * spec.abundance * spec.selectivity;

  CouplingEstimate estimate;
  estimate.vm_um3 = n_cells * cell;
  estimate.n_spins = rho_eff * estimate.vm_um3;
  estimate.gc_mhz = kGammaElectronMHzPerG * std::sqrt(rho_eff * integral);
  estimate.g0_hz = estimate.gc_mhz * 1e6 / std::sqrt(estimate.n_spins);
  return estimate;
}

double loop_field_on_axis_g(double radius_um, double current_a, double z_um) {
  const double r_m = radius_um * 1e-6;
  const double z_m = z_um * 1e-6;
  const double b_tesla =
      kMu0 * current_a * r_m * r_m /
      (2.0 * std::pow(r_m * r_m + z_m * z_m, 1.5));
  return b_tesla * kGaussPerTesla;
}

FieldMap loop_field_map(double radius_um, double current_a, const GridSpec& grid) {
  if (!(radius_um > 0.0)) {
    throw std::invalid_argument("loop radius must be positive");
  }
  if (grid.nx < 1 || grid.ny < 1 || grid.nz < 1 ||
      !(grid.dx_um > 0.0) || !(grid.dy_um > 0.0) || !(grid.dz_um > 0.0)) {
    throw std::invalid_argument("grid must have positive counts and spacing");
  }

  FieldMap map;
  map.x_um.setLinSpaced(grid.nx, grid.x0_um,
                        grid.x0_um + grid.dx_um * (grid.nx - 1));
  map.y_um.setLinSpaced(grid.ny, grid.y0_um,
                        grid.y0_um + grid.dy_um * (grid.ny - 1));
  map.z_um.setLinSpaced(grid.nz, grid.z0_um,
                        grid.z0_um + grid.dz_um * (grid.nz - 1));
  if (grid.nx == 1) map.x_um(0) = grid.x0_um;
  if (grid.ny == 1) map.y_um(0) = grid.y0_um;
  if (grid.nz == 1) map.z_um(0) = grid.z0_um;
  map.field_g.assign(static_cast<size_t>(grid.nx) * grid.ny * grid.nz,
                     Eigen::Vector3d::Zero());
  map.ref_power_dbm = 0.0;

  constexpr int kSegments = 256;
  const double core2 = std::pow(1e-3 * radius_um, 2);  // wire-core smoothing
  std::vector<Eigen::Vector3d> wire(kSegments), tangent(kSegments);
  for (int s = 0; s < kSegments; ++s) {
    const double phi = kTwoPi * (s + 0.5) / kSegments;
    wire[s] = {radius_um * std::cos(phi), radius_um * std::sin(phi), 0.0};
    tangent[s] = {-std::sin(phi), std::cos(phi), 0.0};
  }
  const double dl = kTwoPi * radius_um / kSegments;

  for (int iz = 0; iz < grid.nz; ++iz) {
    for (int iy = 0; iy < grid.ny; ++iy) {
      for (int ix = 0; ix < grid.nx; ++ix) {
        const Eigen::Vector3d point(map.x_um(ix), map.y_um(iy), map.z_um(iz));
        Eigen::Vector3d acc = Eigen::Vector3d::Zero();
        for (int s = 0; s < kSegments; ++s) {
          const Eigen::Vector3d d = point - wire[s];
          const double r2 = d.squaredNorm() + core2;
          acc += tangent[s].cross(d) / (r2 * std::sqrt(r2));
        }
        // mu0 I / (4 pi) * integral, with micrometre lengths folded in
        map.at(ix, iy, iz) =
            1e3 * current_a * (kMu0 / (4.0 * kPi) * 1e7) * acc * dl;
      }
    }
  }
  return map;
}

void save_field_map_csv(const FieldMap& map, const std::string& path) {
  validate(map);
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  char line[256];
  std::snprintf(line, sizeof(line),
                "# x_um,y_um,z_um,Hx_G,Hy_G,Hz_G,Pref_dBm=%.9g\n",
                map.ref_power_dbm);
  out << line;
  for (int iz = 0; iz < map.nz(); ++iz) {
    for (int iy = 0; iy < map.ny(); ++iy) {
      for (int ix = 0; ix < map.nx(); ++ix) {
        const Eigen::Vector3d& h = map.at(ix, iy, iz);
        std::snprintf(line, sizeof(line),
                      "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", map.x_um(ix),
                      map.y_um(iy), map.z_um(iz), h.x(), h.y(), h.z());
        out << line;
      }
    }
  }
}

FieldMap load_field_map_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open field map " + path);
  }

  struct Row {
    double x, y, z, hx, hy, hz;
  };
  std::vector<Row> rows;
  double ref_power = 0.0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#' || line[0] == '%') {
      const auto pos = line.find("Pref_dBm=");
      if (pos != std::string::npos) {
        ref_power = std::strtod(line.c_str() + pos + 9, nullptr);
      }
      continue;
    }
    Row row;
    std::string cell;
    std::istringstream ss(line);
    double* slots[6] = {&row.x, &row.y, &row.z, &row.hx, &row.hy, &row.hz};
    int filled = 0;
    while (std::getline(ss, cell, ',') && filled < 6) {
      try {
        *slots[filled] = std::stod(cell);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": malformed number '" + cell + "'");
      }
      ++filled;
    }
    if (filled != 6) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 6 comma-separated values");
    }
    rows.push_back(row);
  }
  if (rows.empty()) {
    throw std::runtime_error(path + ": no field data rows");
  }

  auto collect_axis = [&](auto accessor) {
    std::vector<double> values;
    for (const auto& r : rows) values.push_back(accessor(r));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end(),
                             [](double a, double b) {
                               return std::abs(a - b) < 1e-9;
                             }),
                 values.end());
    return values;
  };
  const auto xs = collect_axis([](const Row& r) { return r.x; });
  const auto ys = collect_axis([](const Row& r) { return r.y; });
  const auto zs = collect_axis([](const Row& r) { return r.z; });

  FieldMap map;
  map.ref_power_dbm = ref_power;
  map.x_um = Eigen::Map<const Eigen::VectorXd>(xs.data(), xs.size());
  map.y_um = Eigen::Map<const Eigen::VectorXd>(ys.data(), ys.size());
  map.z_um = Eigen::Map<const Eigen::VectorXd>(zs.data(), zs.size());
  if (rows.size() != xs.size() * ys.size() * zs.size()) {
    throw std::runtime_error(path + ": rows do not form a full regular grid");
  }
  map.field_g.assign(rows.size(), Eigen::Vector3d::Zero());

  auto index_of = [](const std::vector<double>& axis, double v) {
    const auto it = std::lower_bound(axis.begin(), axis.end(), v - 1e-9);
    return static_cast<int>(std::distance(axis.begin(), it));
  };
  for (const auto& r : rows) {
    map.at(index_of(xs, r.x), index_of(ys, r.y), index_of(zs, r.z)) =
        Eigen::Vector3d(r.hx, r.hy, r.hz);
  }
  validate(map);
  return map;
}

}  // namespace spincav
