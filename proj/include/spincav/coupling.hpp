#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace spincav {

/// Regular 3-D grid of rms vacuum-field vectors (Gauss), axes in micrometres.
struct FieldMap {
  Eigen::VectorXd x_um, y_um, z_um;         // node coordinates, ascending, uniform
  std::vector<Eigen::Vector3d> field_g;     // (ix fastest, then iy, then iz)
  double ref_power_dbm = 0.0;               // input power the map was computed at

  int nx() const { return static_cast<int>(x_um.size()); }
  int ny() const { return static_cast<int>(y_um.size()); }
  int nz() const { return static_cast<int>(z_um.size()); }
  const Eigen::Vector3d& at(int ix, int iy, int iz) const {
    return field_g[static_cast<size_t>((iz * ny() + iy) * nx() + ix)];
  }
  Eigen::Vector3d& at(int ix, int iy, int iz) {
    return field_g[static_cast<size_t>((iz * ny() + iy) * nx() + ix)];
  }
};

void validate(const FieldMap& map);

/// Half-photon input power 10 log10(hbar w_c k_c / 2 / 1 mW) with both rates
/// converted to angular units.
double vacuum_power_dbm(double omega_c_mhz, double kappa_c_mhz);

/// Intra-resonator photon number P_in / (h nu_c kappa_c) with ordinary
/// frequencies. The unit convention deliberately differs from
/// vacuum_power_dbm; both reproduce their quoted reference values.
double photon_number(double pin_dbm, double omega_c_mhz, double kappa_c_mhz);

struct CouplingEstimate {
  double gc_mhz = 0.0;
  double g0_hz = 0.0;
  double n_spins = 0.0;
  double vm_um3 = 0.0;  // volume actually covered by the counted cells
};

struct CouplingSpec {
  double matrix_element = 0.715;   // |<f|S_x|i>| entering the ensemble integral
  double rho_per_um3 = 0.0;        // spin density before corrections
  double abundance = 1.0;          // I = 0 isotope fraction
  double selectivity = 1.0;        // min(kappa_c/gamma_s, 1)
  bool all_axes = false;           // sum |M_axis dH_axis|^2 instead of x only
  double matrix_element_y = 0.0;   // used only when all_axes is set
  double matrix_element_z = 0.0;
  Eigen::Vector3d center{0.0, 0.0, 0.0};  // integration-region center, um
};

/// Midpoint-rule integration of |dH1x|^2 over the cells of an axis-aligned
/// cube of volume vm_um3 centered on spec.center:
///   g_c = gamma_e |M| sqrt(rho_eff * integral),  N_s = rho_eff * V_counted,
///   g_0 = g_c / sqrt(N_s),  rho_eff = rho * abundance * selectivity.
/// Throws if the requested cube extends beyond the map bounds.
CouplingEstimate ensemble_coupling(const FieldMap& map, double vm_um3,
                                   const CouplingSpec& spec);

struct GridSpec {
  int nx = 0, ny = 0, nz = 0;
  double x0_um = 0.0, y0_um = 0.0, z0_um = 0.0;  // first node
  double dx_um = 0.0, dy_um = 0.0, dz_um = 0.0;
};

/// Biot-Savart field of a circular current loop in the z = 0 plane centered on
/// the origin, evaluated on the grid. Analytic substitute for a finite-element
/// field export.
FieldMap loop_field_map(double radius_um, double current_a, const GridSpec& grid);

/// Closed-form on-axis field of the same loop, Gauss (oracle for the z-axis).
double loop_field_on_axis_g(double radius_um, double current_a, double z_um);

/// CSV I/O. Header: `# x_um,y_um,z_um,Hx_G,Hy_G,Hz_G,Pref_dBm=<val>`, one row
/// per node. The reader also accepts finite-element exports with `%` comment
/// lines and bare (x,y,z,Hx,Hy,Hz) rows; grid regularity is validated on load.
FieldMap load_field_map_csv(const std::string& path);
void save_field_map_csv(const FieldMap& map, const std::string& path);

}  // namespace spincav
