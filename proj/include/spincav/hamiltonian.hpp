#pragma once

#include "spincav/constants.hpp"
#include "spincav/spin.hpp"

#include <stdexcept>

namespace spincav {

/// Stevens coefficients B_k^q in MHz. Signs unrestricted.
struct CrystalFieldParams {
  double b20 = 0.0;
  double b40 = 0.0;
  double b44 = 0.0;
  double b60 = 0.0;
  double b64 = 0.0;
};

/// Static field of magnitude H0 (Gauss, signed) applied at polar angle theta
/// from the crystal c-axis, azimuth phi in the a-b plane.
struct ZeemanConfig {
  double h0 = 0.0;
  double theta_deg = 0.0;
  double phi_deg = 0.0;
};

inline void validate(const CrystalFieldParams& cf) {
  for (double b : {cf.b20, cf.b40, cf.b44, cf.b60, cf.b64}) {
    if (!std::isfinite(b)) {
      throw std::invalid_argument("crystal-field coefficients must be finite");
    }
  }
}

inline void validate(const ZeemanConfig& z) {
  if (!std::isfinite(z.h0)) {
    throw std::invalid_argument("field magnitude must be finite");
  }
  if (z.theta_deg < 0.0 || z.theta_deg > 180.0) {
    throw std::invalid_argument("theta must lie in [0, 180] degrees");
  }
  if (z.phi_deg < 0.0 || z.phi_deg >= 360.0) {
    throw std::invalid_argument("phi must lie in [0, 360) degrees");
  }
}

/// Bare spin Hamiltonian in MHz: axial Zeeman term plus the five crystal-field
/// Stevens terms. Basis: |S_z> descending, z along the c-axis.
inline MatrixXcd spin_hamiltonian(const SpinParams& sp,
                                  const CrystalFieldParams& cf,
                                  const ZeemanConfig& z) {
  validate(sp);
  validate(cf);
  validate(z);

  const auto ops = spin_operators<double>(sp.spin);
  const double theta = z.theta_deg * kPi / 180.0;
  const double phi = z.phi_deg * kPi / 180.0;
  const double hx = z.h0 * std::sin(theta) * std::cos(phi);
  const double hy = z.h0 * std::sin(theta) * std::sin(phi);
  const double hz = z.h0 * std::cos(theta);

  MatrixXcd h = kBohrMagnetonMHzPerG *
                (sp.g_perp * (hx * ops.sx + hy * ops.sy) +
                 sp.g_par * hz * ops.sz);
  h += cf.b20 * stevens_operator<double>(sp.spin, 2, 0);
  h += cf.b40 * stevens_operator<double>(sp.spin, 4, 0);
  h += cf.b44 * stevens_operator<double>(sp.spin, 4, 4);
  h += cf.b60 * stevens_operator<double>(sp.spin, 6, 0);
  h += cf.b64 * stevens_operator<double>(sp.spin, 6, 4);
  return h;
}

}  // namespace spincav
