#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace spincav {

template <typename Scalar = double>
using ComplexMatrix =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using MatrixXcd = ComplexMatrix<double>;

/// g-tensor is axial: g_par along the crystal c-axis (z), g_perp in the a-b plane.
struct SpinParams {
  double spin = 3.5;
  double g_par = 1.991;
  double g_perp = 1.992;
};

/// Number of |S_z> levels, 2S+1. Throws if S is not a non-negative half-integer
/// with at least two levels.
inline int multiplicity(double spin) {
  const double two_s = 2.0 * spin;
  if (!(spin >= 0.0) || std::abs(two_s - std::round(two_s)) > 1e-9) {
    throw std::invalid_argument("spin quantum number must be a half-integer");
  }
  const int dim = static_cast<int>(std::lround(two_s)) + 1;
  if (dim < 2) {
    throw std::invalid_argument("spin multiplet needs 2S+1 >= 2");
  }
  return dim;
}

inline void validate(const SpinParams& sp) {
  multiplicity(sp.spin);
  if (!(sp.g_par > 0.0) || !(sp.g_perp > 0.0)) {
    throw std::invalid_argument("g-factors must be positive");
  }
}

/// Angular-momentum matrices in the |S_z> basis ordered m = S, S-1, ..., -S.
/// Dimensionless (hbar = 1). Sz is diagonal; S+ sits on the superdiagonal with
/// elements sqrt(S(S+1) - m(m+1)) connecting |m> -> |m+1>.
template <typename Scalar = double>
struct SpinOperators {
  ComplexMatrix<Scalar> sx, sy, sz, sp, sm;
};

template <typename Scalar = double>
SpinOperators<Scalar> spin_operators(Scalar spin) {
  const int dim = multiplicity(static_cast<double>(spin));
  const Scalar casimir = spin * (spin + Scalar(1));
  using Mat = ComplexMatrix<Scalar>;
  using C = std::complex<Scalar>;

  Mat sz = Mat::Zero(dim, dim);
  Mat sp = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const Scalar m = spin - Scalar(i);
    sz(i, i) = m;
    if (i > 0) {
      // row i-1 holds |m+1>
      sp(i - 1, i) = std::sqrt(casimir - m * (m + Scalar(1)));
    }
  }
  Mat sm = sp.adjoint();
  Mat sx = Scalar(0.5) * (sp + sm);
  Mat sy = C(Scalar(0), Scalar(-0.5)) * (sp - sm);
  return {std::move(sx), std::move(sy), std::move(sz), std::move(sp),
          std::move(sm)};
}

/// Extended Stevens operator O_k^q for the supported set
/// (2,0), (4,0), (4,4), (6,0), (6,4). Hermitian by construction.
template <typename Scalar = double>
ComplexMatrix<Scalar> stevens_operator(Scalar spin, int k, int q) {
  const auto ops = spin_operators<Scalar>(spin);
  using Mat = ComplexMatrix<Scalar>;
  const int dim = ops.sz.rows();
  const Mat id = Mat::Identity(dim, dim);
  const Scalar x = spin * (spin + Scalar(1));

  const Mat sz2 = ops.sz * ops.sz;
  if (k == 2 && q == 0) {
    return Scalar(3) * sz2 - x * id;
  }
  if (k == 4 && q == 0) {
    const Mat sz4 = sz2 * sz2;
    return Scalar(35) * sz4 - (Scalar(30) * x - Scalar(25)) * sz2 +
           (Scalar(3) * x * x - Scalar(6) * x) * id;
  }
  const Mat sp4 = ops.sp * ops.sp * ops.sp * ops.sp;
  const Mat ladder4 = sp4 + Mat(sp4.adjoint());
  if (k == 4 && q == 4) {
    return Scalar(0.5) * ladder4;
  }
  if (k == 6 && q == 0) {
    const Mat sz4 = sz2 * sz2;
    const Mat sz6 = sz4 * sz2;
    return Scalar(231) * sz6 - (Scalar(315) * x - Scalar(735)) * sz4 +
           (Scalar(105) * x * x - Scalar(525) * x + Scalar(294)) * sz2 -
           (Scalar(5) * x * x * x - Scalar(40) * x * x + Scalar(60) * x) * id;
  }
  if (k == 6 && q == 4) {
    const Mat poly = Scalar(11) * sz2 - (x + Scalar(38)) * id;
    return Scalar(0.25) * (poly * ladder4 + ladder4 * poly);
  }
  throw std::invalid_argument("unsupported Stevens operator (k,q)");
}

}  // namespace spincav
