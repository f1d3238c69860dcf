#include "cavboost/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cavboost {

double one_norm(const SpMatrix& a) {
  double best = 0.0;
  for (int k = 0; k < a.outerSize(); ++k) {
    double col = 0.0;
    for (SpMatrix::InnerIterator it(a, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

double one_norm(const CMatrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

double hermiticity_defect(const CMatrix& a) { return (a - a.adjoint()).cwiseAbs().maxCoeff(); }

namespace {

// Pade [m/m] numerator coefficients b_0..b_m.
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// Backward-error thresholds theta_m for m = 3, 5, 7, 9, 13.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
CMatrix pade_low(const CMatrix& a, const std::array<double, N>& b) {
  const auto n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix a2 = a * a;
  CMatrix u_inner = b[1] * id;
  CMatrix v = b[0] * id;
  CMatrix power = id;
  for (std::size_t k = 2; k < N; k += 2) {
    power = power * a2;
    u_inner += b[k + 1] * power;
    v += b[k] * power;
  }
  const CMatrix u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

CMatrix pade13(const CMatrix& a) {
  const auto n = a.rows();
  const auto& b = kPade13;
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;
  const CMatrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

CMatrix expm(const CMatrix& a) {
  const double norm = one_norm(a);
  if (norm <= kTheta3) return pade_low(a, kPade3);
  if (norm <= kTheta5) return pade_low(a, kPade5);
  if (norm <= kTheta7) return pade_low(a, kPade7);
  if (norm <= kTheta9) return pade_low(a, kPade9);
  int squarings = 0;
  if (norm > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  CMatrix r = pade13(a / std::ldexp(1.0, squarings));
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

CVector expm_action(const SpMatrix& a, const CVector& v, double tol) {
  const double norm = one_norm(a);
  const int substeps = std::max(1, static_cast<int>(std::ceil(norm)));
  const double scale = 1.0 / substeps;
  CVector result = v;
  CVector term(v.size());
  for (int s = 0; s < substeps; ++s) {
    term = result;
    const double ref = result.norm();
    for (int k = 1; k < 60; ++k) {
      term = (scale / k) * (a * term);
      result += term;
      // Two consecutive small terms guard against an accidental near-zero.
      if (term.norm() <= tol * ref && k > 2) {
        term = (scale / (k + 1)) * (a * term);
        result += term;
        break;
      }
    }
  }
  return result;
}

}  // namespace cavboost
