#pragma once

#include "cavboost/model.hpp"

namespace cavboost {

/// Dense matrix exponential by scaling and squaring with the [13/13] Pade
/// approximant (Higham 2005 coefficients and thresholds).
CMatrix expm(const CMatrix& a);

/// exp(A) v for sparse A without forming exp(A). Truncated Taylor series on
/// s substeps with ||A||_1 / s <= 1; each series is summed until the next
/// term falls below `tol` relative to the running vector norm.
CVector expm_action(const SpMatrix& a, const CVector& v, double tol = 1e-16);

double one_norm(const SpMatrix& a);
double one_norm(const CMatrix& a);

/// Largest |A_ij - conj(A_ji)|.
double hermiticity_defect(const CMatrix& a);

}  // namespace cavboost
