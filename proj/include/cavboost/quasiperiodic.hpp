#pragma once

// Continued fractions of a frequency ratio and the almost periods of the
// two-tone torus flow (Omega t + theta01, omega' t + theta02).

#include <string>
#include <vector>

#include "cavboost/semiclassics.hpp"

namespace cavboost {

struct Fraction {
  long long h = 0;
  long long k = 1;

  double value() const { return static_cast<double>(h) / static_cast<double>(k); }
};

struct Semiconvergent {
  long long h = 0;
  long long k = 1;
  int N = 0;  // built from convergents N and N - 1
  long long m = 0;  // 0 < m < a_{N+1}
};

struct CFExpansion {
  double beta = 0.0;
  std::vector<long long> coeffs;        // [a0; a1, a2, ...]
  std::vector<Fraction> convergents;    // h_N / k_N, N = 0, 1, ...
  std::vector<Semiconvergent> semiconvergents;
  bool exact = false;  // the expansion terminated on a zero remainder
};

/// Standard expansion of beta > 0. Stops after max_terms coefficients or
/// once the fractional remainder falls below tol (its reciprocal would exceed
/// 1 / tol). Near-integer remainders within tol are snapped, so rational inputs
/// terminate exactly.
CFExpansion continued_fraction(double beta, int max_terms = 20, double tol = 1e-9);

enum class PeriodKind { Convergent, Semiconvergent, Multiple };
std::string to_string(PeriodKind kind);

struct AlmostPeriod {
  double T = 0.0;     // (2 pi / Omega) h
  long long h = 0;    // drive cycles
  long long k = 0;    // cavity cycles
  PeriodKind kind = PeriodKind::Convergent;
};

/// Convergent and semiconvergent almost periods of Omega / omega_eff with
/// h <= h_max, sorted by T. For a terminating expansion, integer multiples
/// of the exact period are appended as PeriodKind::Multiple.
std::vector<AlmostPeriod> almost_periods(double Omega, double omega_eff, long long h_max);

/// Brute force over 0 < q <= k_N and all p: |k_N beta - h_N| < |q beta - p|
/// for every (p, q) other than (h_N, k_N).
bool best_approx_check(const CFExpansion& cf, int N);
/// The same test for an arbitrary candidate fraction.
bool best_approx_check(double beta, const Fraction& candidate);

/// Brute force over 0 < q <= k: |beta - h/k| < |beta - p/q| for every p/q
/// not equal to h/k.
bool best_semi_check(double beta, const Fraction& candidate);

/// Euclidean distance between two torus points using the nearest image of
/// each component.
double torus_distance(const TorusPoint& a, const TorusPoint& b);

/// Distance between theta_t and theta_0 for the linear flow.
double torus_return_distance(double t, double Omega, double omega_eff, const TorusPoint& theta0);

/// Max over members of the return distance, members given by their start points.
double ensemble_return_distance(double t, double Omega, double omega_eff,
                                const std::vector<TorusPoint>& starts);

}  // namespace cavboost
