#include "cavboost/quasiperiodic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cavboost/errors.hpp"

namespace cavboost {

CFExpansion continued_fraction(double beta, int max_terms, double tol) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("continued fraction needs beta > 0");
  if (max_terms < 1) throw ConfigError("max_terms must be at least 1");
  CFExpansion cf;
  cf.beta = beta;
  double x = beta;
  for (int i = 0; i < max_terms; ++i) {
    double a = std::floor(x);
    double frac = x - a;
    if (1.0 - frac < tol * std::max(1.0, x)) {
      a += 1.0;
      frac = 0.0;
    }
    cf.coeffs.push_back(static_cast<long long>(a));
    if (frac < tol) {
      cf.exact = true;
      break;
    }
    x = 1.0 / frac;
  }

  long long h2 = 0, h1 = 1, k2 = 1, k1 = 0;
  for (long long a : cf.coeffs) {
    const long long h = a * h1 + h2;
    const long long k = a * k1 + k2;
    cf.convergents.push_back({h, k});
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
  }
  for (std::size_t N = 1; N < cf.convergents.size(); ++N) {
    const Fraction& cur = cf.convergents[N - 1];
    const Fraction prev = N >= 2 ? cf.convergents[N - 2] : Fraction{1, 0};
    for (long long m = 1; m < cf.coeffs[N]; ++m) {
      cf.semiconvergents.push_back(
          {m * cur.h + prev.h, m * cur.k + prev.k, static_cast<int>(N - 1), m});
    }
  }
  return cf;
}

std::string to_string(PeriodKind kind) {
  switch (kind) {
    case PeriodKind::Convergent: return "convergent";
    case PeriodKind::Semiconvergent: return "semiconvergent";
    case PeriodKind::Multiple: return "multiple";
  }
  return "?";
}

std::vector<AlmostPeriod> almost_periods(double Omega, double omega_eff, long long h_max) {
  if (!(Omega > 0.0) || !(omega_eff > 0.0)) throw ConfigError("frequencies must be positive");
  const CFExpansion cf = continued_fraction(Omega / omega_eff);
  const double period = kTwoPi / Omega;
  std::vector<AlmostPeriod> out;
  auto add = [&](long long h, long long k, PeriodKind kind) {
    if (h < 1 || h > h_max) return;
    for (const auto& e : out) {
      if (e.h == h) return;
    }
    out.push_back({period * static_cast<double>(h), h, k, kind});
  };
  for (const auto& c : cf.convergents) add(c.h, c.k, PeriodKind::Convergent);
  for (const auto& s : cf.semiconvergents) add(s.h, s.k, PeriodKind::Semiconvergent);
  if (cf.exact && !cf.convergents.empty()) {
    const Fraction base = cf.convergents.back();
    for (long long j = 2; base.h * j <= h_max; ++j) add(base.h * j, base.k * j, PeriodKind::Multiple);
  }
  std::sort(out.begin(), out.end(), [](const AlmostPeriod& a, const AlmostPeriod& b) {
    return a.h < b.h;
  });
  return out;
}

bool best_approx_check(double beta, const Fraction& c) {
  const double target = std::abs(static_cast<double>(c.k) * beta - static_cast<double>(c.h));
  for (long long q = 1; q <= c.k; ++q) {
    const double qb = static_cast<double>(q) * beta;
    const long long centre = std::llround(qb);
    for (long long p = centre - 1; p <= centre + 1; ++p) {
      if (p == c.h && q == c.k) continue;
      if (!(target < std::abs(qb - static_cast<double>(p)))) return false;
    }
  }
  return true;
}

bool best_approx_check(const CFExpansion& cf, int N) {
  if (N < 0 || N >= static_cast<int>(cf.convergents.size()))
    throw ConfigError("convergent index out of range");
  return best_approx_check(cf.beta, cf.convergents[N]);
}

bool best_semi_check(double beta, const Fraction& c) {
  const double target = std::abs(beta - c.value());
  for (long long q = 1; q <= c.k; ++q) {
    const long long centre = std::llround(static_cast<double>(q) * beta);
    for (long long p = centre - 1; p <= centre + 1; ++p) {
      // Same rational number in unreduced form.
      if (p * c.k == c.h * q) continue;
      const double other = std::abs(beta - static_cast<double>(p) / static_cast<double>(q));
      if (!(target < other)) return false;
    }
  }
  return true;
}

double torus_distance(const TorusPoint& a, const TorusPoint& b) {
  const double d1 = std::remainder(a.theta1 - b.theta1, kTwoPi);
  const double d2 = std::remainder(a.theta2 - b.theta2, kTwoPi);
  return std::hypot(d1, d2);
}

double torus_return_distance(double t, double Omega, double omega_eff, const TorusPoint& theta0) {
  const TorusPoint now{theta0.theta1 + Omega * t, theta0.theta2 + omega_eff * t};
  return torus_distance(now, theta0);
}

double ensemble_return_distance(double t, double Omega, double omega_eff,
                                const std::vector<TorusPoint>& starts) {
  double worst = 0.0;
  for (const auto& s : starts) worst = std::max(worst, torus_return_distance(t, Omega, omega_eff, s));
  return worst;
}

}  // namespace cavboost
