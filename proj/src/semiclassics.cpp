#include "cavboost/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cavboost/errors.hpp"
#include "cavboost/parallel.hpp"

namespace cavboost {

namespace {

constexpr double kSingularField = 1e-9;
constexpr double kChernResidual = 1e-4;

double checked_norm(const FieldVector& b, double theta1, double theta2, double n) {
  const double norm = b.norm();
  if (norm < kSingularField) {
    std::ostringstream os;
    os << "|B_eff| = " << norm << " at theta1 = " << theta1 << ", theta2 = " << theta2
       << ", n = " << n;
    throw SingularFieldError(os.str());
  }
  return norm;
}

double panel_length(double Omega, double omega_eff) {
  return std::min(kTwoPi / Omega, kTwoPi / std::abs(omega_eff)) / 64.0;
}

}  // namespace

double wrap_angle(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

TorusPoint TorusPoint::wrapped(double theta1, double theta2) {
  return {wrap_angle(theta1), wrap_angle(theta2)};
}

FieldVector b_eff(double theta1, double theta2, double n, const ModelParams& p) {
  const double r = p.b_0 * std::sqrt(std::max(n, 0.0));
  return {p.b_m - p.b_d * std::sin(theta1) - r * std::cos(theta2), -r * std::sin(theta2),
          p.b_d * std::cos(theta1)};
}

FieldJacobian b_eff_jacobian(double theta1, double theta2, double n, const ModelParams& p) {
  const double root = std::sqrt(std::max(n, 0.0));
  const double r = p.b_0 * root;
  FieldJacobian j;
  j.d_theta1 = {-p.b_d * std::cos(theta1), 0.0, -p.b_d * std::sin(theta1)};
  j.d_theta2 = {r * std::sin(theta2), -r * std::cos(theta2), 0.0};
  if (root > 0.0) {
    const double g = p.b_0 / (2.0 * root);
    j.d_n = {-g * std::cos(theta2), -g * std::sin(theta2), 0.0};
  }
  return j;
}

FieldVector unit_derivative(const FieldVector& b, const FieldVector& db) {
  const double norm = b.norm();
  return db / norm - b * (b.dot(db) / (norm * norm * norm));
}

double berry_curvature(double theta1, double theta2, double n, const ModelParams& p, double spin) {
  const FieldVector b = b_eff(theta1, theta2, n, p);
  const double norm = checked_norm(b, theta1, theta2, n);
  const FieldJacobian j = b_eff_jacobian(theta1, theta2, n, p);
  return spin * b.dot(j.d_theta1.cross(j.d_theta2)) / (norm * norm * norm);
}

double torus_average(const std::function<double(double, double)>& f, int grid) {
  if (grid < 1) throw ConfigError("torus grid must be positive");
  const double h = kTwoPi / grid;
  double sum = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double t1 = i * h;
    double row = 0.0;
    for (int k = 0; k < grid; ++k) row += f(t1, k * h);
    sum += row;
  }
  return sum / (static_cast<double>(grid) * grid);
}

ChernResult chern_number(const ModelParams& p, double n, double spin, int grid) {
  const double avg = torus_average(
      [&](double t1, double t2) { return berry_curvature(t1, t2, n, p, spin); }, grid);
  ChernResult r;
  r.integral = kTwoPi * avg;
  r.chern = static_cast<int>(std::lround(r.integral));
  r.residual = std::abs(r.integral - r.chern);
  if (r.residual > kChernResidual) {
    std::ostringstream os;
    os << "Chern integral " << r.integral << " is " << r.residual
       << " away from an integer at n = " << n << "; the gap nearly closes";
    throw DegeneracyError(os.str());
  }
  return r;
}

double ndot_adiabatic(double theta1, double theta2, double n, const ModelParams& p, double spin) {
  const FieldVector b = b_eff(theta1, theta2, n, p);
  const double norm = checked_norm(b, theta1, theta2, n);
  const FieldJacobian j = b_eff_jacobian(theta1, theta2, n, p);
  const double d_norm = b.dot(j.d_theta2) / norm;
  const double curvature = spin * b.dot(j.d_theta1.cross(j.d_theta2)) / (norm * norm * norm);
  return spin * d_norm + p.Omega * curvature;
}

double ndot_torus_average(const ModelParams& p, double n, double spin, int grid) {
  return torus_average([&](double t1, double t2) { return ndot_adiabatic(t1, t2, n, p, spin); },
                       grid);
}

double delta_omega0(double theta1, double theta2, double n, const ModelParams& p, double spin) {
  const FieldVector b = b_eff(theta1, theta2, n, p);
  const double norm = checked_norm(b, theta1, theta2, n);
  const FieldJacobian j = b_eff_jacobian(theta1, theta2, n, p);
  return -spin * b.dot(j.d_n) / norm;
}

double delta_omega0_avg(double n, const ModelParams& p, double spin, int grid) {
  return torus_average([&](double t1, double t2) { return delta_omega0(t1, t2, n, p, spin); },
                       grid);
}

double effective_cavity_frequency(const ModelParams& p, double n0, double spin, bool corrected) {
  if (!corrected || p.b_0 == 0.0) return p.omega;
  return p.omega + delta_omega0_avg(n0, p, spin);
}

double quasiperiodic_integral(const std::function<double(double, double)>& f, double t_end,
                              const TorusPoint& theta0, double Omega, double omega_eff) {
  if (t_end < 0.0) throw ConfigError("integration end time must be non-negative");
  if (t_end == 0.0) return 0.0;
  const double h = panel_length(Omega, omega_eff);
  const long panels = std::max(1L, static_cast<long>(std::ceil(t_end / h - 1e-9)));
  const double width = t_end / static_cast<double>(panels);
  auto g = [&](double s) {
    return f(Omega * s + theta0.theta1, omega_eff * s + theta0.theta2);
  };
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  double total = 0.0;
  for (long k = 0; k < panels; ++k) {
    total += Rule::integrate(g, k * width, (k + 1) * width, 8, 1e-13);
  }
  return total;
}

double delta_n_fixed(double t_end, const TorusPoint& theta0, double n0, const ModelParams& p,
                     double omega_eff, double spin) {
  return quasiperiodic_integral(
      [&](double t1, double t2) { return ndot_adiabatic(t1, t2, n0, p, spin); }, t_end, theta0,
      p.Omega, omega_eff);
}

double phase_integral(double t_end, const TorusPoint& theta0, double n0, const ModelParams& p,
                      double spin, double omega_eff) {
  return quasiperiodic_integral(
      [&](double t1, double t2) {
        return p.omega * n0 - spin * b_eff(t1, t2, n0, p).norm();
      },
      t_end, theta0, p.Omega, omega_eff);
}

namespace {

void check_times(const std::vector<double>& times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0) throw ConfigError("trajectory times must be non-negative");
    if (i > 0 && times[i] < times[i - 1]) throw ConfigError("trajectory times must be sorted");
  }
}

TorusPoint angles_at(double t, const TorusPoint& theta0, double Omega, double omega_eff) {
  return TorusPoint::wrapped(Omega * t + theta0.theta1, omega_eff * t + theta0.theta2);
}

}  // namespace

SemiclassicalTrajectory trajectory_fixed(const std::vector<double>& times, const TorusPoint& theta0,
                                         double n0, const ModelParams& p, double omega_eff,
                                         double spin) {
  check_times(times);
  SemiclassicalTrajectory out;
  out.times = times;
  double n = n0;
  double phi = 0.0;
  double last = 0.0;
  for (double t : times) {
    if (t > last) {
      // Shift the start so the segment integral runs over [last, t].
      const TorusPoint start{theta0.theta1 + p.Omega * last, theta0.theta2 + omega_eff * last};
      n += delta_n_fixed(t - last, start, n0, p, omega_eff, spin);
      phi += phase_integral(t - last, start, n0, p, spin, omega_eff);
      last = t;
    }
    out.theta.push_back(angles_at(t, theta0, p.Omega, omega_eff));
    out.n.push_back(n);
    out.phi.push_back(phi);
  }
  return out;
}

SemiclassicalTrajectory delta_n_backaction(const std::vector<double>& times, const TorusPoint& theta0,
                                           double n0, const ModelParams& p, double omega_eff,
                                           double spin, int refine) {
  check_times(times);
  if (refine < 1) throw ConfigError("refine must be at least 1");
  const double h_max = panel_length(p.Omega, omega_eff) / refine;

  auto rates = [&](double t, double n, double& dn, double& dphi) {
    if (n < 0.0) {
      std::ostringstream os;
      os << "photon number became negative (" << n << ") at t = " << t;
      throw UnderflowError(os.str());
    }
    const double t1 = p.Omega * t + theta0.theta1;
    const double t2 = omega_eff * t + theta0.theta2;
    dn = ndot_adiabatic(t1, t2, n, p, spin);
    dphi = p.omega * n - spin * b_eff(t1, t2, n, p).norm();
  };

  SemiclassicalTrajectory out;
  out.times = times;
  double n = n0;
  double phi = 0.0;
  double t = 0.0;
  for (double target : times) {
    const double span = target - t;
    if (span > 0.0) {
      const long steps = std::max(1L, static_cast<long>(std::ceil(span / h_max - 1e-9)));
      const double h = span / static_cast<double>(steps);
      for (long k = 0; k < steps; ++k) {
        const double s = t + k * h;
        double k1n, k1p, k2n, k2p, k3n, k3p, k4n, k4p;
        rates(s, n, k1n, k1p);
        rates(s + 0.5 * h, n + 0.5 * h * k1n, k2n, k2p);
        rates(s + 0.5 * h, n + 0.5 * h * k2n, k3n, k3p);
        rates(s + h, n + h * k3n, k4n, k4p);
        n += h / 6.0 * (k1n + 2.0 * k2n + 2.0 * k3n + k4n);
        phi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if (n < 0.0) {
          std::ostringstream os;
          os << "photon number became negative (" << n << ") at t = " << s + h;
          throw UnderflowError(os.str());
        }
      }
      t = target;
    }
    out.theta.push_back(angles_at(target, theta0, p.Omega, omega_eff));
    out.n.push_back(n);
    out.phi.push_back(phi);
  }
  return out;
}

EnsembleResult ensemble_run(EnsembleKind kind, int n_theta, const std::vector<double>& times,
                            double n0, const ModelParams& p, double omega_eff, double spin) {
  if (n_theta < 2) throw ConfigError("ensemble needs at least two members");
  EnsembleResult out;
  out.members = parallel_map(n_theta, [&](int k) {
    const TorusPoint theta0{p.theta01, kTwoPi * k / n_theta};
    return kind == EnsembleKind::Fixed
               ? trajectory_fixed(times, theta0, n0, p, omega_eff, spin)
               : delta_n_backaction(times, theta0, n0, p, omega_eff, spin);
  });
  out.variance.assign(times.size(), 0.0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    double mean = 0.0;
    for (const auto& m : out.members) mean += m.n[i];
    mean /= n_theta;
    double var = 0.0;
    for (const auto& m : out.members) var += (m.n[i] - mean) * (m.n[i] - mean);
    out.variance[i] = var / n_theta;
  }
  return out;
}

}  // namespace cavboost
