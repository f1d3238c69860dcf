#pragma once

// Adiabatic semiclassical theory of the driven spin: the cavity is replaced by
// a coherent state |sqrt(n) e^{-i theta2}> and the spin follows
//   B_eff(theta1, theta2, n) = (b_m - b_d sin theta1 - b_0 sqrt(n) cos theta2,
//                               -b_0 sqrt(n) sin theta2,
//                               b_d cos theta1).

#include <functional>
#include <vector>

#include "cavboost/model.hpp"

namespace cavboost {

/// Point on the (theta1, theta2) torus, stored in [0, 2 pi).
struct TorusPoint {
  double theta1 = 0.0;
  double theta2 = 0.0;

  static TorusPoint wrapped(double theta1, double theta2);
};

double wrap_angle(double theta);  // into [0, 2 pi)

FieldVector b_eff(double theta1, double theta2, double n, const ModelParams& p);

/// Analytic partial derivatives of B_eff.
struct FieldJacobian {
  FieldVector d_theta1;
  FieldVector d_theta2;
  FieldVector d_n;
};
FieldJacobian b_eff_jacobian(double theta1, double theta2, double n, const ModelParams& p);

/// Derivative of the unit vector B/|B| given B and dB.
FieldVector unit_derivative(const FieldVector& b, const FieldVector& db);

/// Berry curvature S B^.(d1 B^ x d2 B^). Throws SingularFieldError when
/// |B_eff| < 1e-9.
double berry_curvature(double theta1, double theta2, double n, const ModelParams& p, double spin);

/// Uniform average over the torus on a grid x grid tensor-product mesh
/// (trapezoid rule, spectrally accurate for smooth periodic integrands).
double torus_average(const std::function<double(double, double)>& f, int grid = 256);

struct ChernResult {
  int chern = 0;
  double integral = 0.0;  // (1 / 2 pi) * torus integral of F before rounding
  double residual = 0.0;  // |integral - chern|
};

/// Throws DegeneracyError when the pre-rounding residual exceeds 1e-4.
ChernResult chern_number(const ModelParams& p, double n, double spin, int grid = 256);

/// Adiabatic pumping rate n' = S d|B_eff|/d theta2 + Omega F.
double ndot_adiabatic(double theta1, double theta2, double n, const ModelParams& p, double spin);

/// Torus average of ndot_adiabatic; equals Omega C / 2 pi inside a pumping window.
double ndot_torus_average(const ModelParams& p, double n, double spin, int grid = 256);

/// delta omega_0 = -S (B_eff . d_n B_eff) / |B_eff|.
double delta_omega0(double theta1, double theta2, double n, const ModelParams& p, double spin);
double delta_omega0_avg(double n, const ModelParams& p, double spin, int grid = 256);

/// Cavity frequency used for a prescribed theta2(t): omega + [delta omega_0](n0),
/// or the bare omega when `corrected` is false.
double effective_cavity_frequency(const ModelParams& p, double n0, double spin, bool corrected = true);

/// Line integral int_0^T f(Omega s + theta01, omega_eff s + theta02) ds by
/// adaptive Gauss-Kronrod quadrature on panels no longer than
/// min(2 pi / Omega, 2 pi / omega_eff) / 64.
double quasiperiodic_integral(const std::function<double(double, double)>& f, double t_end,
                              const TorusPoint& theta0, double Omega, double omega_eff);

/// Delta n(T) with n frozen at n0 in the integrand.
double delta_n_fixed(double t_end, const TorusPoint& theta0, double n0, const ModelParams& p,
                     double omega_eff, double spin = 0.5);

/// Accumulated phase int_0^T (omega n0 - S |B_eff|) ds.
double phase_integral(double t_end, const TorusPoint& theta0, double n0, const ModelParams& p,
                      double spin, double omega_eff);

struct SemiclassicalTrajectory {
  std::vector<double> times;  // absolute times
  std::vector<TorusPoint> theta;
  std::vector<double> n;
  std::vector<double> phi;
};

/// Delta n(t) at the requested times, n frozen at n0 (cumulative quadrature).
SemiclassicalTrajectory trajectory_fixed(const std::vector<double>& times, const TorusPoint& theta0,
                                         double n0, const ModelParams& p, double omega_eff,
                                         double spin = 0.5);

/// Integrates n' = ndot_adiabatic(theta_t, n) with n fed back, classic RK4 on a
/// fixed step no longer than min(2 pi / Omega, 2 pi / omega_eff) / (64 refine).
/// The accumulated phase uses the instantaneous n. Throws UnderflowError if
/// n becomes negative.
SemiclassicalTrajectory delta_n_backaction(const std::vector<double>& times, const TorusPoint& theta0,
                                           double n0, const ModelParams& p, double omega_eff,
                                           double spin = 0.5, int refine = 1);

enum class EnsembleKind { Fixed, Backaction };

struct EnsembleResult {
  std::vector<SemiclassicalTrajectory> members;
  std::vector<double> variance;  // population variance of n over members, per time
};

/// Members at theta02 = 2 pi k / n_theta with theta01 from p. Members run in
/// parallel; results are ordered by member index.
EnsembleResult ensemble_run(EnsembleKind kind, int n_theta, const std::vector<double>& times,
                            double n0, const ModelParams& p, double omega_eff, double spin = 0.5);

}  // namespace cavboost
