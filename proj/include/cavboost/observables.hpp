#pragma once

#include <optional>
#include <vector>

#include "cavboost/model.hpp"

namespace cavboost {

/// Reduced density matrix of the cavity.
struct CavityDensityMatrix {
  CMatrix rho;

  int n_max() const { return static_cast<int>(rho.rows()) - 1; }
  /// Throws PhysicsGuardError unless rho is Hermitian, unit-trace and PSD.
  void validate() const;
};

CavityDensityMatrix reduced_cavity(const QuantumState& psi);
Eigen::Matrix2cd reduced_spin(const QuantumState& psi);

std::vector<double> fock_distribution(const CavityDensityMatrix& rho);
/// P(n) straight from the amplitudes, without forming rho.
std::vector<double> fock_distribution(const QuantumState& psi);
double mean_photon_number(const std::vector<double>& p);
/// 1 / sum_n P(n)^2.
double participation_ratio(const std::vector<double>& p);

/// Square grid of the quadrature plane.
struct QGridSpec {
  double half_width = 8.0;  // axes run over [-half_width, half_width]
  int points = 201;

  static QGridSpec for_truncation(int n_max, int points = 201);
};

struct QGrid {
  std::vector<double> axis;  // shared by Re(alpha) and Im(alpha)
  /// q[i * axis.size() + j] = Q(axis[i] + i axis[j]).
  std::vector<double> q;

  double at(std::size_t re, std::size_t im) const { return q[re * axis.size() + im]; }
  /// Integral of Q over the grid (trapezoid rule).
  double integral() const;
  /// |alpha|^2 at which the angular average of Q peaks.
  double ridge_radius_squared(int radial_bins = 400) const;
};

/// Coherent-state amplitudes <n|alpha>, n = 0..n_max (log-factorial form).
CVector coherent_overlaps(Complex alpha, int n_max);

/// Q(alpha) = <alpha|rho|alpha> / pi at a single point.
double husimi_q(const CavityDensityMatrix& rho, Complex alpha);
QGrid husimi_q(const CavityDensityMatrix& rho, const QGridSpec& spec);

/// Angular average of Q depends on P(n) only: Qbar(r) = sum_n P(n) |<n|r>|^2 / pi.
/// Returns the r^2 of its maximum (the ring radius of a rotationally smeared
/// Q-function).
double husimi_ridge_radius_squared(const std::vector<double>& p);

/// Von Neumann entropy (nats) of the reduced spin state.
double entanglement_entropy(const QuantumState& psi);

Complex expect_annihilation(const QuantumState& psi);

/// theta2 = -arg <a>. Throws UndefinedPhaseError when |<a>| < 1e-6.
double cavity_phase(const QuantumState& psi);

/// Sample-to-sample nearest-branch unwrapping of a phase series.
class PhaseUnwrapper {
 public:
  double operator()(double wrapped);

 private:
  std::optional<double> last_;
};

struct CatFidelity {
  double f_max = 0.0;
  double alpha = 0.0;
};

/// Fidelity <cat(alpha)|rho|cat(alpha)> for the truncated even cat state.
double cat_fidelity(const CavityDensityMatrix& rho, double alpha);
/// Maximum over real alpha in [alpha_lo, alpha_hi]: 64-point scan, then
/// golden-section refinement around the best bracket.
CatFidelity cat_fidelity_max(const CavityDensityMatrix& rho, double alpha_lo, double alpha_hi);

/// Spin alignment with the operator-valued cavity field,
/// M = <B.S> / sqrt(<B^2>), where
///   B_x = (b_m - b_d sin theta1) - (b_0 / 2)(a + a^dag),
///   B_y = -(b_0 / 2) i (a - a^dag),
///   B_z = b_d cos theta1.
double alignment_metric(const QuantumState& psi, double theta1, const ModelParams& p);

}  // namespace cavboost
