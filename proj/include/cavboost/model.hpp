#pragma once

// Spin-1/2 coupled to a single truncated cavity mode, driven by a circularly
// polarized classical field. Units: hbar = mu = 1, energies in units of the
// cavity frequency unless stated otherwise.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace cavboost {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using SpMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kGoldenRatio = std::numbers::phi;

struct ModelParams {
  double omega = 1.0;
  double Omega = kGoldenRatio;
  double b_m = 6.0;
  double b_d = 6.0;
  double b_0 = 1.5;
  double theta01 = 1.5 * std::numbers::pi;
  double spin = 0.5;
  int n_max = 64;
  std::optional<double> omega_q;

  /// Parameters of the reference boosting run: golden-ratio drive,
  /// b_m = b_d = 6, b_0 = 1.5, theta01 = 3 pi / 2, spin-1/2, n_max = 64.
  static ModelParams reference();

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  double drive_period() const { return kTwoPi / Omega; }
  int cavity_dim() const { return n_max + 1; }
  int dim() const { return 2 * (n_max + 1); }
};

struct FieldVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double dot(const FieldVector& o) const { return x * o.x + y * o.y + z * o.z; }
  FieldVector cross(const FieldVector& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  FieldVector operator+(const FieldVector& o) const { return {x + o.x, y + o.y, z + o.z}; }
  FieldVector operator-(const FieldVector& o) const { return {x - o.x, y - o.y, z - o.z}; }
  FieldVector operator*(double s) const { return {x * s, y * s, z * s}; }
  FieldVector operator/(double s) const { return {x / s, y / s, z / s}; }
};

/// Drive field mu B_c(theta1) = (b_m - b_d sin theta1, 0, b_d cos theta1).
FieldVector drive_field(double theta1, const ModelParams& p);

// --- Hilbert space ---------------------------------------------------------
//
// Product basis |n> (x) |m>, flattened as index = 2 n + s with s = 0 for
// m = +1/2 (spin up) and s = 1 for m = -1/2.

inline int basis_index(int n, int s) { return 2 * n + s; }
inline double spin_projection(int s) { return s == 0 ? 0.5 : -0.5; }

/// Constant sparse operators on the product space, built once per truncation.
struct OperatorSet {
  int n_max = 0;
  SpMatrix number;          // n (x) 1
  SpMatrix annihilation;    // a (x) 1
  SpMatrix sx, sy, sz;      // 1 (x) S_i
  SpMatrix jaynes_cummings; // a S+ + a^dag S-
  SpMatrix quadrature_sx;   // (a + a^dag) (x) S_x

  explicit OperatorSet(int n_max);
};

/// Hamiltonian of the form H(t) = sum_k c_k(t) M_k with constant Hermitian
/// M_k and real coefficients. Linear combinations at several times are then a
/// reweighting of the same sparse terms.
struct Hamiltonian {
  std::vector<SpMatrix> terms;
  std::function<void(double, std::span<double>)> coefficients;
  /// Time unit of the step size: the drive period 2 pi / Omega.
  double period = 1.0;
  /// Multiplier applied to the step size, e.g. omega / omega_q for runs that
  /// must resolve a fast carrier.
  double step_scale = 1.0;

  int dim() const { return terms.empty() ? 0 : static_cast<int>(terms.front().rows()); }

  /// sum_k w_k c_k(t_k) M_k for a set of (time, weight) nodes.
  SpMatrix combine(std::span<const double> times, std::span<const double> weights) const;
  SpMatrix sparse(double t) const;
  CMatrix dense(double t) const;
};

/// H(t) = omega n - B_c(Omega t + theta01) . S + (b_0 / 2)(a S+ + a^dag S-).
Hamiltonian rotating_frame_hamiltonian(const ModelParams& p);

/// Lab-frame strong-coupling Hamiltonian with carrier omega_q:
///   (omega_q + omega) n + (omega_q - b_d cos theta1) S_z + b_0 (a + a^dag) S_x
///   - 2 (b_m - b_d sin theta1) cos(omega_q t) S_x,   theta1 = Omega t + theta01.
/// Throws ConfigError when omega_q is unset.
Hamiltonian lab_frame_hamiltonian(const ModelParams& p);

CMatrix hamiltonian_rotating(double t, const ModelParams& p);
CMatrix hamiltonian_lab(double t, const ModelParams& p);

// --- States ----------------------------------------------------------------

/// Cavity-only amplitudes c_n, n = 0..n_max.
struct CavityState {
  CVector amps;
};

struct QuantumState {
  CVector amps;
  double time = 0.0;

  int n_max() const { return static_cast<int>(amps.size()) / 2 - 1; }
  Complex amp(int n, int s) const { return amps[basis_index(n, s)]; }
  double norm() const { return amps.norm(); }
};

CavityState make_fock(int n0, const ModelParams& p);
/// Truncated coherent state; amplitudes use log-factorials so large n_max is safe.
CavityState make_coherent(Complex alpha, const ModelParams& p);
/// Even cat state |alpha> + |-alpha>, renormalized after truncation.
CavityState make_cat(double alpha, const ModelParams& p);

/// Spinor of the +S (sign > 0) or -S eigenstate along `axis`, components (up, down).
Eigen::Vector2cd spin_eigenstate(const FieldVector& axis, int sign);
QuantumState with_spin(const CavityState& cavity, const FieldVector& axis, int sign);

/// |psi> -> exp[i omega_q t (n + S_z)] |psi>: lab frame to rotating frame.
QuantumState rotating_frame_map(const QuantumState& psi, double t, double omega_q);
/// Inverse of rotating_frame_map.
QuantumState lab_frame_map(const QuantumState& psi, double t, double omega_q);

}  // namespace cavboost
