#include "cavboost/model.hpp"

#include <string>

#include "cavboost/errors.hpp"

namespace cavboost {

ModelParams ModelParams::reference() { return ModelParams{}; }

void ModelParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(omega > 0.0) || !finite(omega)) throw ConfigError("omega must be positive and finite");
  if (!(Omega > 0.0) || !finite(Omega)) throw ConfigError("Omega must be positive and finite");
  if (n_max < 1) throw ConfigError("n_max must be at least 1");
  if (!finite(b_m) || !finite(b_d) || !finite(b_0) || !finite(theta01))
    throw ConfigError("field energies and theta01 must be finite");
  if (!(spin > 0.0) || !finite(spin)) throw ConfigError("spin must be positive");
  if (omega_q && (!(*omega_q > 0.0) || !finite(*omega_q)))
    throw ConfigError("omega_q must be positive and finite");
}

FieldVector drive_field(double theta1, const ModelParams& p) {
  return {p.b_m - p.b_d * std::sin(theta1), 0.0, p.b_d * std::cos(theta1)};
}

namespace {

using Triplet = Eigen::Triplet<Complex>;

SpMatrix from_triplets(int dim, const std::vector<Triplet>& t) {
  SpMatrix m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

OperatorSet::OperatorSet(int n) : n_max(n) {
  const int dim = 2 * (n + 1);
  std::vector<Triplet> num, ann, x, y, z, jc, qx;
  for (int k = 0; k <= n; ++k) {
    for (int s = 0; s < 2; ++s) {
      const int i = basis_index(k, s);
      num.emplace_back(i, i, static_cast<double>(k));
      z.emplace_back(i, i, spin_projection(s));
      if (k > 0) ann.emplace_back(basis_index(k - 1, s), i, std::sqrt(static_cast<double>(k)));
    }
    const int up = basis_index(k, 0);
    const int dn = basis_index(k, 1);
    x.emplace_back(up, dn, 0.5);
    x.emplace_back(dn, up, 0.5);
    y.emplace_back(up, dn, Complex(0.0, -0.5));
    y.emplace_back(dn, up, Complex(0.0, 0.5));
    if (k > 0) {
      // a S+ : |k, down> -> sqrt(k) |k-1, up>, plus the Hermitian conjugate.
      const double g = std::sqrt(static_cast<double>(k));
      jc.emplace_back(basis_index(k - 1, 0), dn, g);
      jc.emplace_back(dn, basis_index(k - 1, 0), g);
      // (a + a^dag) S_x couples k <-> k-1 with the spin flipped.
      qx.emplace_back(basis_index(k - 1, 0), dn, 0.5 * g);
      qx.emplace_back(dn, basis_index(k - 1, 0), 0.5 * g);
      qx.emplace_back(basis_index(k - 1, 1), up, 0.5 * g);
      qx.emplace_back(up, basis_index(k - 1, 1), 0.5 * g);
    }
  }
  number = from_triplets(dim, num);
  annihilation = from_triplets(dim, ann);
  sx = from_triplets(dim, x);
  sy = from_triplets(dim, y);
  sz = from_triplets(dim, z);
  jaynes_cummings = from_triplets(dim, jc);
  quadrature_sx = from_triplets(dim, qx);
}

SpMatrix Hamiltonian::combine(std::span<const double> times, std::span<const double> weights) const {
  std::vector<double> total(terms.size(), 0.0);
  std::vector<double> c(terms.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    coefficients(times[j], c);
    for (std::size_t k = 0; k < terms.size(); ++k) total[k] += weights[j] * c[k];
  }
  SpMatrix h(dim(), dim());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (total[k] != 0.0) h += total[k] * terms[k];
  }
  return h;
}

SpMatrix Hamiltonian::sparse(double t) const {
  const double times[] = {t};
  const double weights[] = {1.0};
  return combine(times, weights);
}

CMatrix Hamiltonian::dense(double t) const { return CMatrix(sparse(t)); }

Hamiltonian rotating_frame_hamiltonian(const ModelParams& p) {
  p.validate();
  OperatorSet ops(p.n_max);
  Hamiltonian h;
  h.terms = {ops.number, ops.sx, ops.sz, ops.jaynes_cummings};
  h.coefficients = [p](double t, std::span<double> c) {
    const double theta1 = p.Omega * t + p.theta01;
    const FieldVector b = drive_field(theta1, p);
    c[0] = p.omega;
    c[1] = -b.x;
    c[2] = -b.z;
    c[3] = 0.5 * p.b_0;
  };
  h.period = p.drive_period();
  return h;
}

Hamiltonian lab_frame_hamiltonian(const ModelParams& p) {
  p.validate();
  if (!p.omega_q) throw ConfigError("lab-frame Hamiltonian requires omega_q");
  const double wq = *p.omega_q;
  OperatorSet ops(p.n_max);
  Hamiltonian h;
  h.terms = {ops.number, ops.sz, ops.quadrature_sx, ops.sx};
  h.coefficients = [p, wq](double t, std::span<double> c) {
    const double theta1 = p.Omega * t + p.theta01;
    c[0] = wq + p.omega;
    c[1] = wq - p.b_d * std::cos(theta1);
    c[2] = p.b_0;
    c[3] = -2.0 * (p.b_m - p.b_d * std::sin(theta1)) * std::cos(wq * t);
  };
  h.period = p.drive_period();
  h.step_scale = std::min(1.0, p.omega / wq);
  return h;
}

CMatrix hamiltonian_rotating(double t, const ModelParams& p) {
  return rotating_frame_hamiltonian(p).dense(t);
}

CMatrix hamiltonian_lab(double t, const ModelParams& p) { return lab_frame_hamiltonian(p).dense(t); }

// --- states ----------------------------------------------------------------

CavityState make_fock(int n0, const ModelParams& p) {
  if (n0 < 0 || n0 > p.n_max)
    throw TruncationError("Fock index " + std::to_string(n0) + " outside truncation n_max = " +
                          std::to_string(p.n_max));
  CavityState c{CVector::Zero(p.cavity_dim())};
  c.amps[n0] = 1.0;
  return c;
}

namespace {

void check_mass(double r, const ModelParams& p) {
  if (r * r + 6.0 * r > p.n_max)
    throw TruncationError("coherent amplitude |alpha| = " + std::to_string(r) +
                          " does not fit truncation n_max = " + std::to_string(p.n_max));
}

// <n|alpha> without the normalization e^{-|alpha|^2/2}, scaled to avoid overflow.
CVector coherent_amplitudes(Complex alpha, int n_max) {
  CVector c(n_max + 1);
  const double r = std::abs(alpha);
  const double phase = std::arg(alpha);
  for (int n = 0; n <= n_max; ++n) {
    if (r == 0.0) {
      c[n] = n == 0 ? 1.0 : 0.0;
      continue;
    }
    const double logmag = -0.5 * r * r + n * std::log(r) - 0.5 * std::lgamma(n + 1.0);
    c[n] = std::polar(std::exp(logmag), n * phase);
  }
  return c;
}

}  // namespace

CavityState make_coherent(Complex alpha, const ModelParams& p) {
  check_mass(std::abs(alpha), p);
  CVector c = coherent_amplitudes(alpha, p.n_max);
  c.normalize();
  return {c};
}

CavityState make_cat(double alpha, const ModelParams& p) {
  check_mass(std::abs(alpha), p);
  CVector c = coherent_amplitudes(alpha, p.n_max) + coherent_amplitudes(-alpha, p.n_max);
  c.normalize();
  return {c};
}

Eigen::Vector2cd spin_eigenstate(const FieldVector& axis, int sign) {
  const double len = axis.norm();
  if (!(len > 0.0)) throw ConfigError("spin quantization axis must be nonzero");
  const FieldVector u = axis * ((sign >= 0 ? 1.0 : -1.0) / len);
  Eigen::Vector2cd v;
  if (u.z >= 0.0) {
    v << Complex(1.0 + u.z, 0.0), Complex(u.x, u.y);
  } else {
    v << Complex(u.x, -u.y), Complex(1.0 - u.z, 0.0);
  }
  return v.normalized();
}

QuantumState with_spin(const CavityState& cavity, const FieldVector& axis, int sign) {
  const Eigen::Vector2cd s = spin_eigenstate(axis, sign);
  const int nc = static_cast<int>(cavity.amps.size());
  QuantumState psi{CVector(2 * nc), 0.0};
  for (int n = 0; n < nc; ++n) {
    psi.amps[basis_index(n, 0)] = cavity.amps[n] * s[0];
    psi.amps[basis_index(n, 1)] = cavity.amps[n] * s[1];
  }
  return psi;
}

namespace {

QuantumState apply_frame_phase(const QuantumState& psi, double angle) {
  QuantumState out = psi;
  const int nc = psi.n_max() + 1;
  for (int n = 0; n < nc; ++n) {
    for (int s = 0; s < 2; ++s) {
      out.amps[basis_index(n, s)] *= std::polar(1.0, angle * (n + spin_projection(s)));
    }
  }
  return out;
}

}  // namespace

QuantumState rotating_frame_map(const QuantumState& psi, double t, double omega_q) {
  return apply_frame_phase(psi, omega_q * t);
}

QuantumState lab_frame_map(const QuantumState& psi, double t, double omega_q) {
  return apply_frame_phase(psi, -omega_q * t);
}

}  // namespace cavboost
