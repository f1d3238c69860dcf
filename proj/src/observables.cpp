#include "cavboost/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cavboost/errors.hpp"

namespace cavboost {

namespace {

// Amplitudes as an (n_max + 1) x 2 matrix: rows are Fock levels, columns spin.
Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, 2, Eigen::RowMajor>> amplitude_matrix(
    const QuantumState& psi) {
  return {psi.amps.data(), psi.amps.size() / 2, 2};
}

}  // namespace

void CavityDensityMatrix::validate() const {
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  const double trace_err = std::abs(rho.trace() - Complex(1.0, 0.0));
  std::ostringstream os;
  if (herm > 1e-10) os << "cavity density matrix not Hermitian (" << herm << ")";
  else if (trace_err > 1e-10) os << "cavity density matrix trace off by " << trace_err;
  else {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
    const double lowest = es.eigenvalues().minCoeff();
    if (lowest < -1e-9) os << "cavity density matrix has negative eigenvalue " << lowest;
  }
  if (!os.str().empty()) throw PhysicsGuardError(os.str());
}

CavityDensityMatrix reduced_cavity(const QuantumState& psi) {
  const auto a = amplitude_matrix(psi);
  CavityDensityMatrix out{a * a.adjoint()};
  out.validate();
  return out;
}

Eigen::Matrix2cd reduced_spin(const QuantumState& psi) {
  const auto a = amplitude_matrix(psi);
  return a.transpose() * a.conjugate();
}

std::vector<double> fock_distribution(const CavityDensityMatrix& rho) {
  std::vector<double> p(rho.rho.rows());
  for (Eigen::Index n = 0; n < rho.rho.rows(); ++n) p[n] = rho.rho(n, n).real();
  return p;
}

std::vector<double> fock_distribution(const QuantumState& psi) {
  const int nc = psi.n_max() + 1;
  std::vector<double> p(nc);
  for (int n = 0; n < nc; ++n) p[n] = std::norm(psi.amp(n, 0)) + std::norm(psi.amp(n, 1));
  return p;
}

double mean_photon_number(const std::vector<double>& p) {
  double m = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p[n];
  return m;
}

double participation_ratio(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p) s += x * x;
  return 1.0 / s;
}

QGridSpec QGridSpec::for_truncation(int n_max, int points) {
  return {std::sqrt(static_cast<double>(n_max)), points};
}

double QGrid::integral() const {
  const std::size_t m = axis.size();
  if (m < 2) return 0.0;
  const double h = axis[1] - axis[0];
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double wi = (i == 0 || i + 1 == m) ? 0.5 : 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double wj = (j == 0 || j + 1 == m) ? 0.5 : 1.0;
      sum += wi * wj * q[i * m + j];
    }
  }
  return sum * h * h;
}

double QGrid::ridge_radius_squared(int radial_bins) const {
  const std::size_t m = axis.size();
  const double r2_max = axis.back() * axis.back();
  std::vector<double> sum(radial_bins, 0.0);
  std::vector<int> count(radial_bins, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double r2 = axis[i] * axis[i] + axis[j] * axis[j];
      if (r2 >= r2_max) continue;
      const int b = static_cast<int>(r2 / r2_max * radial_bins);
      sum[b] += q[i * m + j];
      ++count[b];
    }
  }
  int best = 0;
  double best_val = -1.0;
  for (int b = 0; b < radial_bins; ++b) {
    if (count[b] == 0) continue;
    const double avg = sum[b] / count[b];
    if (avg > best_val) {
      best_val = avg;
      best = b;
    }
  }
  return (best + 0.5) * r2_max / radial_bins;
}

CVector coherent_overlaps(Complex alpha, int n_max) {
  CVector c(n_max + 1);
  const double r = std::abs(alpha);
  const double phase = std::arg(alpha);
  if (r == 0.0) {
    c.setZero();
    c[0] = 1.0;
    return c;
  }
  const double log_r = std::log(r);
  for (int n = 0; n <= n_max; ++n) {
    c[n] = std::polar(std::exp(-0.5 * r * r + n * log_r - 0.5 * std::lgamma(n + 1.0)), n * phase);
  }
  return c;
}

namespace {

struct Spectrum {
  std::vector<double> weights;
  std::vector<CVector> vectors;
};

// Keeps only the components that contribute; reduced states of a spin-1/2
// product space have rank <= 2.
Spectrum positive_spectrum(const CavityDensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.rho);
  Spectrum s;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double w = es.eigenvalues()[k];
    if (w > 1e-15) {
      s.weights.push_back(w);
      s.vectors.push_back(es.eigenvectors().col(k));
    }
  }
  return s;
}

double q_from_spectrum(const Spectrum& s, const CVector& overlaps) {
  double q = 0.0;
  for (std::size_t k = 0; k < s.weights.size(); ++k) {
    q += s.weights[k] * std::norm(overlaps.dot(s.vectors[k]));
  }
  return q / std::numbers::pi;
}

}  // namespace

double husimi_q(const CavityDensityMatrix& rho, Complex alpha) {
  const CVector c = coherent_overlaps(alpha, rho.n_max());
  return std::max(0.0, (c.adjoint() * rho.rho * c)(0, 0).real() / std::numbers::pi);
}

QGrid husimi_q(const CavityDensityMatrix& rho, const QGridSpec& spec) {
  if (spec.points < 2) throw ConfigError("Q grid needs at least 2 points per axis");
  QGrid g;
  g.axis.resize(spec.points);
  for (int i = 0; i < spec.points; ++i) {
    g.axis[i] = -spec.half_width + 2.0 * spec.half_width * i / (spec.points - 1);
  }
  const Spectrum s = positive_spectrum(rho);
  g.q.resize(static_cast<std::size_t>(spec.points) * spec.points);
  for (int i = 0; i < spec.points; ++i) {
    for (int j = 0; j < spec.points; ++j) {
      const CVector c = coherent_overlaps(Complex(g.axis[i], g.axis[j]), rho.n_max());
      g.q[static_cast<std::size_t>(i) * spec.points + j] = q_from_spectrum(s, c);
    }
  }
  return g;
}

namespace {

double radial_q(const std::vector<double>& p, double r2) {
  if (r2 <= 0.0) return p.empty() ? 0.0 : p[0];
  const double log_r2 = std::log(r2);
  double q = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    q += p[n] * std::exp(-r2 + static_cast<double>(n) * log_r2 - std::lgamma(n + 1.0));
  }
  return q;
}

}  // namespace

double husimi_ridge_radius_squared(const std::vector<double>& p) {
  const double top = static_cast<double>(p.size());
  constexpr int kScan = 2000;
  int best = 0;
  double best_q = -1.0;
  for (int k = 0; k <= kScan; ++k) {
    const double q = radial_q(p, top * k / kScan);
    if (q > best_q) {
      best_q = q;
      best = k;
    }
  }
  double lo = top * std::max(0, best - 1) / kScan;
  double hi = top * std::min(kScan, best + 1) / kScan;
  const double inv_phi = 1.0 / std::numbers::phi;
  while (hi - lo > 1e-10) {
    const double x1 = hi - inv_phi * (hi - lo);
    const double x2 = lo + inv_phi * (hi - lo);
    if (radial_q(p, x1) < radial_q(p, x2)) lo = x1;
    else hi = x2;
  }
  return 0.5 * (lo + hi);
}

double entanglement_entropy(const QuantumState& psi) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(reduced_spin(psi), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double w = es.eigenvalues()[k];
    if (w > 1e-300) s -= w * std::log(w);
  }
  return std::clamp(s, 0.0, std::log(2.0));
}

Complex expect_annihilation(const QuantumState& psi) {
  Complex sum = 0.0;
  const int n_max = psi.n_max();
  for (int n = 1; n <= n_max; ++n) {
    const double g = std::sqrt(static_cast<double>(n));
    for (int s = 0; s < 2; ++s) sum += std::conj(psi.amp(n - 1, s)) * g * psi.amp(n, s);
  }
  return sum;
}

double cavity_phase(const QuantumState& psi) {
  const Complex a = expect_annihilation(psi);
  if (std::abs(a) < 1e-6) throw UndefinedPhaseError("cavity phase undefined: |<a>| below 1e-6");
  return -std::arg(a);
}

double PhaseUnwrapper::operator()(double wrapped) {
  if (!last_) {
    last_ = wrapped;
    return wrapped;
  }
  const double jump = std::remainder(wrapped - *last_, kTwoPi);
  *last_ += jump;
  return *last_;
}

namespace {

CVector cat_vector(double alpha, int n_max) {
  CVector c = coherent_overlaps(alpha, n_max) + coherent_overlaps(-alpha, n_max);
  return c / c.norm();
}

}  // namespace

double cat_fidelity(const CavityDensityMatrix& rho, double alpha) {
  const CVector c = cat_vector(alpha, rho.n_max());
  return (c.adjoint() * rho.rho * c)(0, 0).real();
}

CatFidelity cat_fidelity_max(const CavityDensityMatrix& rho, double alpha_lo, double alpha_hi) {
  if (alpha_lo < 0.0) alpha_lo = 0.0;
  if (!(alpha_hi > alpha_lo)) throw ConfigError("cat fidelity range must be non-empty");
  constexpr int kCoarse = 64;
  const double h = (alpha_hi - alpha_lo) / (kCoarse - 1);
  int best = 0;
  double best_f = -1.0;
  for (int k = 0; k < kCoarse; ++k) {
    const double f = cat_fidelity(rho, alpha_lo + k * h);
    if (f > best_f) {
      best_f = f;
      best = k;
    }
  }
  double lo = alpha_lo + std::max(0, best - 1) * h;
  double hi = alpha_lo + std::min(kCoarse - 1, best + 1) * h;
  const double inv_phi = 1.0 / std::numbers::phi;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = cat_fidelity(rho, x1);
  double f2 = cat_fidelity(rho, x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = cat_fidelity(rho, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = cat_fidelity(rho, x1);
    }
  }
  CatFidelity out{best_f, alpha_lo + best * h};
  const double mid = 0.5 * (lo + hi);
  const double f_mid = cat_fidelity(rho, mid);
  if (f_mid > out.f_max) out = {f_mid, mid};
  return out;
}

double alignment_metric(const QuantumState& psi, double theta1, const ModelParams& p) {
  const int n_max = psi.n_max();
  const OperatorSet ops(n_max);
  const SpMatrix a = ops.annihilation;
  const SpMatrix ad = SpMatrix(a.adjoint());
  const FieldVector drive = drive_field(theta1, p);
  const CVector x_psi = a * psi.amps + ad * psi.amps;
  const CVector y_psi = Complex(0.0, 1.0) * (a * psi.amps - ad * psi.amps);
  const CVector bx_psi = drive.x * psi.amps - 0.5 * p.b_0 * x_psi;
  const CVector by_psi = -0.5 * p.b_0 * y_psi;
  const CVector bz_psi = drive.z * psi.amps;
  // Cavity and spin factors commute, so <B_i S_i> = <B_i psi | S_i psi>.
  const Complex bs = bx_psi.dot(ops.sx * psi.amps) + by_psi.dot(ops.sy * psi.amps) +
                     bz_psi.dot(ops.sz * psi.amps);
  const double b2 = bx_psi.squaredNorm() + by_psi.squaredNorm() + bz_psi.squaredNorm();
  if (!(b2 > 0.0)) return 0.0;
  return bs.real() / std::sqrt(b2);
}

}  // namespace cavboost
