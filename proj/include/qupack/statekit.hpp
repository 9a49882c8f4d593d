#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qupack {

using Cx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

// Tolerance ladder: kExactTol for plain linear algebra, kPsdTol for
// eigensolver-backed positivity/completeness checks.
inline constexpr double kExactTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

// Thrown when a probabilistic primitive has zero success probability for the
// given input, so its output is undefined rather than merely unlikely.
class encoding_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

inline double min_eigenvalue(const Mat& hermitian) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(hermitian);
  return solver.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const Mat& hermitian) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(hermitian);
  return solver.eigenvalues().maxCoeff();
}

}  // namespace detail

/// Unit-normalizable complex amplitude vector over a finite basis.
/// Composite bases are row-major: the first subsystem is the most
/// significant index, so |i⟩⊗|j⟩ sits at i*dim_b + j.
class PureState {
 public:
  explicit PureState(Vec amplitudes) : amps_(std::move(amplitudes)) {
    detail::require(amps_.size() >= 2, "PureState: dim must be >= 2");
  }

  PureState(std::initializer_list<Cx> amplitudes)
      : PureState(Vec(Eigen::Map<const Vec>(std::data(amplitudes),
                                            static_cast<Eigen::Index>(amplitudes.size())))) {}

  static PureState basis(int dim, int k) {
    detail::require(dim >= 2 && k >= 0 && k < dim, "PureState::basis: bad index");
    Vec v = Vec::Zero(dim);
    v[k] = Cx(1.0, 0.0);
    return PureState(std::move(v));
  }

  int dim() const { return static_cast<int>(amps_.size()); }
  const Vec& amplitudes() const { return amps_; }
  Cx amp(int i) const { return amps_[i]; }

  double norm_sq() const { return amps_.squaredNorm(); }

  bool is_normalized(double tol = kExactTol) const {
    return std::abs(norm_sq() - 1.0) <= tol;
  }

  /// Returns the unit-norm state. Idempotent; a (near-)zero vector is an
  /// error because it signals an upstream logic bug, not a quantum state.
  PureState normalized() const {
    const double n2 = norm_sq();
    detail::require(n2 > 1e-30, "PureState::normalized: zero vector");
    return PureState(amps_ / std::sqrt(n2));
  }

 private:
  Vec amps_;
};

inline Cx overlap(const PureState& a, const PureState& b) {
  detail::require(a.dim() == b.dim(), "overlap: dimension mismatch");
  return a.amplitudes().dot(b.amplitudes());  // conjugates a
}

/// |⟨a|b⟩|² for two pure states.
inline double fidelity_pure(const PureState& a, const PureState& b) {
  return std::norm(overlap(a, b));
}

inline PureState tensor_product(const PureState& a, const PureState& b) {
  Vec out(a.dim() * b.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < b.dim(); ++j) out[i * b.dim() + j] = a.amp(i) * b.amp(j);
  return PureState(std::move(out));
}

/// Possibly-mixed state as a dim×dim matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(Mat entries) : m_(std::move(entries)) {
    detail::require(m_.rows() == m_.cols() && m_.rows() >= 2,
                    "DensityMatrix: square matrix of dim >= 2 required");
  }

  static DensityMatrix from_pure(const PureState& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
  }

  static DensityMatrix maximally_mixed(int dim) {
    return DensityMatrix(Mat::Identity(dim, dim) / static_cast<double>(dim));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& entries() const { return m_; }
  double trace() const { return m_.trace().real(); }

  /// Hermitian within 1e-12, eigenvalues >= -1e-10, and (when `unit_trace`)
  /// trace 1 within 1e-12.
  bool is_valid(bool unit_trace = true) const {
    if (detail::max_abs(m_ - m_.adjoint()) > kExactTol) return false;
    if (detail::min_eigenvalue((m_ + Mat(m_.adjoint())) / 2.0) < -kPsdTol) return false;
    if (unit_trace && std::abs(trace() - 1.0) > kExactTol) return false;
    return true;
  }

  DensityMatrix normalized() const {
    const double t = trace();
    detail::require(t > 1e-30, "DensityMatrix::normalized: zero trace");
    return DensityMatrix(m_ / t);
  }

 private:
  Mat m_;
};

/// ⟨ψ|ρ|ψ⟩.
inline double fidelity(const PureState& psi, const DensityMatrix& rho) {
  detail::require(psi.dim() == rho.dim(), "fidelity: dimension mismatch");
  const Cx v = psi.amplitudes().adjoint() * rho.entries() * psi.amplitudes();
  return v.real();
}

/// Trace-non-increasing quantum operation given by operation elements
/// {K_i}: in_dim -> out_dim, with Σ K_i†K_i ≼ I.
class QuantumOperation {
 public:
  QuantumOperation(int in_dim, int out_dim, std::vector<Mat> elements)
      : in_(in_dim), out_(out_dim), ks_(std::move(elements)) {
    detail::require(in_ >= 2 && out_ >= 2, "QuantumOperation: dims must be >= 2");
    detail::require(!ks_.empty(), "QuantumOperation: no elements");
    for (const Mat& k : ks_)
      detail::require(k.rows() == out_ && k.cols() == in_,
                      "QuantumOperation: element shape mismatch");
    const double top = detail::max_eigenvalue(completeness());
    detail::require(top <= 1.0 + kPsdTol,
                    "QuantumOperation: trace-increasing (largest eigenvalue of sum K†K is " +
                        std::to_string(top) + ")");
  }

  static QuantumOperation identity(int dim) {
    return QuantumOperation(dim, dim, {Mat::Identity(dim, dim)});
  }

  int in_dim() const { return in_; }
  int out_dim() const { return out_; }
  const std::vector<Mat>& elements() const { return ks_; }

  /// Σ K_i†K_i. Equals I iff the operation is deterministic.
  Mat completeness() const {
    Mat s = Mat::Zero(in_, in_);
    for (const Mat& k : ks_) s += k.adjoint() * k;
    return s;
  }

  /// Unnormalized output density matrix Σ K_i ρ K_i†; its trace is the
  /// success probability of the operation on ρ.
  Mat apply_to_density(const Mat& rho) const {
    Mat out = Mat::Zero(out_, out_);
    for (const Mat& k : ks_) out += k * rho * k.adjoint();
    return out;
  }

 private:
  int in_;
  int out_;
  std::vector<Mat> ks_;
};

struct OperationOutcome {
  PureState state;
  double probability;
};

/// Applies the operation branch-by-branch: outcome i is (K_i|s⟩ normalized,
/// ‖K_i|s⟩‖²). Branches with vanishing norm are omitted. Probabilities sum
/// to at most 1 (+ tolerance); the deficit is the failure probability.
inline std::vector<OperationOutcome> apply_operation(const QuantumOperation& op,
                                                     const PureState& s) {
  detail::require(op.in_dim() == s.dim(), "apply_operation: dimension mismatch");
  std::vector<OperationOutcome> outcomes;
  outcomes.reserve(op.elements().size());
  for (const Mat& k : op.elements()) {
    Vec v = k * s.amplitudes();
    const double p = v.squaredNorm();
    if (p > 1e-30) outcomes.push_back({PureState(v / std::sqrt(p)), p});
  }
  return outcomes;
}

/// Positive semidefinite measurement operator.
class PovmElement {
 public:
  explicit PovmElement(Mat matrix) : m_(std::move(matrix)) {
    detail::require(m_.rows() == m_.cols() && m_.rows() >= 2,
                    "PovmElement: square matrix of dim >= 2 required");
    detail::require(detail::max_abs(m_ - m_.adjoint()) <= kPsdTol,
                    "PovmElement: not Hermitian");
    detail::require(detail::min_eigenvalue((m_ + Mat(m_.adjoint())) / 2.0) >= -kPsdTol,
                    "PovmElement: not positive semidefinite");
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }

 private:
  Mat m_;
};

/// Outcome probabilities p_i = ⟨s|Π_i|s⟩ of a complete POVM. The set must
/// sum to identity within 1e-10; incomplete sets are rejected.
inline std::vector<double> measure_povm(const std::vector<PovmElement>& elements,
                                        const PureState& s) {
  detail::require(!elements.empty(), "measure_povm: empty set");
  Mat sum = Mat::Zero(s.dim(), s.dim());
  for (const PovmElement& e : elements) {
    detail::require(e.dim() == s.dim(), "measure_povm: dimension mismatch");
    sum += e.matrix();
  }
  detail::require(detail::max_abs(sum - Mat::Identity(s.dim(), s.dim())) <= kPsdTol,
                  "measure_povm: POVM does not sum to identity");
  std::vector<double> probs;
  probs.reserve(elements.size());
  for (const PovmElement& e : elements) {
    const Cx v = s.amplitudes().adjoint() * e.matrix() * s.amplitudes();
    probs.push_back(std::max(v.real(), 0.0));
  }
  return probs;
}

/// Partial trace of a bipartite density matrix with subsystem dims (d1, d2);
/// keep = 1 retains the first subsystem, keep = 2 the second.
inline DensityMatrix partial_trace(const DensityMatrix& rho, int d1, int d2, int keep) {
  detail::require(d1 >= 2 && d2 >= 2 && d1 * d2 == rho.dim(),
                  "partial_trace: dimension mismatch");
  detail::require(keep == 1 || keep == 2, "partial_trace: keep must be 1 or 2");
  const Mat& m = rho.entries();
  if (keep == 1) {
    Mat out = Mat::Zero(d1, d1);
    for (int i = 0; i < d1; ++i)
      for (int j = 0; j < d1; ++j)
        for (int k = 0; k < d2; ++k) out(i, j) += m(i * d2 + k, j * d2 + k);
    return DensityMatrix(std::move(out));
  }
  Mat out = Mat::Zero(d2, d2);
  for (int i = 0; i < d2; ++i)
    for (int j = 0; j < d2; ++j)
      for (int k = 0; k < d1; ++k) out(i, j) += m(k * d2 + i, k * d2 + j);
  return DensityMatrix(std::move(out));
}

/// Point on the Bloch sphere, theta in [0, pi], phi in [0, 2*pi).
/// phi is wrapped on construction; theta is validated.
struct BlochAngles {
  double theta;
  double phi;

  BlochAngles(double theta_rad, double phi_rad) : theta(theta_rad), phi(phi_rad) {
    detail::require(theta >= 0.0 && theta <= kPi, "BlochAngles: theta outside [0, pi]");
    phi = std::fmod(phi, 2.0 * kPi);
    if (phi < 0.0) phi += 2.0 * kPi;
  }

  static BlochAngles from_degrees(double theta_deg, double phi_deg) {
    return BlochAngles(theta_deg * kPi / 180.0, phi_deg * kPi / 180.0);
  }

  /// cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.
  PureState to_state() const {
    Vec v(2);
    v[0] = Cx(std::cos(theta / 2.0), 0.0);
    v[1] = std::polar(std::sin(theta / 2.0), phi);
    return PureState(std::move(v));
  }
};

using RandomStream = std::mt19937_64;

/// Uniform point on the Bloch sphere: cos θ uniform on [-1, 1], φ uniform on
/// [0, 2π). All randomness flows through the caller-owned stream.
inline BlochAngles sample_bloch_uniform(RandomStream& rng) {
  std::uniform_real_distribution<double> cos_theta(-1.0, 1.0);
  std::uniform_real_distribution<double> phi(0.0, 2.0 * kPi);
  return BlochAngles(std::acos(cos_theta(rng)), phi(rng));
}

}  // namespace qupack
