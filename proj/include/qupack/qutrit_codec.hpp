#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qupack/statekit.hpp"

namespace qupack::codec {

// Probabilistic two-qubit -> qutrit codec.
//
// Encoding map on the product basis (first qubit most significant):
//   |00⟩ -> |0⟩,  |01⟩ -> |1⟩,  |11⟩ -> |2⟩,  |10⟩ filtered out.
// For inputs (α1,β1)⊗(α2,β2) the kept amplitudes are
// (α1α2, α1β2, β1β2) with success probability N = 1 - |β1|²|α2|².
//
// Either qubit can later be recovered error-free by projecting onto the
// two qutrit levels that carry it; recovering both at once is possible
// only approximately, via the joint map
//   |0⟩ -> (1/√2)|00⟩,  |1⟩ -> |01⟩,  |2⟩ -> (1/√2)|11⟩.

struct EncodeResult {
  PureState qutrit;            // dim 3
  double success_probability;  // N
};

struct SingleDecodeResult {
  PureState qubit;             // dim 2; |0⟩ placeholder when probability is 0
  double success_probability;
};

struct JointDecodeResult {
  PureState two_qubit_state;   // dim 4, basis {00,01,10,11}
  double success_probability;
  DensityMatrix qubit1;        // partial traces of two_qubit_state
  DensityMatrix qubit2;
};

inline constexpr double kEncodeFailureFloor = 1e-15;

inline EncodeResult encode(const PureState& q1, const PureState& q2) {
  detail::require(q1.dim() == 2 && q2.dim() == 2, "encode: qubit inputs required");
  detail::require(q1.is_normalized(1e-9) && q2.is_normalized(1e-9),
                  "encode: inputs must be normalized");
  Vec v(3);
  v[0] = q1.amp(0) * q2.amp(0);
  v[1] = q1.amp(0) * q2.amp(1);
  v[2] = q1.amp(1) * q2.amp(1);
  const double n = v.squaredNorm();  // = 1 - |β1|²|α2|²
  if (n < kEncodeFailureFloor)
    throw encoding_failure("encode: encoding always fails for |1⟩⊗|0⟩");
  return {PureState(v / std::sqrt(n)), n};
}

/// The encoding as an explicit 3x4 operation element (second route to the
/// same map, used for cross-checks and decoder searches).
inline QuantumOperation encoder_operation() {
  Mat k = Mat::Zero(3, 4);
  k(0, 0) = 1.0;  // |00⟩ -> |0⟩
  k(1, 1) = 1.0;  // |01⟩ -> |1⟩
  k(2, 3) = 1.0;  // |11⟩ -> |2⟩
  return QuantumOperation(4, 3, {std::move(k)});
}

/// Success/failure projector pair for recovering qubit `which` from the
/// qutrit: Π₁₊ spans levels {1,2}, Π₂₊ spans {0,1}.
inline std::array<PovmElement, 2> single_decoder_povm(int which) {
  detail::require(which == 1 || which == 2, "single_decoder_povm: which must be 1 or 2");
  Mat plus = Mat::Zero(3, 3);
  if (which == 1) {
    plus(1, 1) = 1.0;
    plus(2, 2) = 1.0;
  } else {
    plus(0, 0) = 1.0;
    plus(1, 1) = 1.0;
  }
  Mat minus = Mat::Identity(3, 3) - plus;
  return {PovmElement(std::move(plus)), PovmElement(std::move(minus))};
}

/// Projects onto the success subspace for qubit `which` and relabels the
/// surviving qutrit levels as qubit basis states: for which = 1 levels
/// (1,2) -> (|0⟩,|1⟩), for which = 2 levels (0,1) -> (|0⟩,|1⟩). On the
/// encoded state this returns the original qubit exactly. A zero-probability
/// success branch is reported as probability 0 (qubit content unspecified).
inline SingleDecodeResult decode_single(const PureState& qutrit, int which) {
  detail::require(qutrit.dim() == 3, "decode_single: qutrit input required");
  detail::require(which == 1 || which == 2, "decode_single: which must be 1 or 2");
  const int lo = (which == 1) ? 1 : 0;
  Vec v(2);
  v[0] = qutrit.amp(lo);
  v[1] = qutrit.amp(lo + 1);
  const double p = v.squaredNorm();
  if (p <= 1e-30) return {PureState::basis(2, 0), 0.0};
  return {PureState(v / std::sqrt(p)), p};
}

/// Joint retrieval of both qubits from the qutrit (a,b,c): success branch is
/// (a/√2, b, 0, c/√2) renormalized, success probability |a|²/2 + |b|² + |c|²/2.
inline JointDecodeResult decode_joint(const PureState& qutrit) {
  detail::require(qutrit.dim() == 3, "decode_joint: qutrit input required");
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  Vec v(4);
  v[0] = qutrit.amp(0) * inv_sqrt2;
  v[1] = qutrit.amp(1);
  v[2] = 0.0;
  v[3] = qutrit.amp(2) * inv_sqrt2;
  const double p = v.squaredNorm();
  detail::require(p > 1e-30, "decode_joint: zero-probability branch");
  PureState out(v / std::sqrt(p));
  DensityMatrix rho = DensityMatrix::from_pure(out);
  return {out, p, partial_trace(rho, 2, 2, 1), partial_trace(rho, 2, 2, 2)};
}

/// The joint retrieval as an explicit 4x3 operation element.
inline QuantumOperation joint_decoder_operation() {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  Mat k = Mat::Zero(4, 3);
  k(0, 0) = inv_sqrt2;
  k(1, 1) = 1.0;
  k(3, 2) = inv_sqrt2;
  return QuantumOperation(3, 4, {std::move(k)});
}

/// Success probability of encode + joint decode for a fixed first qubit at
/// polar angle theta, averaged over the second qubit: 1/4 + cos²(θ/2)/2.
inline double p1_analytic(double theta) {
  detail::require(theta >= 0.0 && theta <= kPi, "p1_analytic: theta outside [0, pi]");
  const double c = std::cos(theta / 2.0);
  return 0.25 + 0.5 * c * c;
}

/// Success-weighted fidelity of the jointly retrieved first qubit at polar
/// angle theta, averaged over the second qubit:
///   (1 + 2cos⁴(θ/2) + ((√2-1)/2) sin²θ) / (1 + 2cos²(θ/2)).
inline double f1_analytic(double theta) {
  detail::require(theta >= 0.0 && theta <= kPi, "f1_analytic: theta outside [0, pi]");
  const double c2 = std::pow(std::cos(theta / 2.0), 2);
  const double s = std::sin(theta);
  const double num = 1.0 + 2.0 * c2 * c2 + 0.5 * (std::sqrt(2.0) - 1.0) * s * s;
  return num / (1.0 + 2.0 * c2);
}

struct AveragePerformance {
  // Encode + single-qubit decode success probability, averaged over
  // Bloch-uniform input pairs (mean of the qubit-1 and qubit-2 variants).
  double single_success;
  double single_success_se;
  // Encode + joint decode.
  double joint_success;
  double joint_success_se;
  // Per-qubit joint fidelity, success-probability-weighted:
  // Σ w·(F1+F2)/2 / Σ w with w the combined success probability.
  double joint_fidelity_weighted;
  double joint_fidelity_weighted_se;
  // Same fidelity averaged uniformly over inputs (reported for
  // transparency; the weighted variant is the headline number).
  double joint_fidelity_unweighted;
  long long samples;
};

/// Monte Carlo over Bloch-uniform (q1, q2) pairs through the full pipeline.
inline AveragePerformance average_performance(long long n_samples, std::uint64_t seed) {
  detail::require(n_samples >= 1, "average_performance: n_samples must be positive");
  RandomStream rng(seed);
  double sum_single = 0.0, sum_single_sq = 0.0;
  double sum_w = 0.0, sum_w_sq = 0.0;
  double sum_wf = 0.0, sum_wf_sq = 0.0, sum_w_wf = 0.0;
  double sum_f = 0.0;
  long long n_f = 0;
  for (long long i = 0; i < n_samples; ++i) {
    const PureState q1 = sample_bloch_uniform(rng).to_state();
    const PureState q2 = sample_bloch_uniform(rng).to_state();
    double w_single = 0.0, w_joint = 0.0, wf_joint = 0.0;
    try {
      const EncodeResult enc = encode(q1, q2);
      const SingleDecodeResult dec1 = decode_single(enc.qutrit, 1);
      const SingleDecodeResult dec2 = decode_single(enc.qutrit, 2);
      w_single = enc.success_probability *
                 0.5 * (dec1.success_probability + dec2.success_probability);
      const JointDecodeResult joint = decode_joint(enc.qutrit);
      w_joint = enc.success_probability * joint.success_probability;
      const double f = 0.5 * (fidelity(q1, joint.qubit1) + fidelity(q2, joint.qubit2));
      wf_joint = w_joint * f;
      sum_f += f;
      ++n_f;
    } catch (const encoding_failure&) {
      // Measure-zero input with N = 0: contributes zero weight.
    }
    sum_single += w_single;
    sum_single_sq += w_single * w_single;
    sum_w += w_joint;
    sum_w_sq += w_joint * w_joint;
    sum_wf += wf_joint;
    sum_wf_sq += wf_joint * wf_joint;
    sum_w_wf += w_joint * wf_joint;
  }
  const double n = static_cast<double>(n_samples);
  AveragePerformance out{};
  out.samples = n_samples;
  out.single_success = sum_single / n;
  out.single_success_se =
      std::sqrt(std::max(sum_single_sq / n - out.single_success * out.single_success, 0.0) / n);
  out.joint_success = sum_w / n;
  out.joint_success_se =
      std::sqrt(std::max(sum_w_sq / n - out.joint_success * out.joint_success, 0.0) / n);
  out.joint_fidelity_weighted = sum_wf / sum_w;
  // Delta-method standard error of the ratio estimator Σwf / Σw.
  const double r = out.joint_fidelity_weighted;
  const double var_num = sum_wf_sq / n - (sum_wf / n) * (sum_wf / n);
  const double var_den = sum_w_sq / n - (sum_w / n) * (sum_w / n);
  const double cov = sum_w_wf / n - (sum_w / n) * (sum_wf / n);
  const double var_ratio =
      (var_num - 2.0 * r * cov + r * r * var_den) / (n * (sum_w / n) * (sum_w / n));
  out.joint_fidelity_weighted_se = std::sqrt(std::max(var_ratio, 0.0));
  out.joint_fidelity_unweighted = (n_f > 0) ? sum_f / static_cast<double>(n_f) : 0.0;
  return out;
}

struct CurvePoint {
  double theta;
  double success;      // Monte Carlo mean of the combined success probability
  double success_se;
  double fidelity;     // success-weighted retrieved-qubit-1 fidelity
  double fidelity_se;
};

/// Monte Carlo estimate of the joint encode/decode success probability and
/// weighted fidelity for a fixed first qubit (theta, phi) with the second
/// qubit Bloch-uniform. Companions to p1_analytic / f1_analytic.
inline CurvePoint joint_curve_mc(double theta, double phi, long long n_samples,
                                 std::uint64_t seed) {
  detail::require(n_samples >= 1, "joint_curve_mc: n_samples must be positive");
  RandomStream rng(seed);
  const PureState q1 = BlochAngles(theta, phi).to_state();
  double sum_w = 0.0, sum_w_sq = 0.0, sum_wf = 0.0, sum_wf_sq = 0.0, sum_w_wf = 0.0;
  for (long long i = 0; i < n_samples; ++i) {
    const PureState q2 = sample_bloch_uniform(rng).to_state();
    double w = 0.0, wf = 0.0;
    try {
      const EncodeResult enc = encode(q1, q2);
      const JointDecodeResult joint = decode_joint(enc.qutrit);
      w = enc.success_probability * joint.success_probability;
      wf = w * fidelity(q1, joint.qubit1);
    } catch (const encoding_failure&) {
    }
    sum_w += w;
    sum_w_sq += w * w;
    sum_wf += wf;
    sum_wf_sq += wf * wf;
    sum_w_wf += w * wf;
  }
  const double n = static_cast<double>(n_samples);
  CurvePoint pt{};
  pt.theta = theta;
  pt.success = sum_w / n;
  pt.success_se = std::sqrt(std::max(sum_w_sq / n - pt.success * pt.success, 0.0) / n);
  pt.fidelity = sum_wf / sum_w;
  const double r = pt.fidelity;
  const double var_num = sum_wf_sq / n - (sum_wf / n) * (sum_wf / n);
  const double var_den = sum_w_sq / n - (sum_w / n) * (sum_w / n);
  const double cov = sum_w_wf / n - (sum_w / n) * (sum_wf / n);
  const double var_ratio =
      (var_num - 2.0 * r * cov + r * r * var_den) / (n * (sum_w / n) * (sum_w / n));
  pt.fidelity_se = std::sqrt(std::max(var_ratio, 0.0));
  return pt;
}

}  // namespace qupack::codec
