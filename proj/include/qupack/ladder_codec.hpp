#pragma once

#include <cmath>
#include <vector>

#include "qupack/qutrit_codec.hpp"
#include "qupack/statekit.hpp"

namespace qupack::ladder {

// Packs N d-level systems into a single [N(d-1)+1]-level system so that any
// one of them can later be recovered exactly, with some probability.
//
// The kept product-basis configurations form a ladder: a prefix of ground
// states |0⟩, at most one transitional system at level m, and a suffix of
// top states |d-1⟩. Such a configuration is indexed by its total level sum
// j ∈ {0, ..., N(d-1)}, which becomes the code level |j⟩. For d = 2 this is
// the chain |0...0⟩, |0...01⟩, |0...011⟩, ..., |1...1⟩, and for N = 2 the
// two-qubit codec above. The general-(N, d) construction is the extension
// of those two instances that keeps one kept configuration per code level;
// its correctness properties here are internal consistency and exact
// reductions to the two base cases.

struct LadderCode {
  int n_systems;  // >= 1
  int local_dim;  // >= 2

  int code_dim() const { return n_systems * (local_dim - 1) + 1; }
};

struct QuditEncodeResult {
  PureState state;
  double success_probability;
};

namespace detail_ladder {

// Level of system `pos` (1-based) in the kept configuration of code level j.
inline int config_level(int j, int pos, int n_systems, int local_dim) {
  const int step = local_dim - 1;
  const int b = j / step;        // number of fully raised systems at the tail
  const int m = j % step;        // level of the transitional system
  if (pos > n_systems - b) return step;
  if (pos == n_systems - b) return m;
  return 0;
}

}  // namespace detail_ladder

inline QuditEncodeResult encode_qudits(const std::vector<PureState>& inputs) {
  detail::require(!inputs.empty(), "encode_qudits: no inputs");
  const int n = static_cast<int>(inputs.size());
  const int d = inputs[0].dim();
  for (const PureState& s : inputs) {
    detail::require(s.dim() == d, "encode_qudits: mixed local dimensions");
    detail::require(s.is_normalized(1e-9), "encode_qudits: inputs must be normalized");
  }
  const LadderCode code{n, d};
  Vec v(code.code_dim());
  for (int j = 0; j < code.code_dim(); ++j) {
    Cx a(1.0, 0.0);
    for (int pos = 1; pos <= n; ++pos)
      a *= inputs[pos - 1].amp(detail_ladder::config_level(j, pos, n, d));
    v[j] = a;
  }
  const double p = v.squaredNorm();
  if (p < codec::kEncodeFailureFloor)
    throw encoding_failure("encode_qudits: encoding always fails for this input");
  return {PureState(v / std::sqrt(p)), p};
}

/// Recovers system `n` (1-based) from a ladder-encoded state. The success
/// projector spans the d consecutive code levels in which system n is the
/// transitional one; relabeling them as local levels 0..d-1 returns the
/// original system exactly whenever the success probability is nonzero.
inline codec::SingleDecodeResult decode_nth_qudit(const PureState& state, int n,
                                                  const LadderCode& code) {
  detail::require(state.dim() == code.code_dim(), "decode_nth_qudit: dimension mismatch");
  detail::require(n >= 1 && n <= code.n_systems, "decode_nth_qudit: n out of range");
  const int d = code.local_dim;
  const int start = (code.n_systems - n) * (d - 1);
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = state.amp(start + i);
  const double p = v.squaredNorm();
  if (p <= 1e-30) return {PureState::basis(d, 0), 0.0};
  return {PureState(v / std::sqrt(p)), p};
}

inline QuditEncodeResult encode_n_qubits(const std::vector<PureState>& qubits) {
  for (const PureState& q : qubits)
    detail::require(q.dim() == 2, "encode_n_qubits: qubit inputs required");
  return encode_qudits(qubits);
}

inline codec::SingleDecodeResult decode_nth_qubit(const PureState& state, int n) {
  return decode_nth_qudit(state, n, LadderCode{state.dim() - 1, 2});
}

/// Two-qutrit instance: kept amplitudes (α1α2, α1β2, α1γ2, β1γ2, γ1γ2) in a
/// five-level system.
inline QuditEncodeResult encode_two_qutrits(const PureState& t1, const PureState& t2) {
  detail::require(t1.dim() == 3 && t2.dim() == 3, "encode_two_qutrits: qutrit inputs required");
  return encode_qudits({t1, t2});
}

/// which = 1 projects onto levels {2,3,4}, which = 2 onto levels {0,1,2}.
inline codec::SingleDecodeResult decode_qutrit(const PureState& state, int which) {
  detail::require(state.dim() == 5, "decode_qutrit: five-level input required");
  detail::require(which == 1 || which == 2, "decode_qutrit: which must be 1 or 2");
  return decode_nth_qudit(state, which, LadderCode{2, 3});
}

/// Complement of the kept-configuration subspace for d = 2: the squared
/// overlap of ⊗qubits with the filtered-out configurations. Used to check
/// that encode success equals 1 minus the filtered weight.
inline double filtered_weight_n_qubits(const std::vector<PureState>& qubits) {
  const int n = static_cast<int>(qubits.size());
  double filtered = 0.0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    // Kept masks have all raised qubits in a suffix: mask == suffix of 1s.
    bool kept = true;
    bool seen_one = false;
    for (int pos = 0; pos < n; ++pos) {
      const bool bit = (mask >> (n - 1 - pos)) & 1;  // pos 0 = first qubit
      if (bit) seen_one = true;
      else if (seen_one) kept = false;
    }
    if (kept) continue;
    double w = 1.0;
    for (int pos = 0; pos < n; ++pos) {
      const bool bit = (mask >> (n - 1 - pos)) & 1;
      w *= std::norm(qubits[pos].amp(bit ? 1 : 0));
    }
    filtered += w;
  }
  return filtered;
}

}  // namespace qupack::ladder
