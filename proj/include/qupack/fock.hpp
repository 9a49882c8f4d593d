#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qupack/statekit.hpp"

namespace qupack::fock {

// Few-photon Fock-layer simulation over named fiber modes.
//
// A state is a complex combination of occupation-number terms. Couplers act
// on creation operators, so two-photon interference falls out of the
// amplitude algebra; attenuators branch photons into per-mode loss modes so
// the total norm is conserved and probability bookkeeping stays exact.
// This artifact never carries more than two photons at once; the cap is
// enforced at photon creation.

inline constexpr int kMaxTotalPhotons = 2;

using Occupation = std::vector<std::uint8_t>;
using TermMap = std::map<Occupation, Cx>;

class FockState {
 public:
  static FockState vacuum() {
    FockState s;
    s.terms_[Occupation{}] = Cx(1.0, 0.0);
    return s;
  }

  const std::vector<std::string>& modes() const { return modes_; }
  const TermMap& terms() const { return terms_; }

  bool has_mode(const std::string& name) const { return mode_index(name) >= 0; }

  int mode_index(const std::string& name) const {
    for (std::size_t i = 0; i < modes_.size(); ++i)
      if (modes_[i] == name) return static_cast<int>(i);
    return -1;
  }

  /// Index of `name`, registering it (and zero-padding all terms) if new.
  int ensure_mode(const std::string& name) {
    const int existing = mode_index(name);
    if (existing >= 0) return existing;
    modes_.push_back(name);
    TermMap grown;
    for (const auto& [occ, amp] : terms_) {
      Occupation o = occ;
      o.push_back(0);
      grown.emplace(std::move(o), amp);
    }
    terms_ = std::move(grown);
    return static_cast<int>(modes_.size()) - 1;
  }

  /// Swaps in a fresh term map (same mode registry), dropping zero entries.
  void replace_terms(TermMap next) {
    terms_.clear();
    for (auto& [occ, amp] : next)
      if (std::abs(amp) >= 1e-30) terms_.emplace(occ, amp);
  }

  /// Applies Σ_k amps[k]·a†(mode_k). Zero-amplitude entries are skipped and
  /// their modes left unregistered.
  FockState& create(const std::vector<std::pair<std::string, Cx>>& superposition) {
    std::vector<std::pair<int, Cx>> live;
    for (const auto& [name, amp] : superposition)
      if (amp != Cx(0.0, 0.0)) live.emplace_back(ensure_mode(name), amp);
    detail::require(!live.empty(), "FockState::create: all amplitudes vanish");
    TermMap next;
    for (const auto& [occ, c] : terms_) {
      int total = 0;
      for (std::uint8_t n : occ) total += n;
      detail::require(total + 1 <= kMaxTotalPhotons,
                      "FockState::create: photon cap exceeded");
      for (const auto& [idx, amp] : live) {
        Occupation o = occ;
        const double boson = std::sqrt(static_cast<double>(o[idx]) + 1.0);
        o[idx] += 1;
        next[o] += c * amp * boson;
      }
    }
    replace_terms(std::move(next));
    return *this;
  }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& [occ, amp] : terms_) s += std::norm(amp);
    return s;
  }

  bool empty() const { return terms_.empty(); }

  FockState normalized() const {
    const double n2 = norm_sq();
    detail::require(n2 > 1e-30, "FockState::normalized: zero state");
    FockState out = *this;
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& [occ, amp] : out.terms_) amp *= inv;
    return out;
  }

  /// Amplitude of the term with exactly the given per-mode counts (all other
  /// registered modes zero). Unregistered modes count as zero occupancy.
  Cx amplitude_of(const std::vector<std::pair<std::string, int>>& counts) const {
    Occupation occ(modes_.size(), 0);
    for (const auto& [name, n] : counts) {
      const int idx = mode_index(name);
      if (idx < 0) {
        if (n != 0) return Cx(0.0, 0.0);
        continue;
      }
      occ[idx] = static_cast<std::uint8_t>(n);
    }
    const auto it = terms_.find(occ);
    return (it == terms_.end()) ? Cx(0.0, 0.0) : it->second;
  }

 private:
  std::vector<std::string> modes_;
  TermMap terms_;
};

/// Lookup view over one term's occupation, keyed by mode name.
class ModeCounts {
 public:
  ModeCounts(const FockState& state, const Occupation& occ) : state_(state), occ_(occ) {}

  int operator()(const std::string& mode) const {
    const int idx = state_.mode_index(mode);
    return (idx < 0) ? 0 : static_cast<int>(occ_[idx]);
  }

  int total() const {
    int t = 0;
    for (std::uint8_t n : occ_) t += n;
    return t;
  }

 private:
  const FockState& state_;
  const Occupation& occ_;
};

/// Two-mode fiber coupler. The single-photon transfer matrix uses the
/// symmetric convention: reflected amplitude √R on both through ports,
/// transmitted amplitude i√T on both cross ports (unitary for T = 1-R).
struct CouplerSpec {
  std::string mode_a;
  std::string mode_b;
  double reflectance;

  CouplerSpec(std::string a, std::string b, double r)
      : mode_a(std::move(a)), mode_b(std::move(b)), reflectance(r) {
    detail::require(reflectance >= 0.0 && reflectance <= 1.0,
                    "CouplerSpec: reflectance outside [0, 1]");
    detail::require(mode_a != mode_b, "CouplerSpec: identical modes");
  }

  Eigen::Matrix2cd single_photon_unitary() const {
    const double r = std::sqrt(reflectance);
    const double t = std::sqrt(1.0 - reflectance);
    Eigen::Matrix2cd u;
    u << Cx(r, 0.0), Cx(0.0, t), Cx(0.0, t), Cx(r, 0.0);
    return u;
  }
};

namespace detail_fock {

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

inline double binomial(int n, int k) {
  return factorial(n) / (factorial(k) * factorial(n - k));
}

inline Cx ipow(Cx base, int e) {
  Cx r(1.0, 0.0);
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace detail_fock

/// Rewrites creation operators on the coupler's two modes:
///   a† -> √R a† + i√T b†,  b† -> i√T a† + √R b†.
/// Norm-preserving; two-photon interference emerges from the expansion.
inline FockState apply_coupler(const FockState& state, const CouplerSpec& spec) {
  FockState out = state;
  const int ia = out.ensure_mode(spec.mode_a);
  const int ib = out.ensure_mode(spec.mode_b);
  const Eigen::Matrix2cd u = spec.single_photon_unitary();
  const Cx x = u(0, 0), y = u(1, 0);  // image of a†
  const Cx z = u(0, 1), w = u(1, 1);  // image of b†
  TermMap next;
  for (const auto& [occ, c] : out.terms()) {
    const int p = occ[ia];
    const int q = occ[ib];
    if (p + q == 0) {
      next[occ] += c;
      continue;
    }
    const double norm_in =
        std::sqrt(detail_fock::factorial(p) * detail_fock::factorial(q));
    for (int k = 0; k <= p; ++k) {
      for (int l = 0; l <= q; ++l) {
        const int m = k + l;      // photons ending in mode_a
        const int n = p + q - m;  // photons ending in mode_b
        Cx coeff = c * detail_fock::binomial(p, k) * detail_fock::binomial(q, l) *
                   detail_fock::ipow(x, k) * detail_fock::ipow(y, p - k) *
                   detail_fock::ipow(z, l) * detail_fock::ipow(w, q - l);
        coeff *= std::sqrt(detail_fock::factorial(m) * detail_fock::factorial(n)) / norm_in;
        Occupation o = occ;
        o[ia] = static_cast<std::uint8_t>(m);
        o[ib] = static_cast<std::uint8_t>(n);
        next[o] += coeff;
      }
    }
  }
  out.replace_terms(std::move(next));
  return out;
}

/// Phase shifter: each term gains e^{i·phi·n} for n photons in `mode`.
inline FockState apply_phase(const FockState& state, const std::string& mode, double phi) {
  FockState out = state;
  const int idx = out.mode_index(mode);
  if (idx < 0) return out;
  TermMap next;
  for (const auto& [occ, c] : out.terms())
    next[occ] = c * std::polar(1.0, phi * static_cast<double>(occ[idx]));
  out.replace_terms(std::move(next));
  return out;
}

/// Attenuator with intensity transmission eta on `mode`. Lost photons are
/// routed into the dedicated loss mode `mode + "~loss"`, so the state stays
/// normalized and the loss probability is exactly accounted for.
inline FockState apply_attenuator(const FockState& state, const std::string& mode,
                                  double eta) {
  detail::require(eta >= 0.0 && eta <= 1.0 + 1e-12,
                  "apply_attenuator: eta outside [0, 1]");
  eta = std::min(eta, 1.0);
  FockState out = state;
  const int idx = out.mode_index(mode);
  if (idx < 0 || eta == 1.0) return out;
  const int loss = out.ensure_mode(mode + "~loss");
  TermMap next;
  for (const auto& [occ, c] : out.terms()) {
    const int n = occ[idx];
    if (n == 0) {
      next[occ] += c;
      continue;
    }
    for (int k = 0; k <= n; ++k) {
      const double w = std::sqrt(detail_fock::binomial(n, k) * std::pow(eta, k) *
                                 std::pow(1.0 - eta, n - k));
      Occupation o = occ;
      o[idx] = static_cast<std::uint8_t>(k);
      o[loss] = static_cast<std::uint8_t>(o[loss] + (n - k));
      next[o] += c * w;
    }
  }
  out.replace_terms(std::move(next));
  return out;
}

/// Keeps only terms whose occupation satisfies `keep`. The result is
/// unnormalized; its squared norm is the sector probability.
inline FockState postselect(const FockState& state,
                            const std::function<bool(const ModeCounts&)>& keep) {
  FockState out = state;
  TermMap next;
  for (const auto& [occ, c] : state.terms())
    if (keep(ModeCounts(state, occ))) next[occ] = c;
  out.replace_terms(std::move(next));
  return out;
}

/// Reduced density matrix of a post-selected state over logical slots.
///
/// Every term must hold exactly one photon among the union of `groups`;
/// group index = logical basis index. Everything else — the remaining
/// occupation pattern and the species tag of the slot photon (as classified
/// by `species_of`) — is environment: amplitudes are summed coherently
/// within an environment key and combined incoherently across keys. The
/// result is unnormalized; its trace is the probability that the photon is
/// in one of the groups at all.
inline Mat conditional_density(const FockState& state,
                               const std::vector<std::vector<std::string>>& groups,
                               const std::function<int(const std::string&)>& species_of) {
  const int dim = static_cast<int>(groups.size());
  std::vector<std::vector<int>> group_indices(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (const std::string& name : groups[g]) {
      const int idx = state.mode_index(name);
      if (idx >= 0) group_indices[g].push_back(idx);
    }
  std::map<std::pair<Occupation, int>, Vec> sectors;
  for (const auto& [occ, c] : state.terms()) {
    int slot = -1, mode = -1, found = 0;
    for (std::size_t g = 0; g < group_indices.size(); ++g)
      for (int idx : group_indices[g]) {
        found += occ[idx];
        if (occ[idx] > 0) {
          slot = static_cast<int>(g);
          mode = idx;
        }
      }
    detail::require(found == 1,
                    "conditional_density: term does not hold exactly one slot photon");
    Occupation env = occ;
    env[mode] -= 1;
    const int species = species_of(state.modes()[mode]);
    auto [it, inserted] = sectors.try_emplace({std::move(env), species}, Vec());
    if (inserted) it->second = Vec::Zero(dim);
    it->second[slot] += c;
  }
  Mat rho = Mat::Zero(dim, dim);
  for (const auto& [key, v] : sectors) rho += v * v.adjoint();
  return rho;
}

}  // namespace qupack::fock
