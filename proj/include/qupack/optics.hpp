#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qupack/fock.hpp"
#include "qupack/statekit.hpp"

namespace qupack::optics {

// Fiber-optical realization of the two-qubit -> qutrit encoding.
//
// Mode layout: qubit 1 is a photon across fibers (f1, f2) with logical
// |0⟩ ↔ f2 and |1⟩ ↔ f1; qubit 2 across (f3, f4) with |0⟩ ↔ f4 and
// |1⟩ ↔ f3. A variable-ratio coupler mixes f2 and f3; detecting exactly
// one photon in f3 heralds the encoding, and the remaining photon across
// (f4, f2, f1) carries the qutrit levels (0, 1, 2).
//
// Partially distinguishable photons are handled by splitting the second
// photon's amplitude between the shared mode set and a twin set suffixed
// "@2": the cross terms then interfere with weight mode_overlap, the rest
// adds incoherently.

inline const std::string kSpeciesSuffix = "@2";

inline int species_of_mode(const std::string& mode) {
  return (mode.size() >= kSpeciesSuffix.size() &&
          mode.compare(mode.size() - kSpeciesSuffix.size(), kSpeciesSuffix.size(),
                       kSpeciesSuffix) == 0)
             ? 1
             : 0;
}

/// Setup imperfections. mode_overlap is the two-photon indistinguishability
/// (the dip depth a balanced coupler would show); mz_visibility is the
/// first-order interference contrast of the verification interferometer,
/// which is a separately aligned quantity in this setup.
struct ImperfectionParams {
  double mode_overlap = 1.0;
  double mz_visibility = 1.0;
  double phase_drift_rate = 0.0;     // radians per second
  double detector_efficiency = 1.0;  // per detector
  double dark_count_rate = 0.0;      // counts per second
  double coincidence_window = 2e-9;  // seconds

  void validate() const {
    detail::require(mode_overlap >= 0.0 && mode_overlap <= 1.0,
                    "ImperfectionParams: mode_overlap outside [0, 1]");
    detail::require(mz_visibility >= 0.0 && mz_visibility <= 1.0,
                    "ImperfectionParams: mz_visibility outside [0, 1]");
    detail::require(phase_drift_rate >= 0.0,
                    "ImperfectionParams: phase_drift_rate must be >= 0");
    detail::require(detector_efficiency >= 0.0 && detector_efficiency <= 1.0,
                    "ImperfectionParams: detector_efficiency outside [0, 1]");
    detail::require(dark_count_rate >= 0.0,
                    "ImperfectionParams: dark_count_rate must be >= 0");
    detail::require(coincidence_window >= 0.0,
                    "ImperfectionParams: coincidence_window must be >= 0");
  }
};

struct CoincidenceRecord {
  double c_plus;   // expected D1–D3 coincidence rate, 1/s
  double c_minus;  // expected D2–D3 coincidence rate, 1/s
};

/// Damping applied in f1 to reshape the post-selected amplitudes: (R-T)²/R.
inline double damping_eta1(double r) {
  detail::require(r > 0.0 && r < 1.0, "damping_eta1: R outside (0, 1)");
  const double d = 1.0 - 2.0 * r;  // T - R
  return d * d / r;
}

/// Damping applied in f4: (R-T)²/T.
inline double damping_eta4(double r) {
  detail::require(r > 0.0 && r < 1.0, "damping_eta4: R outside (0, 1)");
  const double d = 1.0 - 2.0 * r;
  return d * d / (1.0 - r);
}

struct EncodedFock {
  fock::FockState state;       // post-selected and normalized; empty if failed
  double success_probability;  // includes filtration when filters applied
};

/// Runs the source-to-herald pipeline: dual-rail preparation, the coupler on
/// (f2, f3), optional damping filters with their compensating phases, and
/// post-selection on one photon in f3 plus one photon left in {f1, f2, f4}.
///
/// With filters the surviving photon is the target qutrit exactly; without
/// them the amplitudes are (i√T α1α2, (R-T) α1β2, √R β1β2), i.e. the raw
/// coupler-convention pattern.
inline EncodedFock encode_fock(const BlochAngles& q1, const BlochAngles& q2, double r,
                               bool apply_filters, double mode_overlap = 1.0) {
  detail::require(r > 0.0 && r < 1.0, "encode_fock: R outside (0, 1)");
  detail::require(mode_overlap >= 0.0 && mode_overlap <= 1.0,
                  "encode_fock: mode_overlap outside [0, 1]");
  const double t = 1.0 - r;
  double eta1 = 1.0, eta4 = 1.0;
  if (apply_filters) {
    if (std::abs(r - t) < 1e-9)
      throw encoding_failure("encode_fock: balanced coupler cannot encode");
    eta1 = damping_eta1(r);
    eta4 = damping_eta4(r);
    detail::require(eta1 <= 1.0 + 1e-12 && eta4 <= 1.0 + 1e-12,
                    "encode_fock: damping factor exceeds 1 at this splitting ratio");
  }

  const PureState s1 = q1.to_state();
  const PureState s2 = q2.to_state();
  const double x = std::sqrt(mode_overlap);        // shared-mode weight
  const double y = std::sqrt(1.0 - mode_overlap);  // orthogonal-species weight

  fock::FockState st = fock::FockState::vacuum();
  st.create({{"f2", s1.amp(0)}, {"f1", s1.amp(1)}});
  st.create({{"f4", x * s2.amp(0)},
             {"f3", x * s2.amp(1)},
             {"f4" + kSpeciesSuffix, y * s2.amp(0)},
             {"f3" + kSpeciesSuffix, y * s2.amp(1)}});

  st = fock::apply_coupler(st, fock::CouplerSpec("f2", "f3", r));
  if (st.has_mode("f3" + kSpeciesSuffix) || st.has_mode("f2" + kSpeciesSuffix))
    st = fock::apply_coupler(
        st, fock::CouplerSpec("f2" + kSpeciesSuffix, "f3" + kSpeciesSuffix, r));

  if (apply_filters) {
    // Phase modulators cancel the fixed per-level phases left by the
    // coupler convention: i on the f4 level, sign(R-T) on the f2 level.
    st = fock::apply_phase(st, "f4", -kPi / 2.0);
    st = fock::apply_phase(st, "f4" + kSpeciesSuffix, -kPi / 2.0);
    if (r < t) {
      st = fock::apply_phase(st, "f2", kPi);
      st = fock::apply_phase(st, "f2" + kSpeciesSuffix, kPi);
    }
    if (eta1 < 1.0) st = fock::apply_attenuator(st, "f1", eta1);
    if (eta4 < 1.0) {
      st = fock::apply_attenuator(st, "f4", eta4);
      st = fock::apply_attenuator(st, "f4" + kSpeciesSuffix, eta4);
    }
  }

  fock::FockState post = fock::postselect(st, [](const fock::ModeCounts& c) {
    const int herald = c("f3") + c("f3" + kSpeciesSuffix);
    const int remaining = c("f1") + c("f2") + c("f4") + c("f2" + kSpeciesSuffix) +
                          c("f4" + kSpeciesSuffix);
    return herald == 1 && remaining == 1;
  });
  const double p = post.norm_sq();
  if (p <= 1e-30) return {post, 0.0};
  return {post.normalized(), p};
}

struct SimulatedEncoding {
  std::optional<PureState> qutrit;  // over levels (f4, f2, f1); empty when failed
  double success_probability;
};

/// Ideal-overlap encoding reduced to the logical qutrit.
inline SimulatedEncoding simulate_encoding(const BlochAngles& q1, const BlochAngles& q2,
                                           double r, bool apply_filters) {
  const EncodedFock ef = encode_fock(q1, q2, r, apply_filters, 1.0);
  if (ef.success_probability <= 0.0) return {std::nullopt, 0.0};
  Vec v = Vec::Zero(3);
  for (const auto& [occ, amp] : ef.state.terms()) {
    const fock::ModeCounts c(ef.state, occ);
    if (c("f4") == 1) v[0] += amp;
    else if (c("f2") == 1) v[1] += amp;
    else if (c("f1") == 1) v[2] += amp;
    else detail::require(false, "simulate_encoding: unexpected post-selected term");
  }
  return {PureState(std::move(v)), ef.success_probability};
}

/// Maximizes the heralding probability factor (T-R)² over the coupler ratio,
/// subject to both damping factors staying physical (≤ 1). The grid covers
/// R in (0, 1/2) at the given resolution.
inline double optimal_splitting_ratio(double grid_resolution) {
  detail::require(grid_resolution > 0.0 && grid_resolution < 0.5,
                  "optimal_splitting_ratio: bad resolution");
  double best_r = -1.0, best_obj = -1.0;
  for (double r = grid_resolution; r < 0.5; r += grid_resolution) {
    if (damping_eta1(r) > 1.0 + 1e-12 || damping_eta4(r) > 1.0 + 1e-12) continue;
    const double d = 1.0 - 2.0 * r;
    const double obj = d * d;
    if (obj > best_obj) {
      best_obj = obj;
      best_r = r;
    }
  }
  detail::require(best_r > 0.0, "optimal_splitting_ratio: no feasible ratio on grid");
  return best_r;
}

struct HomPoint {
  double delay;  // seconds
  double rate;   // coincidences per second (per pair when pair_rate = 1)
};

/// Coincidence-vs-delay scan of the coupler with one photon per input port.
/// The two-photon interference term carries weight
/// mode_overlap · exp(-τ²/(2σ²)); the curve interpolates between the
/// indistinguishable level ∝ (R-T)² and the distinguishable level ∝ R²+T².
inline std::vector<HomPoint> hom_dip_scan(double r, const std::vector<double>& delays,
                                          const ImperfectionParams& params,
                                          double coherence_sigma,
                                          double pair_rate_hz = 1.0) {
  detail::require(r >= 0.0 && r <= 1.0, "hom_dip_scan: R outside [0, 1]");
  detail::require(coherence_sigma > 0.0, "hom_dip_scan: coherence width must be > 0");
  params.validate();

  // Indistinguishable branch: both photons share one mode pair.
  fock::FockState ind = fock::FockState::vacuum();
  ind.create({{"f2", Cx(1.0, 0.0)}});
  ind.create({{"f3", Cx(1.0, 0.0)}});
  ind = fock::apply_coupler(ind, fock::CouplerSpec("f2", "f3", r));
  const double p_ind = fock::postselect(ind, [](const fock::ModeCounts& c) {
                         return c("f2") == 1 && c("f3") == 1;
                       }).norm_sq();

  // Distinguishable branch: the second photon lives in the twin mode set.
  fock::FockState dis = fock::FockState::vacuum();
  dis.create({{"f2", Cx(1.0, 0.0)}});
  dis.create({{"f3" + kSpeciesSuffix, Cx(1.0, 0.0)}});
  dis = fock::apply_coupler(dis, fock::CouplerSpec("f2", "f3", r));
  dis = fock::apply_coupler(dis,
                            fock::CouplerSpec("f2" + kSpeciesSuffix, "f3" + kSpeciesSuffix, r));
  const double p_dis = fock::postselect(dis, [](const fock::ModeCounts& c) {
                         return c("f2") + c("f2" + kSpeciesSuffix) == 1 &&
                                c("f3") + c("f3" + kSpeciesSuffix) == 1;
                       }).norm_sq();

  const double eta = params.detector_efficiency;
  const double accidental = params.dark_count_rate * params.coincidence_window *
                            pair_rate_hz * eta;
  std::vector<HomPoint> points;
  points.reserve(delays.size());
  for (double tau : delays) {
    const double indist =
        params.mode_overlap * std::exp(-tau * tau / (2.0 * coherence_sigma * coherence_sigma));
    const double p_cc = indist * p_ind + (1.0 - indist) * p_dis;
    points.push_back({tau, pair_rate_hz * eta * eta * p_cc + accidental});
  }
  return points;
}

struct HomVisibility {
  double max_normalized;  // (max - min) / max
  double symmetric;       // (max - min) / (max + min)
};

inline HomVisibility hom_visibility(const std::vector<HomPoint>& points) {
  detail::require(points.size() >= 2, "hom_visibility: need at least two points");
  double lo = points.front().rate, hi = points.front().rate;
  for (const HomPoint& p : points) {
    lo = std::min(lo, p.rate);
    hi = std::max(hi, p.rate);
  }
  detail::require(hi > 0.0, "hom_visibility: flat zero scan");
  return {(hi - lo) / hi, (hi - lo) / (hi + lo)};
}

/// Random-walk phase offset sampled every dt seconds; the mean absolute
/// one-second increment equals `rate`. A positive reset_interval models the
/// stabilization cycles that return the offset to zero between measurement
/// blocks.
inline std::vector<double> phase_drift_process(double duration, double rate,
                                               std::uint64_t seed, double dt = 1.0,
                                               double reset_interval = 0.0) {
  detail::require(duration >= 0.0 && dt > 0.0, "phase_drift_process: bad duration/dt");
  detail::require(rate >= 0.0, "phase_drift_process: rate must be >= 0");
  RandomStream rng(seed);
  // |N(0, s²)| has mean s·√(2/π); s = rate·√(π/2) gives mean |step| = rate.
  const double step_sigma = rate * std::sqrt(kPi / 2.0) * std::sqrt(dt);
  std::normal_distribution<double> step(0.0, step_sigma > 0.0 ? step_sigma : 1e-300);
  const int n_steps = static_cast<int>(std::ceil(duration / dt - 1e-12));
  const int steps_per_block =
      reset_interval > 0.0 ? std::max(1, static_cast<int>(std::round(reset_interval / dt)))
                           : 0;
  std::vector<double> offsets;
  offsets.reserve(n_steps);
  double phase = 0.0;
  for (int i = 0; i < n_steps; ++i) {
    phase += (rate > 0.0) ? step(rng) : 0.0;
    if (steps_per_block > 0 && (i + 1) % steps_per_block == 0) phase = 0.0;
    offsets.push_back(phase);
  }
  return offsets;
}

/// Expected interference contrast left after averaging cos(δ(t)) over one
/// stabilized measurement block, for the random-walk drift model above.
inline double drift_interference_factor(double rate, double block_seconds) {
  detail::require(rate >= 0.0 && block_seconds > 0.0,
                  "drift_interference_factor: bad arguments");
  const double a = (kPi / 4.0) * rate * rate;  // Var(δ(t)) = (π/2)·rate²·t
  const double at = a * block_seconds;
  if (at < 1e-12) return 1.0;
  return (1.0 - std::exp(-at)) / at;
}

/// Source/procedure context for converting projection probabilities into
/// coincidence rates.
struct MzContext {
  double herald_probability = 1.0;  // encoding success probability per pair
  double pair_rate_hz = 1.0;        // generated pairs per second
  double block_seconds = 5.0;       // stabilized measurement block length
};

/// Verification interferometer: routes the two fibers carrying the chosen
/// qubit (1: f2/f1, 2: f4/f2) into the measurement couplers and projects
/// onto the analysis basis state (detector D1) and its orthogonal
/// complement (D2), conditioned on the already-applied herald. Interference
/// contrast is reduced by mz_visibility and by phase drift over a block;
/// dark counts add an accidental-coincidence floor to both rates.
inline CoincidenceRecord mz_verify(const fock::FockState& qutrit_modes, int which,
                                   const BlochAngles& basis,
                                   const ImperfectionParams& params,
                                   const MzContext& ctx = MzContext{}) {
  detail::require(which == 1 || which == 2, "mz_verify: which must be 1 or 2");
  params.validate();
  std::vector<std::vector<std::string>> groups;
  if (which == 1)
    groups = {{"f2", "f2" + kSpeciesSuffix}, {"f1", "f1" + kSpeciesSuffix}};
  else
    groups = {{"f4", "f4" + kSpeciesSuffix}, {"f2", "f2" + kSpeciesSuffix}};

  Mat rho = fock::conditional_density(qutrit_modes, groups, species_of_mode);
  const double contrast =
      params.mz_visibility *
      drift_interference_factor(params.phase_drift_rate, ctx.block_seconds);
  rho(0, 1) *= contrast;
  rho(1, 0) *= contrast;

  const PureState b = basis.to_state();
  Vec b_perp(2);
  b_perp[0] = -std::conj(b.amp(1));
  b_perp[1] = std::conj(b.amp(0));
  const double p_plus =
      std::max((b.amplitudes().adjoint() * rho * b.amplitudes())(0).real(), 0.0);
  const double p_minus = std::max((b_perp.adjoint() * rho * b_perp)(0).real(), 0.0);

  const double eta = params.detector_efficiency;
  const double herald_rate = ctx.pair_rate_hz * ctx.herald_probability * eta;
  const double accidental =
      herald_rate * params.dark_count_rate * params.coincidence_window;
  return {herald_rate * eta * p_plus + accidental,
          herald_rate * eta * p_minus + accidental};
}

}  // namespace qupack::optics
