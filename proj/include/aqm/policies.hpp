#pragma once

#include <algorithm>
#include <concepts>

namespace aqm {

template <class F>
concept UniformSource = requires(F f) {
  { f() } -> std::convertible_to<double>;
};

struct RedParams {
  double min_th = 3.0;
  double max_th = 9.0;
  double max_p = 0.1;
  double queue_weight = 0.002;

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;

  friend bool operator==(const RedParams&, const RedParams&) = default;
};

struct DerivedThresholds {
  double min_th2 = 0.0;
  double max_th2 = 0.0;
  double max_th3 = 0.0;

  friend bool operator==(const DerivedThresholds&, const DerivedThresholds&) = default;
};

struct HybridParams {
  RedParams red;
  double delay_weight = 0.05;

  void validate() const;

  friend bool operator==(const HybridParams&, const HybridParams&) = default;
};

enum class Action { Enqueue, Drop };

struct Decision {
  Action action = Action::Enqueue;
  double dp_used = 0.0;

  friend bool operator==(const Decision&, const Decision&) = default;
};

/// Packets since the last drop; -1 while outside every dropping region.
struct PolicyState {
  int count = -1;
};

/// The four arrival scenarios of the ERED family.
enum class EredScenario {
  Proportional,  ///< min_th2 <= avg < max_th3 and q >= min_th2
  Burst,         ///< avg < min_th2 and q > max_th2
  Forced,        ///< avg >= max_th3
  NoDrop,
};

/// min_th2 = (max_th + min_th)/2 + min_th, max_th2 = 1.75 max_th, max_th3 = 2 max_th.
/// Throws std::invalid_argument when min_th >= max_th.
[[nodiscard]] DerivedThresholds derive_thresholds(const RedParams& params);

[[nodiscard]] double base_drop_probability(double avg, const RedParams& params);

/// dp / (1 - count dp), saturating at 1 once count dp reaches 1.
[[nodiscard]] double count_adjust(double dp_base, int count);

/// Drop probability used by the hybrid policy in the proportional scenario.
[[nodiscard]] double hybrid_drop_probability(double avg, int count, double d_esti,
                                             const HybridParams& params);

[[nodiscard]] EredScenario classify_ered(double avg, double q, const DerivedThresholds& th);

namespace detail {

[[nodiscard]] inline double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

template <UniformSource Uniform>
Decision bernoulli_drop(PolicyState& state, double dp, Uniform& draw) {
  dp = clamp01(dp);
  if (static_cast<double>(draw()) < dp) {
    state.count = 0;
    return {Action::Drop, dp};
  }
  return {Action::Enqueue, dp};
}

template <UniformSource Uniform>
Decision ered_family_decide(PolicyState& state, const HybridParams& params,
                            const DerivedThresholds& th, double avg, double q, double d_esti,
                            Uniform& draw) {
  switch (classify_ered(avg, q, th)) {
    case EredScenario::Proportional:
      ++state.count;
      return bernoulli_drop(state, hybrid_drop_probability(avg, state.count, d_esti, params),
                            draw);
    case EredScenario::Burst:
      ++state.count;
      return bernoulli_drop(state, count_adjust(params.red.max_p, state.count), draw);
    case EredScenario::Forced:
      state.count = 0;
      return {Action::Drop, 1.0};
    case EredScenario::NoDrop:
      break;
  }
  state.count = -1;
  return {Action::Enqueue, 0.0};
}

}  // namespace detail

/// Classic RED on the average queue length.
template <UniformSource Uniform>
Decision red_decide(PolicyState& state, const RedParams& params, double avg, Uniform&& draw) {
  if (avg < params.min_th) {
    state.count = -1;
    return {Action::Enqueue, 0.0};
  }
  if (avg >= params.max_th) {
    state.count = 0;
    return {Action::Drop, 1.0};
  }
  ++state.count;
  return detail::bernoulli_drop(state, count_adjust(base_drop_probability(avg, params), state.count),
                                draw);
}

/// ERED: the hybrid decision with the delay term removed.
template <UniformSource Uniform>
Decision ered_decide(PolicyState& state, const RedParams& params, const DerivedThresholds& th,
                     double avg, double q, Uniform&& draw) {
  return detail::ered_family_decide(state, HybridParams{params, 0.0}, th, avg, q, 0.0, draw);
}

/// Hybrid-ERED: ERED whose proportional scenario adds delay_weight * d_esti.
template <UniformSource Uniform>
Decision hybrid_decide(PolicyState& state, const HybridParams& params, const DerivedThresholds& th,
                       double avg, double q, double d_esti, Uniform&& draw) {
  return detail::ered_family_decide(state, params, th, avg, q, d_esti, draw);
}

}  // namespace aqm
