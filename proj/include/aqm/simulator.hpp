#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aqm/fuzzy.hpp"
#include "aqm/policies.hpp"
#include "aqm/queue.hpp"

namespace aqm {

enum class PolicyKind { Red, Ered, Hybrid, Fuzzy };

[[nodiscard]] std::string_view policy_name(PolicyKind kind);
/// Accepts "red", "ered", "hybrid", "fuzzy" (case-insensitive).
[[nodiscard]] std::optional<PolicyKind> parse_policy(std::string_view name);

/// A policy and its parameter payload. `red` carries the thresholds and the
/// queue weight (the fuzzy policy uses only the queue weight); `delay_weight`
/// is used by Hybrid; `fuzzy` by Fuzzy, whose own delay_weight applies.
struct PolicySpec {
  PolicyKind kind = PolicyKind::Red;
  RedParams red;
  double delay_weight = 0.05;
  FisConfig fuzzy = FisConfig::defaults();

  void validate() const;

  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

struct SimConfig {
  double arrival_prob = 0.93;
  double departure_prob = 0.5;
  std::uint64_t total_slots = 2'000'000;
  std::uint64_t warmup_slots = 800'000;
  std::size_t capacity = 20;
  double arrival_weight = 0.2;
  double departure_weight = 0.2;
  PolicySpec policy;
  std::uint64_t seed = 42;

  /// Throws std::invalid_argument with the offending field name.
  void validate() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct SimReport {
  std::uint64_t arrived = 0;
  std::uint64_t departed = 0;
  std::uint64_t loss = 0;
  std::uint64_t dropped = 0;
  std::uint64_t missed = 0;
  double delay_mean = 0.0;  ///< slots, over packets departing in the measured window
  double mql = 0.0;         ///< end-of-slot occupancy averaged over measured slots
  double throughput = 0.0;  ///< departures per measured slot
  std::uint64_t measured_slots = 0;
  std::uint64_t occupancy_at_warmup = 0;
  std::uint64_t occupancy_at_end = 0;

  [[nodiscard]] std::int64_t residual_delta() const {
    return static_cast<std::int64_t>(occupancy_at_end) -
           static_cast<std::int64_t>(occupancy_at_warmup);
  }
  /// arrived == departed + loss + dropped + residual_delta
  [[nodiscard]] bool conserves() const;

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

/// Called for every policy decision (not for buffer-full losses).
using DecisionObserver = std::function<void(Slot, const Decision&)>;

/// Runs one slotted experiment. Per slot: an optional arrival (loss if the
/// buffer is full, otherwise a policy decision), an optional departure, then
/// the rate estimators. Traffic and drop decisions use separate RNG streams
/// derived from the seed, so policies sharing a seed see identical traffic.
[[nodiscard]] SimReport run(const SimConfig& config, const DecisionObserver& observer = {});

/// Runs configs that differ only in policy against one traffic stream.
/// Throws std::invalid_argument if traffic settings or seeds differ.
[[nodiscard]] std::vector<SimReport> run_pair_seeded(const std::vector<SimConfig>& configs);

}  // namespace aqm
