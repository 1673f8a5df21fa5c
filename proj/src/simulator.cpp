#include "aqm/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>
#include <variant>

#include "aqm/estimators.hpp"
#include "aqm/rng.hpp"

namespace aqm {

namespace {

constexpr std::uint64_t kTrafficSalt = 0x7472616666696300ULL;
constexpr std::uint64_t kDecisionSalt = 0x6465636973696f6eULL;

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

struct RedRunner {
  RedParams params;
  PolicyState state;
};

struct EredRunner {
  HybridParams params;
  DerivedThresholds th;
  PolicyState state;
};

struct FuzzyRunner {
  FuzzyEngine engine;
};

using Runner = std::variant<RedRunner, EredRunner, FuzzyRunner>;

Runner make_runner(const PolicySpec& spec) {
  switch (spec.kind) {
    case PolicyKind::Red:
      return RedRunner{spec.red, {}};
    case PolicyKind::Ered:
      return EredRunner{{spec.red, 0.0}, derive_thresholds(spec.red), {}};
    case PolicyKind::Hybrid:
      return EredRunner{{spec.red, spec.delay_weight}, derive_thresholds(spec.red), {}};
    case PolicyKind::Fuzzy:
      return FuzzyRunner{FuzzyEngine(spec.fuzzy)};
  }
  throw std::logic_error("unknown policy kind");
}

bool same_traffic(const SimConfig& a, const SimConfig& b) {
  return a.arrival_prob == b.arrival_prob && a.departure_prob == b.departure_prob &&
         a.total_slots == b.total_slots && a.warmup_slots == b.warmup_slots &&
         a.capacity == b.capacity && a.arrival_weight == b.arrival_weight &&
         a.departure_weight == b.departure_weight && a.seed == b.seed;
}

}  // namespace

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Red: return "RED";
    case PolicyKind::Ered: return "ERED";
    case PolicyKind::Hybrid: return "Hybrid";
    case PolicyKind::Fuzzy: return "Fuzzy";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "red") return PolicyKind::Red;
  if (lower == "ered") return PolicyKind::Ered;
  if (lower == "hybrid") return PolicyKind::Hybrid;
  if (lower == "fuzzy") return PolicyKind::Fuzzy;
  return std::nullopt;
}

void PolicySpec::validate() const {
  if (kind == PolicyKind::Fuzzy) {
    if (!(red.queue_weight > 0.0 && red.queue_weight <= 1.0)) {
      throw std::invalid_argument("queue_weight must lie in (0, 1]");
    }
    fuzzy.validate();
    return;
  }
  HybridParams{red, delay_weight}.validate();
}

void SimConfig::validate() const {
  if (!in_unit(arrival_prob)) throw std::invalid_argument("arrival_prob must lie in [0, 1]");
  if (!in_unit(departure_prob)) throw std::invalid_argument("departure_prob must lie in [0, 1]");
  if (!(warmup_slots < total_slots)) {
    throw std::invalid_argument("warmup_slots must be below total_slots");
  }
  if (capacity < 1) throw std::invalid_argument("capacity must be at least 1");
  if (!(arrival_weight > 0.0 && arrival_weight < 1.0)) {
    throw std::invalid_argument("arrival_weight must lie in (0, 1)");
  }
  if (!(departure_weight > 0.0 && departure_weight < 1.0)) {
    throw std::invalid_argument("departure_weight must lie in (0, 1)");
  }
  policy.validate();
}

bool SimReport::conserves() const {
  return static_cast<std::int64_t>(arrived) ==
         static_cast<std::int64_t>(departed + loss + dropped) + residual_delta();
}

SimReport run(const SimConfig& config, const DecisionObserver& observer) {
  config.validate();

  RngStream traffic(mix_seed(config.seed ^ kTrafficSalt));
  RngStream decisions(mix_seed(config.seed ^ kDecisionSalt));
  RouterQueue queue(config.capacity);
  EstimatorBank est{AvgQueueEstimator::with_weight(config.policy.red.queue_weight),
                    RateEstimator::with_weight(config.arrival_weight),
                    RateEstimator::with_weight(config.departure_weight)};
  Runner runner = make_runner(config.policy);
  const double capacity = static_cast<double>(config.capacity);

  // Idle decay is applied lazily at the next arrival; `decayed_through`
  // prevents decaying the same idle stretch twice when that arrival is dropped.
  Slot decayed_through = 0;

  SimReport r;
  double delay_sum = 0.0;
  double occupancy_sum = 0.0;

  for (Slot slot = 0; slot < config.total_slots; ++slot) {
    const bool measured = slot >= config.warmup_slots;
    if (slot == config.warmup_slots) r.occupancy_at_warmup = queue.occupancy();

    const double arrival_draw = traffic.uniform();
    const double departure_draw = traffic.uniform();
    const bool full_at_start = queue.full();
    int arrived = 0;
    int departed = 0;

    if (arrival_draw < config.arrival_prob) {
      arrived = 1;
      if (measured) ++r.arrived;
      const double q = static_cast<double>(queue.occupancy());
      if (auto idle = queue.idle_since()) {
        const Slot from = std::max(*idle, decayed_through);
        est.avg = update_avg_idle(est.avg, slot - from);
        decayed_through = slot;
      } else {
        est.avg = update_avg_nonempty(est.avg, q);
      }

      if (queue.full()) {
        if (measured) ++r.loss;
      } else {
        const double avg = est.avg.value;
        const Decision decision = std::visit(
            [&](auto& p) -> Decision {
              using T = std::decay_t<decltype(p)>;
              if constexpr (std::is_same_v<T, RedRunner>) {
                return red_decide(p.state, p.params, avg, decisions);
              } else if constexpr (std::is_same_v<T, EredRunner>) {
                return hybrid_decide(p.state, p.params, p.th, avg, q, est.delay(q), decisions);
              } else {
                return fuzzy_decide(p.engine, q, avg, est.delay(q), capacity, decisions);
              }
            },
            runner);
        if (observer) observer(slot, decision);
        if (decision.action == Action::Drop) {
          if (measured) ++r.dropped;
        } else {
          queue.enqueue(slot);
        }
      }
    }

    if (departure_draw < config.departure_prob) {
      if (auto dep = queue.dequeue(slot)) {
        departed = 1;
        if (measured) {
          ++r.departed;
          delay_sum += static_cast<double>(dep->waiting);
        }
      }
    }

    auto rates = update_rates_per_slot(est.arrival, est.departure, full_at_start, arrived, departed);
    est.arrival = rates.arrival;
    est.departure = rates.departure;

    if (measured) occupancy_sum += static_cast<double>(queue.occupancy());
  }

  r.measured_slots = config.total_slots - config.warmup_slots;
  r.occupancy_at_end = queue.occupancy();
  r.missed = r.loss + r.dropped;
  r.delay_mean = r.departed > 0 ? delay_sum / static_cast<double>(r.departed) : 0.0;
  r.mql = occupancy_sum / static_cast<double>(r.measured_slots);
  r.throughput = static_cast<double>(r.departed) / static_cast<double>(r.measured_slots);
  if (!r.conserves()) {
    throw std::logic_error("simulation violated packet conservation");
  }
  return r;
}

std::vector<SimReport> run_pair_seeded(const std::vector<SimConfig>& configs) {
  for (const auto& c : configs) {
    if (!same_traffic(c, configs.front())) {
      throw std::invalid_argument("run_pair_seeded: configs must share traffic settings and seed");
    }
  }
  std::vector<SimReport> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(run(c));
  return out;
}

}  // namespace aqm
