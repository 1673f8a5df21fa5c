#pragma once

#include "aqm/queue.hpp"

namespace aqm {

/// Guard used by estimate_delay when the departure rate is still ~0.
inline constexpr double kDelayRateEpsilon = 1e-6;

/// Low-pass filtered queue length (RED's `avg`).
struct AvgQueueEstimator {
  double value = 0.0;
  double weight = 0.002;

  /// Throws std::invalid_argument unless 0 < weight <= 1.
  static AvgQueueEstimator with_weight(double weight, double initial = 0.0);

  friend bool operator==(const AvgQueueEstimator&, const AvgQueueEstimator&) = default;
};

/// Low-pass filtered per-slot event rate (arrivals or departures).
struct RateEstimator {
  double value = 0.0;
  double weight = 0.2;

  /// Throws std::invalid_argument unless 0 < weight < 1.
  static RateEstimator with_weight(double weight, double initial = 0.0);

  friend bool operator==(const RateEstimator&, const RateEstimator&) = default;
};

/// value' = value (1 - w) + q w
[[nodiscard]] AvgQueueEstimator update_avg_nonempty(AvgQueueEstimator est, double q);

/// value' = value (1 - w)^idle_slots
[[nodiscard]] AvgQueueEstimator update_avg_idle(AvgQueueEstimator est, Slot idle_slots);

[[nodiscard]] RateEstimator update_rate(RateEstimator est, double observed);

/// Estimated queuing delay in slots: (arrival rate / departure rate) * q.
[[nodiscard]] double estimate_delay(const RateEstimator& arrival, const RateEstimator& departure,
                                    double q);

struct RatePair {
  RateEstimator arrival;
  RateEstimator departure;
};

/// One per-slot rate update. The arrival filter holds its previous value while
/// the buffer is full, since no arrivals can be admitted.
[[nodiscard]] RatePair update_rates_per_slot(RateEstimator arrival, RateEstimator departure,
                                             bool q_full, int arrived, int departed);

/// The estimators a router keeps alongside its queue.
struct EstimatorBank {
  AvgQueueEstimator avg;
  RateEstimator arrival;
  RateEstimator departure;

  [[nodiscard]] double delay(double q) const { return estimate_delay(arrival, departure, q); }
};

}  // namespace aqm
