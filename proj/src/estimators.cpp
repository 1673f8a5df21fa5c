#include "aqm/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace aqm {

AvgQueueEstimator AvgQueueEstimator::with_weight(double weight, double initial) {
  if (!(weight > 0.0 && weight <= 1.0)) {
    throw std::invalid_argument("queue weight must lie in (0, 1]");
  }
  if (!(initial >= 0.0)) {
    throw std::invalid_argument("average queue length must be non-negative");
  }
  return AvgQueueEstimator{initial, weight};
}

RateEstimator RateEstimator::with_weight(double weight, double initial) {
  if (!(weight > 0.0 && weight < 1.0)) {
    throw std::invalid_argument("rate weight must lie in (0, 1)");
  }
  if (!(initial >= 0.0)) {
    throw std::invalid_argument("rate must be non-negative");
  }
  return RateEstimator{initial, weight};
}

AvgQueueEstimator update_avg_nonempty(AvgQueueEstimator est, double q) {
  est.value = est.value * (1.0 - est.weight) + q * est.weight;
  return est;
}

AvgQueueEstimator update_avg_idle(AvgQueueEstimator est, Slot idle_slots) {
  if (idle_slots != 0) {
    est.value *= std::pow(1.0 - est.weight, static_cast<double>(idle_slots));
  }
  return est;
}

RateEstimator update_rate(RateEstimator est, double observed) {
  est.value = est.value * (1.0 - est.weight) + observed * est.weight;
  return est;
}

double estimate_delay(const RateEstimator& arrival, const RateEstimator& departure, double q) {
  if (q <= 0.0) {
    return 0.0;
  }
  if (departure.value > kDelayRateEpsilon) {
    return arrival.value / departure.value * q;
  }
  return q / kDelayRateEpsilon;
}

RatePair update_rates_per_slot(RateEstimator arrival, RateEstimator departure, bool q_full,
                               int arrived, int departed) {
  if (!q_full) {
    arrival = update_rate(arrival, arrived);
  }
  return {arrival, update_rate(departure, departed)};
}

}  // namespace aqm
