#include "aqm/policies.hpp"

#include <stdexcept>

namespace aqm {

void RedParams::validate() const {
  if (!(min_th >= 0.0 && min_th < max_th)) {
    throw std::invalid_argument("thresholds must satisfy 0 <= min_th < max_th");
  }
  if (!(max_p > 0.0 && max_p <= 1.0)) {
    throw std::invalid_argument("max_p must lie in (0, 1]");
  }
  if (!(queue_weight > 0.0 && queue_weight <= 1.0)) {
    throw std::invalid_argument("queue_weight must lie in (0, 1]");
  }
}

void HybridParams::validate() const {
  red.validate();
  if (!(delay_weight >= 0.0)) {
    throw std::invalid_argument("delay_weight must be non-negative");
  }
}

DerivedThresholds derive_thresholds(const RedParams& params) {
  if (!(params.min_th < params.max_th)) {
    throw std::invalid_argument("derive_thresholds: min_th must be below max_th");
  }
  return {
      (params.max_th + params.min_th) / 2.0 + params.min_th,
      1.75 * params.max_th,
      2.0 * params.max_th,
  };
}

double base_drop_probability(double avg, const RedParams& params) {
  return detail::clamp01(params.max_p * (avg - params.min_th) / (params.max_th - params.min_th));
}

double count_adjust(double dp_base, int count) {
  const double scaled = count * dp_base;
  if (scaled >= 1.0) {
    return 1.0;
  }
  return detail::clamp01(dp_base / (1.0 - scaled));
}

double hybrid_drop_probability(double avg, int count, double d_esti, const HybridParams& params) {
  return detail::clamp01(count_adjust(base_drop_probability(avg, params.red), count) +
                         params.delay_weight * d_esti);
}

EredScenario classify_ered(double avg, double q, const DerivedThresholds& th) {
  if (avg >= th.max_th3) {
    return EredScenario::Forced;
  }
  if (avg >= th.min_th2) {
    return q >= th.min_th2 ? EredScenario::Proportional : EredScenario::NoDrop;
  }
  return q > th.max_th2 ? EredScenario::Burst : EredScenario::NoDrop;
}

}  // namespace aqm
