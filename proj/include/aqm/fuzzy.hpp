#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aqm/policies.hpp"

namespace aqm {

/// Trapezoidal membership on the normalised axis [0, 1].
/// A triangle is the special case b == c.
struct TrapezoidMembership {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  void validate() const;

  friend bool operator==(const TrapezoidMembership&, const TrapezoidMembership&) = default;
};

[[nodiscard]] double membership_degree(const TrapezoidMembership& mf, double x);

struct FuzzyTerm {
  std::string label;
  TrapezoidMembership mf;

  friend bool operator==(const FuzzyTerm&, const FuzzyTerm&) = default;
};

struct LinguisticVariable {
  std::string name;
  std::vector<FuzzyTerm> terms;

  /// Index of `label`, or nullopt.
  [[nodiscard]] std::optional<std::size_t> index_of(const std::string& label) const;

  /// Checks label uniqueness and trapezoid shape; with `require_coverage`, also
  /// that every x in [0, 1] has a non-zero degree in some term.
  void validate(bool require_coverage) const;

  friend bool operator==(const LinguisticVariable&, const LinguisticVariable&) = default;
};

/// Degrees aligned with `LinguisticVariable::terms`.
using Degrees = std::vector<double>;

struct FuzzyRule {
  std::optional<std::string> q;
  std::optional<std::string> avg;
  std::string dp;

  friend bool operator==(const FuzzyRule&, const FuzzyRule&) = default;
};

struct FisConfig {
  LinguisticVariable q_var;
  LinguisticVariable avg_var;
  LinguisticVariable dp_var;
  std::vector<FuzzyRule> rules;
  double cog_step = 0.001;
  double delay_weight = 0.05;

  /// Shipped memberships and the eight-rule base.
  static FisConfig defaults();

  /// Throws std::invalid_argument naming the offending element.
  void validate() const;

  friend bool operator==(const FisConfig&, const FisConfig&) = default;
};

/// Throws std::invalid_argument for crisp outside [0, 1].
[[nodiscard]] Degrees fuzzify(const LinguisticVariable& var, double crisp);

/// Mamdani rule firing: AND = min, then max over rules sharing a consequent.
/// Result is aligned with `cfg.dp_var.terms`.
[[nodiscard]] Degrees evaluate_rules(const FisConfig& cfg, const Degrees& q_degrees,
                                     const Degrees& avg_degrees);

/// Discrete centre of gravity of the clipped, max-aggregated output sets.
/// Returns 0 when every activation is 0.
[[nodiscard]] double defuzzify_cog(const FisConfig& cfg, const Degrees& activations);

/// Normalises q and avg by capacity (avg clamped at 1) and runs the inference.
/// Throws std::invalid_argument when capacity is 0.
[[nodiscard]] double fuzzy_initial_dp(const FisConfig& cfg, double q, double avg,
                                      double capacity);

[[nodiscard]] double fuzzy_final_dp(double dp_initial, double d_esti, double delay_weight);

/// Precompiled inference for the simulation hot path. Rule labels are resolved
/// to indices and the output sets are tabulated on the COG grid once. The last
/// activation vector is memoised, which covers the long runs where q and avg
/// keep selecting the same rules.
class FuzzyEngine {
 public:
  explicit FuzzyEngine(FisConfig cfg);

  [[nodiscard]] const FisConfig& config() const noexcept { return cfg_; }

  [[nodiscard]] double initial_dp(double q, double avg, double capacity);

 private:
  struct CompiledRule {
    std::optional<std::size_t> q;
    std::optional<std::size_t> avg;
    std::size_t dp;
  };

  FisConfig cfg_;
  std::vector<CompiledRule> rules_;
  std::vector<double> grid_;
  std::vector<std::vector<double>> tables_;  // [dp term][grid point]
  Degrees q_deg_, avg_deg_, act_;
  Degrees last_act_;
  double last_result_ = 0.0;
  bool has_last_ = false;

  void fuzzify_into(const LinguisticVariable& var, double crisp, Degrees& out) const;
  double cog(const Degrees& act) const;
};

/// Fuzzy Hybrid-ERED: no thresholds and no count, one Bernoulli draw.
template <UniformSource Uniform>
Decision fuzzy_decide(FuzzyEngine& engine, double q, double avg, double d_esti, double capacity,
                      Uniform&& draw) {
  const double dp = fuzzy_final_dp(engine.initial_dp(q, avg, capacity), d_esti,
                                   engine.config().delay_weight);
  if (static_cast<double>(draw()) < dp) {
    return {Action::Drop, dp};
  }
  return {Action::Enqueue, dp};
}

}  // namespace aqm
