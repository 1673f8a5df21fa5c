#pragma once

#include <array>
#include <string>
#include <vector>

#include "aqm/experiment.hpp"

namespace aqm {

/// The four reference operating points: arrival 0.93, 0.66, 0.5 and 0.33
/// against departure 0.5, all policies on one traffic seed.
inline constexpr std::array<double, 4> kRegimeArrivals{0.93, 0.66, 0.5, 0.33};

struct RegimeRun {
  double arrival_prob = 0.0;
  SimReport red, ered, hybrid, fuzzy;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the four regimes with `spec`'s traffic and policy parameters and the
/// first seed. Regimes run in parallel.
[[nodiscard]] std::vector<RegimeRun> run_regimes(const ExperimentSpec& spec);

/// Evaluates the regime-level acceptance criteria: underload equality,
/// saturation orderings and magnitudes, mid-load orderings, conservation and
/// the Little's-law cross-check.
[[nodiscard]] std::vector<CriterionResult> evaluate_regimes(const std::vector<RegimeRun>& runs,
                                                            const ExperimentSpec& spec);

}  // namespace aqm
