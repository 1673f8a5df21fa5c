#include "aqm/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace aqm {

namespace {

std::size_t grid_points(double step) {
  return static_cast<std::size_t>(std::llround(1.0 / step)) + 1;
}

double grid_x(std::size_t i, double step) { return std::min(1.0, static_cast<double>(i) * step); }

std::size_t require_index(const LinguisticVariable& var, const std::string& label,
                          const std::string& where) {
  auto idx = var.index_of(label);
  if (!idx) {
    throw std::invalid_argument(where + ": unknown " + var.name + " term '" + label + "'");
  }
  return *idx;
}

}  // namespace

void TrapezoidMembership::validate() const {
  if (!(0.0 <= a && a <= b && b <= c && c <= d && d <= 1.0)) {
    throw std::invalid_argument("trapezoid must satisfy 0 <= a <= b <= c <= d <= 1");
  }
}

double membership_degree(const TrapezoidMembership& mf, double x) {
  if (x < mf.a || x > mf.d) {
    return 0.0;
  }
  if (x >= mf.b && x <= mf.c) {
    return 1.0;
  }
  if (x < mf.b) {
    return (x - mf.a) / (mf.b - mf.a);
  }
  return (mf.d - x) / (mf.d - mf.c);
}

std::optional<std::size_t> LinguisticVariable::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].label == label) {
      return i;
    }
  }
  return std::nullopt;
}

void LinguisticVariable::validate(bool require_coverage) const {
  if (terms.empty()) {
    throw std::invalid_argument(name + ": at least one term is required");
  }
  std::set<std::string> seen;
  std::vector<double> marks{0.0, 1.0};
  for (const auto& t : terms) {
    if (!seen.insert(t.label).second) {
      throw std::invalid_argument(name + ": duplicate term '" + t.label + "'");
    }
    try {
      t.mf.validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(name + "." + t.label + ": " + e.what());
    }
    marks.insert(marks.end(), {t.mf.a, t.mf.b, t.mf.c, t.mf.d});
  }
  if (!require_coverage) {
    return;
  }
  // max of piecewise-linear degrees: zero on a breakpoint interval iff zero at its midpoint
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  std::vector<double> probes = marks;
  for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
    probes.push_back(0.5 * (marks[i] + marks[i + 1]));
  }
  for (double x : probes) {
    const bool covered = std::any_of(terms.begin(), terms.end(), [x](const FuzzyTerm& t) {
      return membership_degree(t.mf, x) > 0.0;
    });
    if (!covered) {
      throw std::invalid_argument(name + ": no term covers x = " + std::to_string(x));
    }
  }
}

FisConfig FisConfig::defaults() {
  FisConfig cfg;
  // The rightmost input sets are shoulders so that a full buffer still fires "full"/"high".
  cfg.q_var = {"q",
               {{"empty", {0.0, 0.0, 0.6, 0.7}},
                {"low", {0.6, 0.7, 0.7, 0.8}},
                {"moderate", {0.7, 0.8, 0.8, 0.9}},
                {"full", {0.8, 0.9, 1.0, 1.0}}}};
  cfg.avg_var = {"avg",
                 {{"low", {0.0, 0.0, 0.6, 0.7}},
                  {"moderate", {0.6, 0.8, 0.8, 0.9}},
                  {"high", {0.8, 0.9, 1.0, 1.0}}}};
  cfg.dp_var = {"dp",
                {{"zero", {0.0, 0.0, 0.3, 0.4}},
                 {"low", {0.3, 0.4, 0.5, 0.6}},
                 {"moderate", {0.5, 0.6, 0.8, 0.9}},
                 {"high", {0.8, 0.9, 1.0, 1.0}}}};
  cfg.rules = {
      {"empty", std::nullopt, "zero"},  {"low", std::nullopt, "zero"},
      {"moderate", "low", "low"},       {"moderate", "moderate", "low"},
      {"moderate", "high", "moderate"}, {"full", "low", "moderate"},
      {"full", "moderate", "high"},     {"full", "high", "high"},
  };
  return cfg;
}

void FisConfig::validate() const {
  q_var.validate(true);
  avg_var.validate(true);
  dp_var.validate(false);
  if (rules.empty()) {
    throw std::invalid_argument("rules: at least one rule is required");
  }
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    const std::string where = "rules[" + std::to_string(i) + "]";
    if (!r.q && !r.avg) {
      throw std::invalid_argument(where + ": needs at least one antecedent");
    }
    if (r.q) require_index(q_var, *r.q, where);
    if (r.avg) require_index(avg_var, *r.avg, where);
    require_index(dp_var, r.dp, where);
  }
  if (!(cog_step > 0.0 && cog_step <= 0.01)) {
    throw std::invalid_argument("cog_step must lie in (0, 0.01]");
  }
  if (!(delay_weight >= 0.0)) {
    throw std::invalid_argument("delay_weight must be non-negative");
  }
}

Degrees fuzzify(const LinguisticVariable& var, double crisp) {
  if (!(crisp >= 0.0 && crisp <= 1.0)) {
    throw std::invalid_argument("fuzzify: crisp input outside [0, 1]");
  }
  Degrees out(var.terms.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = membership_degree(var.terms[i].mf, crisp);
  }
  return out;
}

Degrees evaluate_rules(const FisConfig& cfg, const Degrees& q_degrees, const Degrees& avg_degrees) {
  Degrees act(cfg.dp_var.terms.size(), 0.0);
  for (const auto& r : cfg.rules) {
    double strength = 1.0;
    if (r.q) strength = std::min(strength, q_degrees.at(require_index(cfg.q_var, *r.q, "rule")));
    if (r.avg)
      strength = std::min(strength, avg_degrees.at(require_index(cfg.avg_var, *r.avg, "rule")));
    double& slot = act[require_index(cfg.dp_var, r.dp, "rule")];
    slot = std::max(slot, strength);
  }
  return act;
}

double defuzzify_cog(const FisConfig& cfg, const Degrees& activations) {
  const std::size_t n = grid_points(cfg.cog_step);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid_x(i, cfg.cog_step);
    double mu = 0.0;
    for (std::size_t k = 0; k < activations.size(); ++k) {
      if (activations[k] > 0.0) {
        mu = std::max(mu, std::min(activations[k], membership_degree(cfg.dp_var.terms[k].mf, x)));
      }
    }
    num += mu * x;
    den += mu;
  }
  return den > 0.0 ? num / den : 0.0;
}

double fuzzy_initial_dp(const FisConfig& cfg, double q, double avg, double capacity) {
  if (!(capacity > 0.0)) {
    throw std::invalid_argument("fuzzy_initial_dp: capacity must be positive");
  }
  const double qn = std::clamp(q / capacity, 0.0, 1.0);
  const double an = std::clamp(avg / capacity, 0.0, 1.0);
  return defuzzify_cog(cfg, evaluate_rules(cfg, fuzzify(cfg.q_var, qn), fuzzify(cfg.avg_var, an)));
}

double fuzzy_final_dp(double dp_initial, double d_esti, double delay_weight) {
  return std::clamp(dp_initial + delay_weight * d_esti, 0.0, 1.0);
}

FuzzyEngine::FuzzyEngine(FisConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  for (const auto& r : cfg_.rules) {
    CompiledRule c{std::nullopt, std::nullopt, *cfg_.dp_var.index_of(r.dp)};
    if (r.q) c.q = cfg_.q_var.index_of(*r.q);
    if (r.avg) c.avg = cfg_.avg_var.index_of(*r.avg);
    rules_.push_back(c);
  }
  const std::size_t n = grid_points(cfg_.cog_step);
  grid_.resize(n);
  for (std::size_t i = 0; i < n; ++i) grid_[i] = grid_x(i, cfg_.cog_step);
  for (const auto& t : cfg_.dp_var.terms) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = membership_degree(t.mf, grid_[i]);
    tables_.push_back(std::move(col));
  }
  q_deg_.resize(cfg_.q_var.terms.size());
  avg_deg_.resize(cfg_.avg_var.terms.size());
  act_.resize(cfg_.dp_var.terms.size());
}

void FuzzyEngine::fuzzify_into(const LinguisticVariable& var, double crisp, Degrees& out) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = membership_degree(var.terms[i].mf, crisp);
}

double FuzzyEngine::cog(const Degrees& act) const {
  std::size_t lo = grid_.size();
  std::size_t hi = 0;
  for (std::size_t k = 0; k < act.size(); ++k) {
    if (act[k] <= 0.0) continue;
    const auto& mf = cfg_.dp_var.terms[k].mf;
    const auto first = static_cast<std::size_t>(
        std::lower_bound(grid_.begin(), grid_.end(), mf.a) - grid_.begin());
    const auto last = static_cast<std::size_t>(
        std::upper_bound(grid_.begin(), grid_.end(), mf.d) - grid_.begin());
    lo = std::min(lo, first);
    hi = std::max(hi, last);
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    double mu = 0.0;
    for (std::size_t k = 0; k < act.size(); ++k) {
      if (act[k] > 0.0) mu = std::max(mu, std::min(act[k], tables_[k][i]));
    }
    num += mu * grid_[i];
    den += mu;
  }
  return den > 0.0 ? num / den : 0.0;
}

double FuzzyEngine::initial_dp(double q, double avg, double capacity) {
  if (!(capacity > 0.0)) {
    throw std::invalid_argument("FuzzyEngine: capacity must be positive");
  }
  fuzzify_into(cfg_.q_var, std::clamp(q / capacity, 0.0, 1.0), q_deg_);
  fuzzify_into(cfg_.avg_var, std::clamp(avg / capacity, 0.0, 1.0), avg_deg_);
  std::fill(act_.begin(), act_.end(), 0.0);
  for (const auto& r : rules_) {
    double strength = 1.0;
    if (r.q) strength = std::min(strength, q_deg_[*r.q]);
    if (r.avg) strength = std::min(strength, avg_deg_[*r.avg]);
    act_[r.dp] = std::max(act_[r.dp], strength);
  }
  if (has_last_ && act_ == last_act_) {
    return last_result_;
  }
  last_act_ = act_;
  last_result_ = cog(act_);
  has_last_ = true;
  return last_result_;
}

}  // namespace aqm
