#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "aqm/fuzzy.hpp"
#include "aqm/rng.hpp"
#include "oracles.hpp"

using namespace aqm;
using doctest::Approx;

namespace {

const FisConfig kCfg = FisConfig::defaults();

double deg(const LinguisticVariable& var, const Degrees& d, const char* label) {
  return d.at(*var.index_of(label));
}

Degrees only(const char* label, double activation) {
  Degrees a(kCfg.dp_var.terms.size(), 0.0);
  a.at(*kCfg.dp_var.index_of(label)) = activation;
  return a;
}

std::vector<oracle::Trap> dp_sets() { return {oracle::kDpSets.begin(), oracle::kDpSets.end()}; }

}  // namespace

TEST_CASE("trapezoid membership") {
  const TrapezoidMembership peak{0.6, 0.7, 0.7, 0.8};
  CHECK(membership_degree(peak, 0.7) == 1.0);
  CHECK(membership_degree(peak, 0.65) == Approx(0.5));
  CHECK(membership_degree(peak, 0.75) == Approx(0.5));
  CHECK(membership_degree(peak, 0.6) == 0.0);
  CHECK(membership_degree({0.0, 0.0, 0.6, 0.7}, 0.9) == 0.0);
  CHECK(membership_degree({0.0, 0.0, 0.6, 0.7}, 0.0) == 1.0);
  CHECK(membership_degree({0.8, 0.9, 1.0, 1.0}, 1.0) == 1.0);
}

TEST_CASE("membership degree stays in [0, 1] for random trapezoids") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20'000; ++i) {
    std::array<double, 4> p{u(gen), u(gen), u(gen), u(gen)};
    std::sort(p.begin(), p.end());
    if (i % 7 == 0) p[2] = p[1];
    const TrapezoidMembership mf{p[0], p[1], p[2], p[3]};
    for (int k = 0; k <= 50; ++k) {
      const double x = k / 50.0;
      const double m = membership_degree(mf, x);
      REQUIRE(m >= 0.0);
      REQUIRE(m <= 1.0);
      REQUIRE(m == Approx(oracle::degree({p[0], p[1], p[2], p[3]}, x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("fuzzify with the shipped variables") {
  const auto q75 = fuzzify(kCfg.q_var, 0.75);
  CHECK(deg(kCfg.q_var, q75, "empty") == 0.0);
  CHECK(deg(kCfg.q_var, q75, "low") == Approx(0.5));
  CHECK(deg(kCfg.q_var, q75, "moderate") == Approx(0.5));
  CHECK(deg(kCfg.q_var, q75, "full") == 0.0);

  const auto q0 = fuzzify(kCfg.q_var, 0.0);
  CHECK(q0 == Degrees{1.0, 0.0, 0.0, 0.0});

  const auto a1 = fuzzify(kCfg.avg_var, 1.0);
  CHECK(a1 == Degrees{0.0, 0.0, 1.0});

  CHECK_THROWS_AS((void)fuzzify(kCfg.q_var, 1.01), std::invalid_argument);
  CHECK_THROWS_AS((void)fuzzify(kCfg.q_var, -0.01), std::invalid_argument);
}

TEST_CASE("input variables cover the unit interval") {
  for (const auto* var : {&kCfg.q_var, &kCfg.avg_var}) {
    for (int i = 0; i <= 10'000; ++i) {
      const auto d = fuzzify(*var, i / 10'000.0);
      REQUIRE(*std::max_element(d.begin(), d.end()) > 0.0);
    }
  }
}

TEST_CASE("rule evaluation uses min for AND and max across rules") {
  const auto empty = evaluate_rules(kCfg, fuzzify(kCfg.q_var, 0.0), fuzzify(kCfg.avg_var, 0.0));
  CHECK(empty == only("zero", 1.0));

  Degrees q(4, 0.0), avg(3, 0.0);
  q[*kCfg.q_var.index_of("moderate")] = 0.5;
  avg[*kCfg.avg_var.index_of("low")] = 1.0;
  CHECK(evaluate_rules(kCfg, q, avg) == only("low", 0.5));

  CHECK(evaluate_rules(kCfg, Degrees(4, 0.0), Degrees(3, 0.0)) == Degrees(4, 0.0));
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(kCfg.validate());

  auto bad_label = kCfg;
  bad_label.rules.push_back({"huge", std::nullopt, "zero"});
  CHECK_THROWS_AS(bad_label.validate(), std::invalid_argument);

  auto no_antecedent = kCfg;
  no_antecedent.rules.push_back({std::nullopt, std::nullopt, "zero"});
  CHECK_THROWS_AS(no_antecedent.validate(), std::invalid_argument);

  auto gap = kCfg;
  gap.q_var.terms[0].mf = {0.0, 0.0, 0.3, 0.4};
  CHECK_THROWS_AS(gap.validate(), std::invalid_argument);

  auto edge_hole = kCfg;
  edge_hole.q_var.terms[3].mf = {0.8, 0.9, 0.9, 1.0};  // degree 0 at x = 1
  CHECK_THROWS_AS(edge_hole.validate(), std::invalid_argument);

  auto dup = kCfg;
  dup.avg_var.terms[1].label = "low";
  CHECK_THROWS_AS(dup.validate(), std::invalid_argument);

  auto coarse = kCfg;
  coarse.cog_step = 0.05;
  CHECK_THROWS_AS(coarse.validate(), std::invalid_argument);
}

TEST_CASE("centre of gravity of single full output sets matches the closed form") {
  auto one_set = kCfg;
  one_set.dp_var.terms = {{"mid", {0.3, 0.4, 0.5, 0.6}}};
  CHECK(defuzzify_cog(one_set, Degrees{1.0}) == Approx(0.45).epsilon(1e-9));

  CHECK(oracle::trapezoid_centroid(oracle::kDpSets[0]) == Approx(0.17619).epsilon(1e-5));
  for (std::size_t k = 0; k < 4; ++k) {
    Degrees act(4, 0.0);
    act[k] = 1.0;
    CHECK(defuzzify_cog(kCfg, act) ==
          Approx(oracle::trapezoid_centroid(oracle::kDpSets[k])).epsilon(1e-3));
  }
  CHECK(defuzzify_cog(kCfg, Degrees(4, 0.0)) == 0.0);
}

TEST_CASE("centre of gravity of clipped aggregates matches quadrature") {
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    Degrees act{u(gen), u(gen), u(gen), u(gen)};
    for (auto& a : act)
      if (u(gen) < 0.3) a = 0.0;
    if (*std::max_element(act.begin(), act.end()) == 0.0) act[1] = 0.4;
    const double got = defuzzify_cog(kCfg, act);
    CHECK(got == Approx(oracle::clipped_centroid(dp_sets(), act, 200'000)).epsilon(1e-3));

    double lo = 1.0, hi = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      if (act[k] > 0.0) {
        lo = std::min(lo, oracle::kDpSets[k].a);
        hi = std::max(hi, oracle::kDpSets[k].d);
      }
    }
    CHECK(got >= lo);
    CHECK(got <= hi);

    auto fine = kCfg;
    fine.cog_step = kCfg.cog_step / 2.0;
    CHECK(std::abs(defuzzify_cog(fine, act) - got) < 1e-3);
  }
}

TEST_CASE("symmetric trapezoids defuzzify to their midpoint") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> centre(0.2, 0.8), half(0.01, 0.2);
  for (int i = 0; i < 200; ++i) {
    const double m = centre(gen), outer = half(gen), inner = outer * 0.5 * centre(gen);
    auto cfg = kCfg;
    cfg.dp_var.terms = {{"s", {m - outer, m - inner, m + inner, m + outer}}};
    CHECK(std::abs(defuzzify_cog(cfg, Degrees{1.0}) - m) <= cfg.cog_step / 2.0);
  }
}

TEST_CASE("initial drop probability end to end") {
  const double zero_centroid = oracle::trapezoid_centroid(oracle::kDpSets[0]);
  const double high_centroid = oracle::trapezoid_centroid(oracle::kDpSets[3]);
  CHECK(fuzzy_initial_dp(kCfg, 0, 0, 20) == Approx(zero_centroid).epsilon(1e-3));
  CHECK(fuzzy_initial_dp(kCfg, 20, 20, 20) == Approx(high_centroid).epsilon(1e-3));
  CHECK(high_centroid == Approx(0.92222).epsilon(1e-5));

  // q = avg = 15 of 20: q {low .5, moderate .5}, avg {moderate .75}
  // => zero clipped at .5 (q low) and low clipped at .5 (moderate AND moderate)
  const double hand = oracle::clipped_centroid(dp_sets(), {0.5, 0.5, 0.0, 0.0});
  CHECK(fuzzy_initial_dp(kCfg, 15, 15, 20) == Approx(hand).epsilon(1e-3));

  CHECK_THROWS_AS((void)fuzzy_initial_dp(kCfg, 1, 1, 0), std::invalid_argument);
}

// Known to fail for the shipped rule base: clipping "zero" at 0.5 (q = 0.65,
// half empty / half low) moves its centroid right of the unclipped set, and at
// q = 0.75 raising avg from 0.85 to 0.9 retires the "low" consequent. Kept as
// an expected failure so a rule-base change that restores monotonicity shows up.
TEST_CASE("initial drop probability is monotone over the input grid" * doctest::should_fail()) {
  for (int i = 0; i <= 20; ++i) {
    double prev = -1.0;
    for (int j = 0; j <= 20; ++j) {
      const double p = fuzzy_initial_dp(kCfg, j * 0.05, i * 0.05, 1.0);
      REQUIRE(p >= prev - 1e-12);
      prev = p;
    }
    prev = -1.0;
    for (int j = 0; j <= 20; ++j) {
      const double p = fuzzy_initial_dp(kCfg, i * 0.05, j * 0.05, 1.0);
      REQUIRE(p >= prev - 1e-12);
      prev = p;
    }
  }
}

TEST_CASE("clipping a lone consequent shifts its centroid") {
  const double full = fuzzy_initial_dp(kCfg, 0.60, 0.0, 1.0);
  const double half = fuzzy_initial_dp(kCfg, 0.65, 0.0, 1.0);
  CHECK(full == Approx(oracle::clipped_centroid(dp_sets(), {1.0, 0, 0, 0})).epsilon(1e-3));
  CHECK(half == Approx(oracle::clipped_centroid(dp_sets(), {0.5, 0, 0, 0})).epsilon(1e-3));
  CHECK(half > full);
}

TEST_CASE("initial drop probability is monotone in q while avg is low") {
  for (int i = 0; i <= 12; ++i) {
    double prev = -1.0;
    for (int j = 14; j <= 20; ++j) {
      const double p = fuzzy_initial_dp(kCfg, j * 0.05, i * 0.05, 1.0);
      REQUIRE(p >= prev);
      prev = p;
    }
  }
}

TEST_CASE("precompiled engine agrees with the reference pipeline") {
  FuzzyEngine engine(kCfg);
  std::mt19937_64 gen(37);
  std::uniform_real_distribution<double> avg(0.0, 25.0);
  for (int i = 0; i < 3000; ++i) {
    const double q = static_cast<double>(i % 21);
    const double a = (i % 5 == 0) ? avg(gen) : 14.0;
    REQUIRE(engine.initial_dp(q, a, 20.0) == fuzzy_initial_dp(kCfg, q, a, 20.0));
  }
}

TEST_CASE("final drop probability merges the delay estimate") {
  CHECK(fuzzy_final_dp(0.4, 0.0, 0.05) == 0.4);
  CHECK(fuzzy_final_dp(0.4, 0.0, 3.0) == 0.4);
  CHECK(fuzzy_final_dp(0.4, 10.0, 0.05) == Approx(0.9));
  CHECK(fuzzy_final_dp(0.9, 10.0, 0.05) == 1.0);
}

TEST_CASE("fuzzy decisions") {
  FuzzyEngine engine(kCfg);
  const double zero_centroid = oracle::trapezoid_centroid(oracle::kDpSets[0]);

  auto calm = fuzzy_decide(engine, 0, 0, 0, 20, [] { return 0.5; });
  CHECK(calm.action == Action::Enqueue);
  CHECK(calm.dp_used == Approx(zero_centroid).epsilon(1e-3));

  auto unlucky = fuzzy_decide(engine, 0, 0, 0, 20, [] { return 0.1; });
  CHECK(unlucky.action == Action::Drop);

  auto jammed = fuzzy_decide(engine, 20, 20, 40, 20, [] { return 0.999999; });
  CHECK(jammed.action == Action::Drop);
  CHECK(jammed.dp_used == 1.0);

  RngStream rng(3);
  int drops = 0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    drops += fuzzy_decide(engine, 0, 0, 0, 20, rng).action == Action::Drop;
  }
  CHECK(std::abs(static_cast<double>(drops) / n - zero_centroid) < 0.005);
}
