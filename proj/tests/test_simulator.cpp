#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>

#include "aqm/simulator.hpp"

using namespace aqm;

namespace {

SimConfig short_config(PolicyKind kind, double arrival, std::uint64_t seed = 42) {
  SimConfig c;
  c.arrival_prob = arrival;
  c.total_slots = 200'000;
  c.warmup_slots = 50'000;
  c.policy.kind = kind;
  c.seed = seed;
  return c;
}

constexpr PolicyKind kAll[] = {PolicyKind::Red, PolicyKind::Ered, PolicyKind::Hybrid,
                               PolicyKind::Fuzzy};

}  // namespace

TEST_CASE("policy names round-trip") {
  for (auto k : kAll) CHECK(parse_policy(policy_name(k)) == k);
  CHECK(parse_policy("HYBRID") == PolicyKind::Hybrid);
  CHECK_FALSE(parse_policy("codel").has_value());
}

TEST_CASE("no arrivals means an empty system") {
  for (auto k : kAll) {
    const auto r = run(short_config(k, 0.0));
    CHECK(r.arrived == 0);
    CHECK(r.loss == 0);
    CHECK(r.dropped == 0);
    CHECK(r.departed == 0);
    CHECK(r.delay_mean == 0.0);
    CHECK(r.mql == 0.0);
  }
}

TEST_CASE("runs are deterministic in the seed") {
  for (auto k : kAll) {
    CHECK(run(short_config(k, 0.7)) == run(short_config(k, 0.7)));
  }
  CHECK_FALSE(run(short_config(PolicyKind::Red, 0.7, 1)) ==
              run(short_config(PolicyKind::Red, 0.7, 2)));
}

TEST_CASE("every run conserves packets and respects the throughput bound") {
  for (auto k : kAll) {
    for (double p : {0.1, 0.33, 0.5, 0.66, 0.93, 1.0}) {
      const auto c = short_config(k, p, 7);
      const auto r = run(c);
      CHECK(r.conserves());
      CHECK(r.missed == r.loss + r.dropped);
      // binomial noise on a short window: p + 4 sigma
      const double sigma = std::sqrt(0.25 / static_cast<double>(r.measured_slots));
      CHECK(r.throughput <= c.departure_prob + 4.0 * sigma);
      CHECK(r.throughput >= 0.0);
      CHECK(r.occupancy_at_end <= c.capacity);
    }
  }
}

TEST_CASE("shared seeds give every policy the same traffic") {
  std::vector<SimConfig> cfgs;
  for (auto k : kAll) cfgs.push_back(short_config(k, 0.93));
  const auto reports = run_pair_seeded(cfgs);
  REQUIRE(reports.size() == 4);
  for (const auto& r : reports) {
    CHECK(r.arrived == reports[0].arrived);
  }
}

TEST_CASE("light load: parametric policies never drop and agree exactly") {
  std::vector<SimConfig> cfgs;
  for (auto k : {PolicyKind::Red, PolicyKind::Ered, PolicyKind::Hybrid}) {
    cfgs.push_back(short_config(k, 0.33));
  }
  const auto reports = run_pair_seeded(cfgs);
  for (const auto& r : reports) {
    CHECK(r.loss == 0);
    CHECK(r.dropped == 0);
    CHECK(r == reports[0]);
  }
}

TEST_CASE("mismatched traffic is rejected") {
  auto a = short_config(PolicyKind::Red, 0.5);
  auto b = short_config(PolicyKind::Ered, 0.5);
  b.seed = 43;
  CHECK_THROWS_AS((void)run_pair_seeded({a, b}), std::invalid_argument);
  b = short_config(PolicyKind::Ered, 0.6);
  CHECK_THROWS_AS((void)run_pair_seeded({a, b}), std::invalid_argument);
}

TEST_CASE("hybrid with zero delay weight reproduces ERED") {
  for (double p : {0.5, 0.66, 0.93}) {
    auto ered = short_config(PolicyKind::Ered, p, 11);
    auto hybrid = short_config(PolicyKind::Hybrid, p, 11);
    hybrid.policy.delay_weight = 0.0;
    std::vector<std::pair<Slot, Decision>> ta, tb;
    const auto ra = run(ered, [&](Slot s, const Decision& d) { ta.emplace_back(s, d); });
    const auto rb = run(hybrid, [&](Slot s, const Decision& d) { tb.emplace_back(s, d); });
    CHECK(ra == rb);
    CHECK(ta == tb);
  }
}

TEST_CASE("invalid configs are rejected before running") {
  auto c = short_config(PolicyKind::Red, 0.5);
  c.arrival_prob = 1.5;
  CHECK_THROWS_AS((void)run(c), std::invalid_argument);
  c = short_config(PolicyKind::Red, 0.5);
  c.warmup_slots = c.total_slots;
  CHECK_THROWS_AS((void)run(c), std::invalid_argument);
  c = short_config(PolicyKind::Red, 0.5);
  c.capacity = 0;
  CHECK_THROWS_AS((void)run(c), std::invalid_argument);
  c = short_config(PolicyKind::Ered, 0.5);
  c.policy.red.min_th = 10.0;
  CHECK_THROWS_AS((void)run(c), std::invalid_argument);
  c = short_config(PolicyKind::Fuzzy, 0.5);
  c.policy.fuzzy.cog_step = 0.5;
  CHECK_THROWS_AS((void)run(c), std::invalid_argument);
}

TEST_CASE("saturated arrivals concentrate around p x measured slots") {
  SimConfig c;  // full-length defaults, arrival 0.93
  const auto r = run(c);
  const double expected = 0.93 * 1'200'000;
  CHECK(std::abs(static_cast<double>(r.arrived) - expected) / expected <= 0.005);
  CHECK(std::abs(r.mql - r.delay_mean * r.throughput) / r.mql <= 0.05);
  CHECK(r.throughput <= c.departure_prob + 1e-3);
}

TEST_CASE("a full-length run stays inside the time budget") {
  for (auto k : kAll) {
    SimConfig c;
    c.policy.kind = k;
    const auto t0 = std::chrono::steady_clock::now();
    (void)run(c);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    CHECK(dt.count() < 10.0);
  }
}
