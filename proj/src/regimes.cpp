#include "aqm/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

namespace aqm {

namespace {

const RegimeRun& regime(const std::vector<RegimeRun>& runs, double arrival) {
  for (const auto& r : runs)
    if (r.arrival_prob == arrival) return r;
  throw std::invalid_argument("regime not present");
}

std::array<const SimReport*, 4> all(const RegimeRun& r) {
  return {&r.red, &r.ered, &r.hybrid, &r.fuzzy};
}

constexpr std::array<const char*, 4> kNames{"RED", "ERED", "Hybrid", "Fuzzy"};

/// "RED=.. ERED=.. Hybrid=.. Fuzzy=.." for one field.
template <class Field>
std::string listing(const RegimeRun& r, Field field) {
  std::ostringstream s;
  auto reports = all(r);
  for (std::size_t i = 0; i < 4; ++i) {
    if (i) s << ' ';
    s << kNames[i] << '=' << field(*reports[i]);
  }
  return s.str();
}

struct Checker {
  bool ok = true;
  std::vector<std::string> failures;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      failures.push_back(what);
    }
  }

  [[nodiscard]] std::string failed() const {
    std::string s;
    for (const auto& f : failures) s += (s.empty() ? "" : "; ") + f;
    return s;
  }
};

CriterionResult finish(int id, std::string name, const Checker& c, const std::string& values) {
  return {id, std::move(name), c.ok, c.ok ? values : c.failed() + " | " + values};
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

std::vector<RegimeRun> run_regimes(const ExperimentSpec& spec) {
  const std::uint64_t seed = spec.seeds.front();
  std::vector<std::future<RegimeRun>> jobs;
  for (double arrival : kRegimeArrivals) {
    jobs.push_back(std::async(std::launch::async, [&spec, seed, arrival] {
      auto reports = run_pair_seeded({spec.config_for(PolicyKind::Red, arrival, seed),
                                      spec.config_for(PolicyKind::Ered, arrival, seed),
                                      spec.config_for(PolicyKind::Hybrid, arrival, seed),
                                      spec.config_for(PolicyKind::Fuzzy, arrival, seed)});
      return RegimeRun{arrival, reports[0], reports[1], reports[2], reports[3]};
    }));
  }
  std::vector<RegimeRun> runs;
  for (auto& j : jobs) runs.push_back(j.get());
  return runs;
}

std::vector<CriterionResult> evaluate_regimes(const std::vector<RegimeRun>& runs,
                                              const ExperimentSpec& spec) {
  std::vector<CriterionResult> out;
  const double measured =
      static_cast<double>(spec.traffic.total_slots - spec.traffic.warmup_slots);
  auto loss = [](const SimReport& r) { return r.loss; };
  auto dropped = [](const SimReport& r) { return r.dropped; };
  auto missed = [](const SimReport& r) { return r.missed; };
  auto delay = [](const SimReport& r) { return r.delay_mean; };

  {
    const auto& u = regime(runs, 0.33);
    Checker c;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& r = *all(u)[i];
      c.expect(r.loss == 0, std::string(kNames[i]) + " loss != 0");
      c.expect(r.dropped == 0, std::string(kNames[i]) + " dropped != 0");
      c.expect(r.arrived == u.red.arrived && r.departed == u.red.departed &&
                   r.delay_mean == u.red.delay_mean,
               std::string(kNames[i]) + " arrived/departed/delay differ from RED");
    }
    out.push_back(finish(1, "underload (0.33): no loss, no drops, identical traffic metrics", c,
                         listing(u, dropped) + " | delay " + listing(u, delay)));
  }

  const auto& s = regime(runs, 0.93);
  {
    Checker c;
    c.expect(s.red.loss > s.ered.loss, "loss RED > ERED");
    c.expect(s.ered.loss > s.hybrid.loss, "loss ERED > Hybrid");
    c.expect(s.hybrid.loss > s.fuzzy.loss, "loss Hybrid > Fuzzy");
    c.expect(s.fuzzy.loss <= 1000, "Fuzzy loss <= 1000");
    c.expect(s.red.dropped < s.ered.dropped, "dropped RED < ERED");
    c.expect(s.ered.dropped < s.hybrid.dropped, "dropped ERED < Hybrid");
    c.expect(s.hybrid.dropped <= s.fuzzy.dropped, "dropped Hybrid <= Fuzzy");
    c.expect(s.red.delay_mean > s.ered.delay_mean, "delay RED > ERED");
    c.expect(s.ered.delay_mean > s.hybrid.delay_mean, "delay ERED > Hybrid");
    c.expect(s.hybrid.delay_mean > s.fuzzy.delay_mean, "delay Hybrid > Fuzzy");
    std::uint64_t lo = UINT64_MAX, hi = 0;
    for (const auto* r : all(s)) {
      lo = std::min(lo, r->missed);
      hi = std::max(hi, r->missed);
    }
    c.expect(static_cast<double>(hi - lo) <= 0.02 * static_cast<double>(lo), "missed within 2%");
    out.push_back(finish(2, "saturation (0.93): loss/dropped/delay orderings, missed within 2%", c,
                         "loss " + listing(s, loss) + " | dropped " + listing(s, dropped) +
                             " | delay " + listing(s, delay) + " | missed " + listing(s, missed)));
  }
  {
    Checker c;
    const double expected_arrivals = 0.93 * measured;
    const double reference_missed = 0.93 * measured - spec.traffic.departure_prob * measured;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& r = *all(s)[i];
      c.expect(rel_diff(static_cast<double>(r.arrived), expected_arrivals) <= 0.005,
               std::string(kNames[i]) + " arrived within 0.5% of 0.93 x measured slots");
      c.expect(rel_diff(static_cast<double>(r.missed), reference_missed) <= 0.03,
               std::string(kNames[i]) + " missed within 3% of (0.93 - p_dep) x measured slots");
    }
    c.expect(rel_diff(s.red.delay_mean, 33.63675) <= 0.25, "RED delay within 25% of 33.63675");
    c.expect(rel_diff(s.fuzzy.delay_mean, 21.46638) <= 0.25,
             "Fuzzy delay within 25% of 21.46638");
    std::ostringstream ref;
    ref << "expected arrived " << expected_arrivals << ", reference missed " << reference_missed;
    out.push_back(finish(3, "saturation magnitudes (arrivals, missed, RED/Fuzzy delay)", c,
                         ref.str() + " | arrived " +
                             listing(s, [](const SimReport& r) { return r.arrived; }) +
                             " | missed " + listing(s, missed) + " | delay " + listing(s, delay)));
  }
  {
    Checker c;
    const auto& m66 = regime(runs, 0.66);
    const auto& m50 = regime(runs, 0.5);
    for (const auto* m : {&m66, &m50}) {
      char tag[16];
      std::snprintf(tag, sizeof tag, "@%.2f ", m->arrival_prob);
      c.expect(m->fuzzy.loss == 0, tag + std::string("Fuzzy loss == 0"));
      c.expect(m->hybrid.loss <= m->ered.loss, tag + std::string("loss Hybrid <= ERED"));
      c.expect(m->ered.loss <= m->red.loss, tag + std::string("loss ERED <= RED"));
    }
    c.expect(m66.hybrid.missed <= m66.ered.missed, "@0.66 missed Hybrid <= ERED");
    c.expect(m66.ered.missed <= m66.red.missed, "@0.66 missed ERED <= RED");
    out.push_back(finish(4, "mid-load (0.66, 0.5): loss and missed orderings", c,
                         "0.66 loss " + listing(m66, loss) + " missed " + listing(m66, missed) +
                             " | 0.5 loss " + listing(m50, loss)));
  }
  {
    Checker c;
    for (const auto& r : runs) {
      for (std::size_t i = 0; i < 4; ++i) {
        char tag[48];
        std::snprintf(tag, sizeof tag, "%s@%.2f conserves", kNames[i], r.arrival_prob);
        c.expect(all(r)[i]->conserves(), tag);
      }
    }
    out.push_back(finish(6, "conservation on every regime run", c, "16 runs checked"));
  }
  {
    Checker c;
    std::ostringstream vals;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& r = *all(s)[i];
      const double err = std::abs(r.mql - r.delay_mean * r.throughput) / r.mql;
      vals << kNames[i] << '=' << err << ' ';
      c.expect(err <= 0.05, std::string(kNames[i]) + " Little's-law residual <= 0.05");
    }
    out.push_back(finish(9, "Little's law at 0.93: |mql - delay*throughput|/mql <= 0.05", c,
                         vals.str()));
  }
  return out;
}

}  // namespace aqm
