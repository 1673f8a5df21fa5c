// aqmsim: run AQM policy sweeps on the slotted router-queue model.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aqm/experiment.hpp"
#include "aqm/regimes.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitCheckFailed = 2;

template <class T>
std::vector<T> split_list(const std::string& text, const std::string& flag) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::stringstream cell(item);
    T value{};
    if (!(cell >> value) || !(cell >> std::ws).eof()) {
      throw aqm::ConfigError(flag, "cannot parse '" + item + "'");
    }
    out.push_back(value);
  }
  if (out.empty()) throw aqm::ConfigError(flag, "empty list");
  return out;
}

struct Overrides {
  std::string config;
  std::string policy;
  std::string arrival;
  std::string seed;
  std::string format;
  std::optional<double> departure;
  std::optional<std::uint64_t> slots;
  std::optional<std::uint64_t> warmup;
  std::optional<std::size_t> capacity;
};

void add_overrides(CLI::App* cmd, Overrides& o, bool with_sweep) {
  cmd->add_option("--config", o.config, "JSON experiment document");
  cmd->add_option("--departure", o.departure, "departure probability per slot");
  cmd->add_option("--slots", o.slots, "total slots per run");
  cmd->add_option("--warmup", o.warmup, "warm-up slots discarded from statistics");
  cmd->add_option("--capacity", o.capacity, "router buffer capacity in packets");
  cmd->add_option("--seed", o.seed, "seed(s), comma separated");
  if (with_sweep) {
    cmd->add_option("--policy", o.policy, "red|ered|hybrid|fuzzy, comma separated");
    cmd->add_option("--arrival", o.arrival, "arrival probability(ies), comma separated");
    cmd->add_option("--format", o.format, "csv|json|table");
  }
}

aqm::ExperimentSpec build_spec(const Overrides& o) {
  aqm::ExperimentSpec spec = o.config.empty() ? aqm::ExperimentSpec{} : aqm::load_spec_file(o.config);
  if (o.departure) spec.traffic.departure_prob = *o.departure;
  if (o.slots) spec.traffic.total_slots = *o.slots;
  if (o.warmup) spec.traffic.warmup_slots = *o.warmup;
  if (o.capacity) spec.traffic.capacity = *o.capacity;
  if (!o.seed.empty()) spec.seeds = split_list<std::uint64_t>(o.seed, "--seed");
  if (!o.arrival.empty()) spec.arrival_probs = split_list<double>(o.arrival, "--arrival");
  if (!o.policy.empty()) {
    spec.policies.clear();
    for (const auto& name : split_list<std::string>(o.policy, "--policy")) {
      auto kind = aqm::parse_policy(name);
      if (!kind) throw aqm::ConfigError("--policy", "unknown policy '" + name + "'");
      spec.policies.push_back(*kind);
    }
  }
  if (!o.format.empty()) {
    auto fmt = aqm::parse_format(o.format);
    if (!fmt) throw aqm::ConfigError("--format", "expected csv, json or table");
    spec.format = *fmt;
  }
  spec.validate();
  return spec;
}

int cmd_run(const Overrides& o, const std::string& out_path) {
  const auto spec = build_spec(o);
  const auto rows = aqm::run_experiment(spec);
  if (out_path.empty() || out_path == "-") {
    aqm::emit(rows, spec.format, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw aqm::ConfigError("--out", "cannot open " + out_path);
    aqm::emit(rows, spec.format, out);
  }
  return kExitOk;
}

int cmd_check(const Overrides& o) {
  const auto spec = build_spec(o);
  const auto results = aqm::evaluate_regimes(aqm::run_regimes(spec), spec);
  bool all_ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << "\n     "
              << r.detail << '\n';
    all_ok = all_ok && r.passed;
  }
  return all_ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slotted router-queue simulator for RED, ERED, Hybrid-ERED and Fuzzy Hybrid-ERED"};
  app.require_subcommand(1);

  Overrides run_opts;
  std::string out_path = "-";
  auto* run = app.add_subcommand("run", "run a policy x arrival-probability sweep");
  add_overrides(run, run_opts, true);
  run->add_option("--out", out_path, "output file, or - for stdout");

  Overrides check_opts;
  auto* check = app.add_subcommand("check", "run the four reference regimes and test orderings");
  add_overrides(check, check_opts, false);

  auto* defaults = app.add_subcommand("defaults", "print the default experiment document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run) return cmd_run(run_opts, out_path);
    if (*check) return cmd_check(check_opts);
    if (*defaults) {
      std::cout << aqm::spec_to_json(aqm::ExperimentSpec{}).dump(2) << '\n';
      return kExitOk;
    }
  } catch (const aqm::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}
