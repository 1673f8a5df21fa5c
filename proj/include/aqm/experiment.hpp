#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aqm/simulator.hpp"

namespace aqm {

/// Validation failure in an experiment document or flag set; `what()` starts
/// with the field path, e.g. "sweep.arrival_probs[1]: ...".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(path) {}
  [[nodiscard]] const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

enum class OutputFormat { Csv, Json, Table };

struct TrafficSettings {
  double departure_prob = 0.5;
  std::uint64_t total_slots = 2'000'000;
  std::uint64_t warmup_slots = 800'000;
  std::size_t capacity = 20;
  double arrival_weight = 0.2;
  double departure_weight = 0.2;

  friend bool operator==(const TrafficSettings&, const TrafficSettings&) = default;
};

/// Parameter payload for every policy kind, whether or not it is swept.
struct PolicyParams {
  RedParams red;
  RedParams ered;
  RedParams hybrid;
  double hybrid_delay_weight = 0.05;
  double fuzzy_queue_weight = 0.002;
  FisConfig fuzzy = FisConfig::defaults();

  [[nodiscard]] PolicySpec spec_for(PolicyKind kind) const;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

struct ExperimentSpec {
  TrafficSettings traffic;
  PolicyParams params;
  std::vector<PolicyKind> policies{PolicyKind::Red, PolicyKind::Ered, PolicyKind::Hybrid,
                                   PolicyKind::Fuzzy};
  std::vector<double> arrival_probs{0.33, 0.5, 0.66, 0.93};
  std::vector<std::uint64_t> seeds{42};
  OutputFormat format = OutputFormat::Csv;

  /// Throws ConfigError.
  void validate() const;

  [[nodiscard]] SimConfig config_for(PolicyKind kind, double arrival_prob,
                                     std::uint64_t seed) const;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

[[nodiscard]] ExperimentSpec spec_from_json(const nlohmann::json& doc);
[[nodiscard]] nlohmann::json spec_to_json(const ExperimentSpec& spec);
/// Reads and validates a JSON experiment document.
[[nodiscard]] ExperimentSpec load_spec_file(const std::string& path);

[[nodiscard]] std::string format_name(OutputFormat f);
[[nodiscard]] std::optional<OutputFormat> parse_format(std::string_view s);

struct ResultRow {
  std::string policy;
  double arrival_prob = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t arrived = 0;
  std::uint64_t departed = 0;
  std::uint64_t loss = 0;
  std::uint64_t dropped = 0;
  std::uint64_t missed = 0;
  double delay = 0.0;
  double mql = 0.0;
  double throughput = 0.0;

  static ResultRow from_report(PolicyKind kind, double arrival_prob, std::uint64_t seed,
                               const SimReport& r);

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Runs every (policy, arrival_prob, seed) combination. Policies sharing an
/// (arrival_prob, seed) point see the same traffic. Rows are ordered by policy
/// (spec order), then arrival_prob ascending, then seed ascending; independent
/// points run on a worker pool of `workers` threads (0 = hardware concurrency).
[[nodiscard]] std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                                    unsigned workers = 0);

inline const char* const kCsvHeader =
    "policy,arrival_prob,seed,arrived,departed,loss,dropped,missed,delay,mql,throughput";

void emit(const std::vector<ResultRow>& rows, OutputFormat format, std::ostream& out);
[[nodiscard]] std::string emit_string(const std::vector<ResultRow>& rows, OutputFormat format);
[[nodiscard]] std::vector<ResultRow> rows_from_json(const nlohmann::json& doc);

}  // namespace aqm
