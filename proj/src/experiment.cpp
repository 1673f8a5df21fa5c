#include "aqm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace aqm {

using nlohmann::json;

namespace {

/// Typed, path-aware access to one JSON object; rejects keys it never read.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  [[nodiscard]] std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* j = find(key)) out = as_double(*j, at(key));
  }

  template <class Int>
  void count(const std::string& key, Int& out) {
    if (const json* j = find(key)) out = static_cast<Int>(as_uint(*j, at(key)));
  }

  void finish() const {
    for (const auto& [key, _] : node_.items()) {
      if (!used_.contains(key)) throw ConfigError(at(key), "unknown field");
    }
  }

  static double as_double(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
  }

  static std::uint64_t as_uint(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
      if (j.get<std::int64_t>() < 0) throw ConfigError(path, "expected a non-negative integer");
      return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    if (j.is_number_float()) {
      const double v = j.get<double>();
      if (v >= 0.0 && v == std::floor(v) && v < 1.8e19) return static_cast<std::uint64_t>(v);
    }
    throw ConfigError(path, "expected a non-negative integer");
  }

  static std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
  }

  static const json& as_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array");
    return j;
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

std::string indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void read_red(Section& parent, const std::string& key, RedParams& red, double* delay_weight) {
  const json* j = parent.find(key);
  if (!j) return;
  Section s(*j, parent.at(key));
  s.number("min_th", red.min_th);
  s.number("max_th", red.max_th);
  s.number("max_p", red.max_p);
  s.number("queue_weight", red.queue_weight);
  if (delay_weight) s.number("delay_weight", *delay_weight);
  s.finish();
}

LinguisticVariable read_variable(const json& j, const std::string& path, const std::string& name) {
  LinguisticVariable var{name, {}};
  const json& arr = Section::as_array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = indexed(path, i);
    Section t(arr[i], p);
    FuzzyTerm term;
    const json* label = t.find("label");
    if (!label) throw ConfigError(p + ".label", "required");
    term.label = Section::as_string(*label, p + ".label");
    const json* mf = t.find("mf");
    if (!mf) throw ConfigError(p + ".mf", "required");
    const json& pts = Section::as_array(*mf, p + ".mf");
    if (pts.size() != 4) throw ConfigError(p + ".mf", "expected 4 breakpoints [a, b, c, d]");
    term.mf = {Section::as_double(pts[0], p + ".mf[0]"), Section::as_double(pts[1], p + ".mf[1]"),
               Section::as_double(pts[2], p + ".mf[2]"), Section::as_double(pts[3], p + ".mf[3]")};
    t.finish();
    var.terms.push_back(std::move(term));
  }
  return var;
}

json variable_to_json(const LinguisticVariable& var) {
  json arr = json::array();
  for (const auto& t : var.terms) {
    arr.push_back({{"label", t.label}, {"mf", {t.mf.a, t.mf.b, t.mf.c, t.mf.d}}});
  }
  return arr;
}

void read_fuzzy(const json& j, FisConfig& cfg) {
  Section s(j, "fuzzy");
  s.number("cog_step", cfg.cog_step);
  s.number("delay_weight", cfg.delay_weight);
  if (const json* v = s.find("q")) cfg.q_var = read_variable(*v, "fuzzy.q", "q");
  if (const json* v = s.find("avg")) cfg.avg_var = read_variable(*v, "fuzzy.avg", "avg");
  if (const json* v = s.find("dp")) cfg.dp_var = read_variable(*v, "fuzzy.dp", "dp");
  if (const json* v = s.find("rules")) {
    const json& arr = Section::as_array(*v, "fuzzy.rules");
    cfg.rules.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = indexed("fuzzy.rules", i);
      Section r(arr[i], p);
      FuzzyRule rule;
      if (const json* q = r.find("q")) rule.q = Section::as_string(*q, p + ".q");
      if (const json* a = r.find("avg")) rule.avg = Section::as_string(*a, p + ".avg");
      const json* dp = r.find("dp");
      if (!dp) throw ConfigError(p + ".dp", "required");
      rule.dp = Section::as_string(*dp, p + ".dp");
      r.finish();
      cfg.rules.push_back(std::move(rule));
    }
  }
  s.finish();
}

json red_to_json(const RedParams& r) {
  return {{"min_th", r.min_th}, {"max_th", r.max_th}, {"max_p", r.max_p},
          {"queue_weight", r.queue_weight}};
}

void check_unit(double p, const std::string& path) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(path, "probability must lie in [0, 1]");
}

void check_red(const RedParams& r, const std::string& path) {
  try {
    r.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

std::string fixed5(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5f", v);
  return buf;
}

}  // namespace

PolicySpec PolicyParams::spec_for(PolicyKind kind) const {
  PolicySpec s;
  s.kind = kind;
  s.fuzzy = fuzzy;
  switch (kind) {
    case PolicyKind::Red: s.red = red; break;
    case PolicyKind::Ered: s.red = ered; break;
    case PolicyKind::Hybrid:
      s.red = hybrid;
      s.delay_weight = hybrid_delay_weight;
      break;
    case PolicyKind::Fuzzy:
      s.red.queue_weight = fuzzy_queue_weight;
      s.delay_weight = fuzzy.delay_weight;
      break;
  }
  return s;
}

void ExperimentSpec::validate() const {
  check_unit(traffic.departure_prob, "traffic.departure_prob");
  if (traffic.total_slots == 0) throw ConfigError("traffic.slots", "must be positive");
  if (!(traffic.warmup_slots < traffic.total_slots)) {
    throw ConfigError("traffic.warmup", "must be below traffic.slots");
  }
  if (traffic.capacity < 1) throw ConfigError("traffic.capacity", "must be at least 1");
  if (!(traffic.arrival_weight > 0.0 && traffic.arrival_weight < 1.0)) {
    throw ConfigError("traffic.arrival_weight", "must lie in (0, 1)");
  }
  if (!(traffic.departure_weight > 0.0 && traffic.departure_weight < 1.0)) {
    throw ConfigError("traffic.departure_weight", "must lie in (0, 1)");
  }
  check_red(params.red, "policy.red");
  check_red(params.ered, "policy.ered");
  check_red(params.hybrid, "policy.hybrid");
  if (!(params.hybrid_delay_weight >= 0.0)) {
    throw ConfigError("policy.hybrid.delay_weight", "must be non-negative");
  }
  if (!(params.fuzzy_queue_weight > 0.0 && params.fuzzy_queue_weight <= 1.0)) {
    throw ConfigError("policy.fuzzy.queue_weight", "must lie in (0, 1]");
  }
  try {
    params.fuzzy.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("fuzzy", e.what());
  }
  if (policies.empty()) throw ConfigError("sweep.policies", "at least one policy is required");
  std::set<PolicyKind> seen;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    if (!seen.insert(policies[i]).second) {
      throw ConfigError(indexed("sweep.policies", i), "duplicate policy");
    }
  }
  if (arrival_probs.empty()) {
    throw ConfigError("sweep.arrival_probs", "at least one arrival probability is required");
  }
  for (std::size_t i = 0; i < arrival_probs.size(); ++i) {
    check_unit(arrival_probs[i], indexed("sweep.arrival_probs", i));
  }
  if (seeds.empty()) throw ConfigError("sweep.seeds", "at least one seed is required");
}

SimConfig ExperimentSpec::config_for(PolicyKind kind, double arrival_prob,
                                     std::uint64_t seed) const {
  SimConfig c;
  c.arrival_prob = arrival_prob;
  c.departure_prob = traffic.departure_prob;
  c.total_slots = traffic.total_slots;
  c.warmup_slots = traffic.warmup_slots;
  c.capacity = traffic.capacity;
  c.arrival_weight = traffic.arrival_weight;
  c.departure_weight = traffic.departure_weight;
  c.policy = params.spec_for(kind);
  c.seed = seed;
  return c;
}

std::string format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    case OutputFormat::Table: return "table";
  }
  return "csv";
}

std::optional<OutputFormat> parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "table") return OutputFormat::Table;
  return std::nullopt;
}

ExperimentSpec spec_from_json(const json& doc) {
  ExperimentSpec spec;
  if (doc.is_null()) {
    spec.validate();
    return spec;
  }
  Section root(doc, "");
  if (const json* t = root.find("traffic")) {
    Section s(*t, "traffic");
    s.number("departure_prob", spec.traffic.departure_prob);
    s.count("slots", spec.traffic.total_slots);
    s.count("warmup", spec.traffic.warmup_slots);
    s.count("capacity", spec.traffic.capacity);
    s.number("arrival_weight", spec.traffic.arrival_weight);
    s.number("departure_weight", spec.traffic.departure_weight);
    s.finish();
  }
  if (const json* p = root.find("policy")) {
    Section s(*p, "policy");
    read_red(s, "red", spec.params.red, nullptr);
    read_red(s, "ered", spec.params.ered, nullptr);
    read_red(s, "hybrid", spec.params.hybrid, &spec.params.hybrid_delay_weight);
    if (const json* f = s.find("fuzzy")) {
      Section fs(*f, "policy.fuzzy");
      fs.number("queue_weight", spec.params.fuzzy_queue_weight);
      fs.finish();
    }
    s.finish();
  }
  if (const json* f = root.find("fuzzy")) read_fuzzy(*f, spec.params.fuzzy);
  if (const json* w = root.find("sweep")) {
    Section s(*w, "sweep");
    if (const json* v = s.find("policies")) {
      const json& arr = Section::as_array(*v, "sweep.policies");
      spec.policies.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = indexed("sweep.policies", i);
        auto kind = parse_policy(Section::as_string(arr[i], p));
        if (!kind) throw ConfigError(p, "unknown policy '" + arr[i].get<std::string>() + "'");
        spec.policies.push_back(*kind);
      }
    }
    if (const json* v = s.find("arrival_probs")) {
      const json& arr = Section::as_array(*v, "sweep.arrival_probs");
      spec.arrival_probs.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        spec.arrival_probs.push_back(Section::as_double(arr[i], indexed("sweep.arrival_probs", i)));
      }
    }
    if (const json* v = s.find("seeds")) {
      const json& arr = Section::as_array(*v, "sweep.seeds");
      spec.seeds.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        spec.seeds.push_back(Section::as_uint(arr[i], indexed("sweep.seeds", i)));
      }
    }
    s.finish();
  }
  if (const json* o = root.find("output")) {
    Section s(*o, "output");
    if (const json* f = s.find("format")) {
      auto fmt = parse_format(Section::as_string(*f, "output.format"));
      if (!fmt) throw ConfigError("output.format", "expected csv, json or table");
      spec.format = *fmt;
    }
    s.finish();
  }
  root.finish();
  spec.validate();
  return spec;
}

json spec_to_json(const ExperimentSpec& spec) {
  json policies = json::array();
  for (auto k : spec.policies) {
    std::string name(policy_name(k));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    policies.push_back(name);
  }
  json hybrid = red_to_json(spec.params.hybrid);
  hybrid["delay_weight"] = spec.params.hybrid_delay_weight;
  json rules = json::array();
  for (const auto& r : spec.params.fuzzy.rules) {
    json jr = json::object();
    if (r.q) jr["q"] = *r.q;
    if (r.avg) jr["avg"] = *r.avg;
    jr["dp"] = r.dp;
    rules.push_back(std::move(jr));
  }
  return {
      {"traffic",
       {{"departure_prob", spec.traffic.departure_prob},
        {"slots", spec.traffic.total_slots},
        {"warmup", spec.traffic.warmup_slots},
        {"capacity", spec.traffic.capacity},
        {"arrival_weight", spec.traffic.arrival_weight},
        {"departure_weight", spec.traffic.departure_weight}}},
      {"policy",
       {{"red", red_to_json(spec.params.red)},
        {"ered", red_to_json(spec.params.ered)},
        {"hybrid", hybrid},
        {"fuzzy", {{"queue_weight", spec.params.fuzzy_queue_weight}}}}},
      {"fuzzy",
       {{"cog_step", spec.params.fuzzy.cog_step},
        {"delay_weight", spec.params.fuzzy.delay_weight},
        {"q", variable_to_json(spec.params.fuzzy.q_var)},
        {"avg", variable_to_json(spec.params.fuzzy.avg_var)},
        {"dp", variable_to_json(spec.params.fuzzy.dp_var)},
        {"rules", rules}}},
      {"sweep",
       {{"policies", policies}, {"arrival_probs", spec.arrival_probs}, {"seeds", spec.seeds}}},
      {"output", {{"format", format_name(spec.format)}}},
  };
}

ExperimentSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("malformed JSON: ") + e.what());
  }
  return spec_from_json(doc);
}

ResultRow ResultRow::from_report(PolicyKind kind, double arrival_prob, std::uint64_t seed,
                                 const SimReport& r) {
  return {std::string(policy_name(kind)), arrival_prob, seed, r.arrived, r.departed, r.loss,
          r.dropped, r.missed, r.delay_mean, r.mql, r.throughput};
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, unsigned workers) {
  spec.validate();
  std::vector<double> probs = spec.arrival_probs;
  std::sort(probs.begin(), probs.end());
  std::vector<std::uint64_t> seeds = spec.seeds;
  std::sort(seeds.begin(), seeds.end());

  struct Point {
    double arrival_prob;
    std::uint64_t seed;
  };
  std::vector<Point> points;
  for (double p : probs)
    for (auto s : seeds) points.push_back({p, s});

  std::vector<std::vector<SimReport>> results(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        std::vector<SimConfig> configs;
        for (auto k : spec.policies) {
          configs.push_back(spec.config_for(k, points[i].arrival_prob, points[i].seed));
        }
        results[i] = run_pair_seeded(configs);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, points.size()));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<ResultRow> rows;
  for (std::size_t k = 0; k < spec.policies.size(); ++k) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      rows.push_back(ResultRow::from_report(spec.policies[k], points[i].arrival_prob,
                                            points[i].seed, results[i][k]));
    }
  }
  return rows;
}

namespace {

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.policy << ',' << fixed5(r.arrival_prob) << ',' << r.seed << ',' << r.arrived << ','
        << r.departed << ',' << r.loss << ',' << r.dropped << ',' << r.missed << ','
        << fixed5(r.delay) << ',' << fixed5(r.mql) << ',' << fixed5(r.throughput) << '\n';
  }
}

json row_to_json(const ResultRow& r) {
  return {{"policy", r.policy},   {"arrival_prob", r.arrival_prob},
          {"seed", r.seed},       {"arrived", r.arrived},
          {"departed", r.departed}, {"loss", r.loss},
          {"dropped", r.dropped}, {"missed", r.missed},
          {"delay", r.delay},     {"mql", r.mql},
          {"throughput", r.throughput}};
}

void pad(std::ostream& out, const std::string& s, std::size_t width) {
  out << s;
  for (std::size_t i = s.size(); i < width; ++i) out << ' ';
}

void emit_table(const std::vector<ResultRow>& rows, std::ostream& out) {
  std::set<double> probs;
  std::set<std::uint64_t> seeds;
  for (const auto& r : rows) {
    probs.insert(r.arrival_prob);
    seeds.insert(r.seed);
  }
  if (probs.size() == 1 && seeds.size() == 1) {
    // metrics down, policies across
    constexpr std::size_t kLabel = 18;
    constexpr std::size_t kCol = 14;
    out << "arrival_prob " << fixed5(*probs.begin()) << ", seed " << *seeds.begin() << '\n';
    pad(out, "", kLabel);
    for (const auto& r : rows) pad(out, r.policy, kCol);
    out << '\n';
    auto line = [&](const std::string& label, auto field) {
      pad(out, label, kLabel);
      for (const auto& r : rows) pad(out, field(r), kCol);
      out << '\n';
    };
    line("#Packet arrived", [](const ResultRow& r) { return std::to_string(r.arrived); });
    line("#Packet depart.", [](const ResultRow& r) { return std::to_string(r.departed); });
    line("#Packet loss", [](const ResultRow& r) { return std::to_string(r.loss); });
    line("#Packet dropped", [](const ResultRow& r) { return std::to_string(r.dropped); });
    line("#Packet missed", [](const ResultRow& r) { return std::to_string(r.missed); });
    line("delay", [](const ResultRow& r) { return fixed5(r.delay); });
    line("mql", [](const ResultRow& r) { return fixed5(r.mql); });
    line("throughput", [](const ResultRow& r) { return fixed5(r.throughput); });
    return;
  }
  const std::vector<std::pair<std::string, std::size_t>> cols{
      {"policy", 8},  {"arrival", 9}, {"seed", 12}, {"arrived", 10},
      {"departed", 10}, {"loss", 9},  {"dropped", 9}, {"missed", 9},
      {"delay", 11},  {"mql", 10},    {"throughput", 10}};
  for (const auto& [name, w] : cols) pad(out, name, w + 1);
  out << '\n';
  for (const auto& r : rows) {
    const std::vector<std::string> cells{
        r.policy, fixed5(r.arrival_prob), std::to_string(r.seed), std::to_string(r.arrived),
        std::to_string(r.departed), std::to_string(r.loss), std::to_string(r.dropped),
        std::to_string(r.missed), fixed5(r.delay), fixed5(r.mql), fixed5(r.throughput)};
    for (std::size_t i = 0; i < cols.size(); ++i) pad(out, cells[i], cols[i].second + 1);
    out << '\n';
  }
}

}  // namespace

void emit(const std::vector<ResultRow>& rows, OutputFormat format, std::ostream& out) {
  switch (format) {
    case OutputFormat::Csv: emit_csv(rows, out); break;
    case OutputFormat::Json: {
      json arr = json::array();
      for (const auto& r : rows) arr.push_back(row_to_json(r));
      out << arr.dump(2) << '\n';
      break;
    }
    case OutputFormat::Table: emit_table(rows, out); break;
  }
}

std::string emit_string(const std::vector<ResultRow>& rows, OutputFormat format) {
  std::ostringstream out;
  emit(rows, format, out);
  return out.str();
}

std::vector<ResultRow> rows_from_json(const json& doc) {
  std::vector<ResultRow> rows;
  const json& arr = Section::as_array(doc, "rows");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = indexed("rows", i);
    Section s(arr[i], p);
    ResultRow r;
    if (const json* v = s.find("policy")) r.policy = Section::as_string(*v, p + ".policy");
    s.number("arrival_prob", r.arrival_prob);
    s.count("seed", r.seed);
    s.count("arrived", r.arrived);
    s.count("departed", r.departed);
    s.count("loss", r.loss);
    s.count("dropped", r.dropped);
    s.count("missed", r.missed);
    s.number("delay", r.delay);
    s.number("mql", r.mql);
    s.number("throughput", r.throughput);
    s.finish();
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace aqm
