#include "mrsl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "mrsl/config.hpp"
#include "mrsl/errors.hpp"

namespace mrsl {

using nlohmann::json;

namespace {

struct ScenarioName {
  Scenario scenario;
  const char* name;
};

constexpr ScenarioName kScenarioNames[] = {
    {Scenario::kComparison6x6, "comparison-6x6"}, {Scenario::kScalability, "scalability"},
    {Scenario::kNlos, "nlos"},                    {Scenario::kPdrChallenge, "pdr-challenge"},
    {Scenario::kLarge60x60, "large-60x60"},       {Scenario::kCustom, "custom"},
};

}  // namespace

std::string to_string(Scenario scenario) {
  for (const auto& s : kScenarioNames) {
    if (s.scenario == scenario) return s.name;
  }
  return "custom";
}

Scenario parse_scenario(const std::string& name) {
  for (const auto& s : kScenarioNames) {
    if (name == s.name) return s.scenario;
  }
  throw ConfigError("scenario", "unknown scenario '" + name + "'");
}

std::vector<std::size_t> scalability_grid() {
  std::vector<std::size_t> grid;
  for (std::size_t n = 1; n <= 99; n += 2) grid.push_back(n);
  grid.push_back(100);
  return grid;
}

ScenarioPreset make_preset(Scenario scenario) {
  ScenarioPreset p;
  p.scenario = scenario;
  p.base.world.n_robots = 3;
  switch (scenario) {
    case Scenario::kComparison6x6:
      p.description = "3 robots, open 6x6 m workspace, lossless bus";
      break;
    case Scenario::kScalability:
      p.description = "6x6 m workspace, robot count swept over 1,3,...,99 and 100";
      p.n_robots_grid = scalability_grid();
      break;
    case Scenario::kNlos:
      p.description = "3 robots, two 10 dB walls, 3 non-cooperating obstacle robots";
      p.base.world.walls = {WallSegment{{1.5, 4.0}, {3.5, 4.0}, 10.0},
                            WallSegment{{4.0, 1.0}, {4.0, 3.0}, 10.0}};
      p.base.world.n_obstacle_robots = 3;
      break;
    case Scenario::kPdrChallenge:
      p.description = "5 robots, 70% packet drop ratio";
      p.base.world.n_robots = 5;
      p.base.world.pdr = 0.7;
      break;
    case Scenario::kLarge60x60:
      p.description = "3 robots, 60x60 m workspace, otherwise the 6x6 defaults";
      p.base.world.width = 60.0;
      p.base.world.height = 60.0;
      p.default_trials = 10;
      break;
    case Scenario::kCustom:
      p.description = "defaults of the 6x6 comparison; set everything through overrides";
      break;
  }
  if (p.n_robots_grid.empty()) p.n_robots_grid = {p.base.world.n_robots};
  p.pdr_grid = {p.base.world.pdr};
  return p;
}

std::vector<ScenarioPreset> all_presets() {
  std::vector<ScenarioPreset> out;
  for (const auto& s : kScenarioNames) out.push_back(make_preset(s.scenario));
  return out;
}

json ResolvedExperiment::to_json() const {
  json algs = json::array();
  for (auto a : algorithms) algs.push_back(to_string(a));
  json doc = mrsl::to_json(base);
  doc["sweep"] = {{"n_robots", n_robots_grid}, {"pdr", pdr_grid}};
  doc["harness"] = {{"burn_in_ticks", burn_in_ticks}};
  return {{"scenario", to_string(scenario)},
          {"algorithms", algs},
          {"trials", trials},
          {"master_seed", master_seed},
          {"config", doc}};
}

namespace {

template <typename T>
std::vector<T> read_grid(const json& doc, const char* key) {
  const std::string path = std::string("sweep.") + key;
  const json& v = doc.at("sweep").at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty list");
  std::vector<T> out;
  for (const auto& item : v) {
    if constexpr (std::is_integral_v<T>) {
      if (!item.is_number_unsigned()) throw ConfigError(path, "expected non-negative integers");
    } else {
      if (!item.is_number()) throw ConfigError(path, "expected numbers");
    }
    out.push_back(item.get<T>());
  }
  return out;
}

}  // namespace

ResolvedExperiment resolve(const ExperimentConfig& config) {
  const ScenarioPreset preset = make_preset(config.scenario);
  json doc = to_json(preset.base);
  doc["sweep"] = {{"n_robots", preset.n_robots_grid}, {"pdr", preset.pdr_grid}};
  doc["harness"] = {{"burn_in_ticks", std::size_t{10}}};

  std::set<std::string> touched;
  if (config.config_file) {
    if (!config.config_file->is_object()) throw ConfigError("config", "expected an object");
    for (const auto& [section, body] : config.config_file->items()) {
      if (!doc.contains(section)) throw ConfigError(section, "unknown key");
      if (!body.is_object()) throw ConfigError(section, "expected an object");
      for (const auto& [key, value] : body.items()) {
        apply_override(doc, section + "." + key + "=" + value.dump());
        touched.insert(section + "." + key);
      }
    }
  }
  for (const auto& o : config.overrides) touched.insert(apply_override(doc, o));

  for (const std::string field : {"n_robots", "pdr"}) {
    if (touched.contains("world." + field) && !touched.contains("sweep." + field)) {
      doc["sweep"][field] = json::array({doc["world"][field]});
    }
  }

  ResolvedExperiment r;
  r.scenario = config.scenario;
  r.algorithms = config.algorithms;
  if (r.algorithms.empty()) throw ConfigError("algorithm", "at least one algorithm is required");
  r.trials = config.trials == 0 ? preset.default_trials : config.trials;
  r.master_seed = config.master_seed;

  json sim_doc = doc;
  sim_doc.erase("sweep");
  sim_doc.erase("harness");
  r.base = merge_simulation_config(SimulationConfig{}, sim_doc);
  r.n_robots_grid = read_grid<std::size_t>(doc, "n_robots");
  r.pdr_grid = read_grid<double>(doc, "pdr");
  const json& burn = doc.at("harness").at("burn_in_ticks");
  if (!burn.is_number_unsigned()) throw ConfigError("harness.burn_in_ticks", "expected a non-negative integer");
  r.burn_in_ticks = burn.get<std::size_t>();
  r.base.validate();

  for (std::size_t n : r.n_robots_grid) {
    if (n < 1) throw ConfigError("sweep.n_robots", "robot counts must be at least 1");
  }
  for (double pdr : r.pdr_grid) {
    if (!(pdr >= 0.0 && pdr <= 1.0)) throw ConfigError("sweep.pdr", "values must lie in [0, 1]");
  }
  if (r.burn_in_ticks >= r.base.world.ticks()) {
    throw ConfigError("harness.burn_in_ticks", "burn-in must be shorter than the trial");
  }
  return r;
}

json record_to_json(const MetricsRecord& r) {
  return {{"scenario", r.scenario},
          {"algorithm", to_string(r.algorithm)},
          {"n_robots", r.n_robots},
          {"pdr", r.pdr},
          {"trial", r.trial},
          {"trial_seed", r.trial_seed},
          {"rmse", r.rmse},
          {"mean_fused_msgs_per_tick", r.mean_fused_msgs_per_tick},
          {"degeneracy_events", r.degeneracy_events}};
}

MetricsRecord record_from_json(const json& j) {
  MetricsRecord r;
  try {
    r.scenario = j.at("scenario").get<std::string>();
    r.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    r.n_robots = j.at("n_robots").get<std::size_t>();
    r.pdr = j.at("pdr").get<double>();
    r.trial = j.at("trial").get<std::size_t>();
    r.trial_seed = j.at("trial_seed").get<std::uint64_t>();
    r.rmse = j.at("rmse").get<double>();
    r.mean_fused_msgs_per_tick = j.at("mean_fused_msgs_per_tick").get<double>();
    r.degeneracy_events = j.at("degeneracy_events").get<std::size_t>();
    if (j.contains("wall_clock")) r.wall_clock = j.at("wall_clock").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError("record", e.what());
  }
  if (!(r.rmse >= 0.0)) throw ConfigError("record.rmse", "must be non-negative");
  return r;
}

double rmse(std::span<const PositionPair> trace) {
  if (trace.empty()) throw DomainError("rmse of an empty trace");
  double sum = 0.0;
  for (const auto& row : trace) sum += squared_distance(row.truth, row.estimate);
  return std::sqrt(sum / static_cast<double>(trace.size()));
}

TrialResult run_trial(const SimulationConfig& config, std::size_t burn_in_ticks,
                      const std::function<void(const TraceRow&)>& on_row) {
  const auto start = std::chrono::steady_clock::now();
  Simulation sim(config);
  const std::size_t ticks = config.world.ticks();

  double squared = 0.0;
  std::size_t scored = 0;
  std::size_t fused = 0;
  TrialResult result;
  for (std::size_t t = 0; t < ticks; ++t) {
    for (const auto& row : sim.run_tick()) {
      if (on_row) on_row(row);
      fused += row.n_msgs_fused;
      if (row.degenerate) ++result.degeneracy_events;
      if (row.tick > burn_in_ticks) {
        squared += row.err_m * row.err_m;
        ++scored;
      }
    }
  }
  if (scored == 0) throw DomainError("no ticks left after burn-in");
  result.ticks = ticks;
  result.rmse = std::sqrt(squared / static_cast<double>(scored));
  result.mean_fused_msgs_per_tick =
      static_cast<double>(fused) / static_cast<double>(ticks * config.world.n_robots);
  result.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<MetricsRecord> run_scenario(const ExperimentConfig& config, const RecordSink& sink,
                                        const std::string& trace_dir) {
  return run_scenario(resolve(config), sink, trace_dir);
}

std::vector<MetricsRecord> run_scenario(const ResolvedExperiment& ex, const RecordSink& sink,
                                        const std::string& trace_dir) {
  if (!trace_dir.empty()) std::filesystem::create_directories(trace_dir);
  std::vector<MetricsRecord> records;
  for (double pdr : ex.pdr_grid) {
    for (std::size_t n : ex.n_robots_grid) {
      for (std::size_t trial = 0; trial < ex.trials; ++trial) {
        for (Algorithm algorithm : ex.algorithms) {
          SimulationConfig cfg = ex.base;
          cfg.world.n_robots = n;
          cfg.world.pdr = pdr;
          cfg.world.master_seed = ex.master_seed + trial;
          cfg.algorithm = algorithm;
          TrialResult t;
          if (trace_dir.empty()) {
            t = run_trial(cfg, ex.burn_in_ticks);
          } else {
            char name[160];
            std::snprintf(name, sizeof(name), "%s_%s_n%zu_pdr%g_seed%llu.csv", to_string(ex.scenario).c_str(),
                          to_string(algorithm).c_str(), n, pdr,
                          static_cast<unsigned long long>(cfg.world.master_seed));
            std::ofstream trace(std::filesystem::path(trace_dir) / name);
            write_trace_header(trace);
            t = run_trial(cfg, ex.burn_in_ticks, [&](const TraceRow& row) { write_trace_row(trace, row); });
          }

          MetricsRecord r;
          r.scenario = to_string(ex.scenario);
          r.algorithm = algorithm;
          r.n_robots = n;
          r.pdr = pdr;
          r.trial = trial;
          r.trial_seed = cfg.world.master_seed;
          r.rmse = t.rmse;
          r.mean_fused_msgs_per_tick = t.mean_fused_msgs_per_tick;
          r.degeneracy_events = t.degeneracy_events;
          r.wall_clock = t.wall_clock;
          if (sink) sink(r);
          records.push_back(std::move(r));
        }
      }
    }
  }
  return records;
}

Summary aggregate(std::span<const MetricsRecord> records) {
  using Key = std::tuple<std::string, std::size_t, double, std::string>;  // scenario, n, pdr, algorithm
  std::map<Key, std::vector<double>> groups;
  for (const auto& r : records) {
    groups[{r.scenario, r.n_robots, r.pdr, to_string(r.algorithm)}].push_back(r.rmse);
  }

  Summary summary;
  std::map<Key, double> means;
  for (auto& [key, values] : groups) {
    // Sorting fixes the summation order, so any permutation of the input gives the same bits.
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double n = static_cast<double>(values.size());
    const double mean = sum / n;
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
    const auto& [scenario, n_robots, pdr, algorithm] = key;
    summary.groups.push_back({scenario, algorithm, n_robots, pdr, mean, sd, values.size()});
    means[key] = mean;
  }

  for (const auto& [key, mean] : means) {
    const auto& [scenario, n_robots, pdr, algorithm] = key;
    for (const auto& [other_key, other_mean] : means) {
      const auto& [s2, n2, p2, baseline] = other_key;
      if (s2 != scenario || n2 != n_robots || p2 != pdr || baseline == algorithm) continue;
      const double improvement = other_mean > 0.0 ? 1.0 - mean / other_mean : 0.0;
      summary.improvements.push_back({scenario, n_robots, pdr, algorithm, baseline, mean, other_mean, improvement});
    }
  }
  return summary;
}

void write_summary_csv(std::ostream& os, const Summary& summary) {
  os << "scenario,algorithm,n_robots,pdr,mean_rmse,std_rmse,trials\n";
  char buf[256];
  for (const auto& g : summary.groups) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%zu,%.6g,%.9g,%.9g,%zu\n", g.scenario.c_str(),
                  g.algorithm.c_str(), g.n_robots, g.pdr, g.mean_rmse, g.std_rmse, g.trials);
    os << buf;
  }
}

void write_improvements_csv(std::ostream& os, const Summary& summary) {
  os << "scenario,n_robots,pdr,algorithm,baseline,mean_rmse,baseline_mean_rmse,improvement\n";
  char buf[320];
  for (const auto& i : summary.improvements) {
    std::snprintf(buf, sizeof(buf), "%s,%zu,%.6g,%s,%s,%.9g,%.9g,%.9g\n", i.scenario.c_str(), i.n_robots,
                  i.pdr, i.algorithm.c_str(), i.baseline.c_str(), i.mean_rmse, i.baseline_mean_rmse,
                  i.improvement);
    os << buf;
  }
}

std::vector<MetricsRecord> read_records_jsonl(std::istream& is) {
  std::vector<MetricsRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ConfigError("line " + std::to_string(line_no), "not valid JSON");
    out.push_back(record_from_json(j));
  }
  return out;
}

}  // namespace mrsl
