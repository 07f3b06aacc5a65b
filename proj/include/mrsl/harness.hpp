#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrsl/simulation.hpp"

namespace mrsl {

enum class Scenario { kComparison6x6, kScalability, kNlos, kPdrChallenge, kLarge60x60, kCustom };

std::string to_string(Scenario scenario);
/// Throws ConfigError("scenario", ...) for unknown names.
Scenario parse_scenario(const std::string& name);

/// A named experiment family: the base configuration plus the parameter grid it sweeps.
struct ScenarioPreset {
  Scenario scenario{Scenario::kCustom};
  std::string description;
  SimulationConfig base;
  std::vector<std::size_t> n_robots_grid;
  std::vector<double> pdr_grid;
  std::size_t default_trials{30};
};

ScenarioPreset make_preset(Scenario scenario);
std::vector<ScenarioPreset> all_presets();

/// Robot counts 1, 3, ..., 99 followed by 100.
std::vector<std::size_t> scalability_grid();

struct ExperimentConfig {
  Scenario scenario{Scenario::kComparison6x6};
  std::vector<Algorithm> algorithms{Algorithm::kMrsl, Algorithm::kArl};
  std::size_t trials{0};                 ///< 0 selects the preset's default
  std::uint64_t master_seed{1};
  std::vector<std::string> overrides;    ///< "dotted.key=value"
  std::optional<nlohmann::json> config_file;  ///< same layout as the resolved document
};

/// Preset plus config file plus overrides, fully validated.
struct ResolvedExperiment {
  Scenario scenario{Scenario::kCustom};
  std::vector<Algorithm> algorithms;
  std::size_t trials{0};
  std::uint64_t master_seed{0};
  SimulationConfig base;
  std::vector<std::size_t> n_robots_grid;
  std::vector<double> pdr_grid;
  std::size_t burn_in_ticks{10};

  nlohmann::json to_json() const;
};

/// Resolution document: to_json(SimulationConfig) plus
///   "sweep": {"n_robots": [...], "pdr": [...]}, "harness": {"burn_in_ticks": n}.
/// Overriding world.n_robots (or world.pdr) without touching the matching sweep key
/// collapses that sweep to the single overridden value.
ResolvedExperiment resolve(const ExperimentConfig& config);

struct MetricsRecord {
  std::string scenario;
  Algorithm algorithm{Algorithm::kMrsl};
  std::size_t n_robots{0};
  double pdr{0.0};
  std::size_t trial{0};
  std::uint64_t trial_seed{0};
  double rmse{0.0};
  double mean_fused_msgs_per_tick{0.0};
  std::size_t degeneracy_events{0};
  double wall_clock{0.0};  ///< seconds; kept out of the deterministic records file
};

nlohmann::json record_to_json(const MetricsRecord& record);
MetricsRecord record_from_json(const nlohmann::json& j);

struct PositionPair {
  Point2 truth;
  Point2 estimate;
};

/// sqrt(mean squared Euclidean error). Throws DomainError on an empty trace.
double rmse(std::span<const PositionPair> trace);

struct TrialResult {
  double rmse{0.0};
  double mean_fused_msgs_per_tick{0.0};
  std::size_t degeneracy_events{0};
  double wall_clock{0.0};
  std::size_t ticks{0};
};

/// Runs one simulation to completion. RMSE pools every robot and every tick after the
/// first `burn_in_ticks`. Each trace row is handed to `on_row` when provided.
TrialResult run_trial(const SimulationConfig& config, std::size_t burn_in_ticks,
                      const std::function<void(const TraceRow&)>& on_row = {});

using RecordSink = std::function<void(const MetricsRecord&)>;

/// Every (pdr, n_robots, trial, algorithm) point of the resolved grid, in that nesting
/// order. Trial t uses seed master_seed + t, shared by all algorithms and grid points.
/// `sink` sees each record as soon as its trial finishes. A non-empty `trace_dir` gets one
/// trajectory CSV per trial, named <scenario>_<algorithm>_n<N>_pdr<P>_seed<S>.csv.
std::vector<MetricsRecord> run_scenario(const ExperimentConfig& config, const RecordSink& sink = {},
                                        const std::string& trace_dir = {});
std::vector<MetricsRecord> run_scenario(const ResolvedExperiment& experiment,
                                        const RecordSink& sink = {}, const std::string& trace_dir = {});

struct SummaryRow {
  std::string scenario;
  std::string algorithm;
  std::size_t n_robots{0};
  double pdr{0.0};
  double mean_rmse{0.0};
  double std_rmse{0.0};  ///< sample standard deviation, 0 for a single trial
  std::size_t trials{0};
};

struct ImprovementRow {
  std::string scenario;
  std::size_t n_robots{0};
  double pdr{0.0};
  std::string algorithm;
  std::string baseline;
  double mean_rmse{0.0};
  double baseline_mean_rmse{0.0};
  double improvement{0.0};  ///< 1 - mean_rmse / baseline_mean_rmse
};

struct Summary {
  std::vector<SummaryRow> groups;
  std::vector<ImprovementRow> improvements;
};

/// Groups by (scenario, algorithm, n_robots, pdr). Invariant under record permutation.
Summary aggregate(std::span<const MetricsRecord> records);

void write_summary_csv(std::ostream& os, const Summary& summary);
void write_improvements_csv(std::ostream& os, const Summary& summary);
std::vector<MetricsRecord> read_records_jsonl(std::istream& is);

}  // namespace mrsl
