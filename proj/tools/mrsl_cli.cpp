// mrsl: run localization experiments, aggregate their records, list scenario presets.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrsl/errors.hpp"
#include "mrsl/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kOutDirEnv = "MRSL_OUT_DIR";

std::string default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env && *env ? env : "results";
}

std::vector<mrsl::Algorithm> parse_algorithms(const std::string& text) {
  if (text == "both" || text == "all") return {mrsl::Algorithm::kMrsl, mrsl::Algorithm::kArl};
  std::vector<mrsl::Algorithm> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(mrsl::parse_algorithm(item));
  return out;
}

void print_summary(const mrsl::Summary& summary) {
  std::printf("%-16s %-5s %9s %6s %10s %10s %7s\n", "scenario", "alg", "n_robots", "pdr", "mean_rmse",
              "std_rmse", "trials");
  for (const auto& g : summary.groups) {
    std::printf("%-16s %-5s %9zu %6.2f %10.4f %10.4f %7zu\n", g.scenario.c_str(), g.algorithm.c_str(),
                g.n_robots, g.pdr, g.mean_rmse, g.std_rmse, g.trials);
  }
  for (const auto& i : summary.improvements) {
    if (i.algorithm != "mrsl" || i.baseline != "arl") continue;
    std::printf("improvement mrsl vs arl (%s, n=%zu, pdr=%.2f): %.1f%%\n", i.scenario.c_str(), i.n_robots,
                i.pdr, 100.0 * i.improvement);
  }
}

int cmd_run(const std::string& scenario, const std::string& algorithms, std::size_t trials,
            std::uint64_t seed, const std::string& out_dir, const std::vector<std::string>& overrides,
            const std::string& config_path, bool trace) {
  mrsl::ExperimentConfig config;
  config.scenario = mrsl::parse_scenario(scenario);
  config.algorithms = parse_algorithms(algorithms);
  config.trials = trials;
  config.master_seed = seed;
  config.overrides = overrides;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw mrsl::ConfigError("--config", "cannot open " + config_path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw mrsl::ConfigError("--config", config_path + " is not valid JSON");
    config.config_file = std::move(doc);
  }
  const mrsl::ResolvedExperiment experiment = mrsl::resolve(config);

  fs::create_directories(out_dir);
  {
    std::ofstream meta(fs::path(out_dir) / "experiment.json");
    meta << experiment.to_json().dump(2) << '\n';
  }
  std::ofstream records(fs::path(out_dir) / "records.jsonl", std::ios::trunc);
  std::ofstream timings(fs::path(out_dir) / "timings.jsonl", std::ios::trunc);

  const auto sink = [&](const mrsl::MetricsRecord& r) {
    records << mrsl::record_to_json(r).dump() << '\n' << std::flush;
    timings << json{{"algorithm", mrsl::to_string(r.algorithm)},
                    {"n_robots", r.n_robots},
                    {"pdr", r.pdr},
                    {"trial", r.trial},
                    {"trial_seed", r.trial_seed},
                    {"wall_clock", r.wall_clock}}
                   .dump()
            << '\n'
            << std::flush;
    std::fprintf(stderr, "%s n=%zu pdr=%.2f seed=%llu rmse=%.4f (%.1fs)\n", mrsl::to_string(r.algorithm).c_str(),
                 r.n_robots, r.pdr, static_cast<unsigned long long>(r.trial_seed), r.rmse, r.wall_clock);
  };
  const std::string trace_dir = trace ? (fs::path(out_dir) / "traces").string() : std::string();
  const auto all = mrsl::run_scenario(experiment, sink, trace_dir);
  print_summary(mrsl::aggregate(all));
  return 0;
}

int cmd_aggregate(const std::vector<std::string>& inputs, const std::string& out_dir) {
  std::vector<mrsl::MetricsRecord> records;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw mrsl::ConfigError("--in", "cannot open " + path);
    auto batch = mrsl::read_records_jsonl(in);
    records.insert(records.end(), batch.begin(), batch.end());
  }
  if (records.empty()) throw mrsl::ConfigError("--in", "no records found");
  const auto summary = mrsl::aggregate(records);
  fs::create_directories(out_dir);
  std::ofstream summary_csv(fs::path(out_dir) / "summary.csv");
  mrsl::write_summary_csv(summary_csv, summary);
  std::ofstream improvements_csv(fs::path(out_dir) / "improvements.csv");
  mrsl::write_improvements_csv(improvements_csv, summary);
  print_summary(summary);
  return 0;
}

int cmd_presets(const std::string& only) {
  json out = json::array();
  for (const auto& p : mrsl::all_presets()) {
    if (!only.empty() && mrsl::to_string(p.scenario) != only) continue;
    mrsl::ExperimentConfig c;
    c.scenario = p.scenario;
    json doc = mrsl::resolve(c).to_json();
    doc["description"] = p.description;
    out.push_back(doc);
  }
  if (!only.empty() && out.empty()) throw mrsl::ConfigError("scenario", "unknown scenario '" + only + "'");
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot synergistic localization simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and write records.jsonl");
  std::string scenario;
  std::string algorithms = "both";
  std::size_t trials = 0;
  std::uint64_t seed = 1;
  std::string out_dir = default_out_dir();
  std::vector<std::string> overrides;
  std::string config_path;
  bool trace = false;
  run->add_option("--scenario", scenario,
                  "comparison-6x6 | scalability | nlos | pdr-challenge | large-60x60 | custom")
      ->required();
  run->add_option("--algorithm", algorithms, "mrsl, arl, or both (comma lists accepted)");
  run->add_option("--trials", trials, "Trials per grid point (0 = preset default)");
  run->add_option("--seed", seed, "Master seed; trial t uses seed + t");
  run->add_option("--out", out_dir, std::string("Output directory (default $") + kOutDirEnv + " or ./results)");
  run->add_option("--override", overrides, "key.path=value, repeatable");
  run->add_option("--config", config_path, "JSON file with world/radio/filter/fusion/doa/sweep/harness sections");
  run->add_flag("--trace", trace, "Write per-trial trajectory CSVs under <out>/traces");

  auto* agg = app.add_subcommand("aggregate", "Summarize one or more records.jsonl files");
  std::vector<std::string> inputs;
  std::string agg_out = default_out_dir();
  agg->add_option("--in", inputs, "records.jsonl file(s)")->required();
  agg->add_option("--out", agg_out, "Directory for summary.csv and improvements.csv");

  auto* presets = app.add_subcommand("presets", "Print the scenario presets as JSON");
  std::string only;
  presets->add_option("--scenario", only, "Print a single preset");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario, algorithms, trials, seed, out_dir, overrides, config_path, trace);
    if (*agg) return cmd_aggregate(inputs, agg_out);
    if (*presets) return cmd_presets(only);
  } catch (const mrsl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
