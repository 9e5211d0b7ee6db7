#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "swarmload/analytics.hpp"
#include "swarmload/errors.hpp"
#include "swarmload/ingest.hpp"
#include "swarmload/profile.hpp"
#include "swarmload/sim/engine.hpp"
#include "swarmload/subjective.hpp"
#include "swarmload/synth.hpp"
#include "swarmload/types.hpp"
#include "swarmload/workload.hpp"

namespace swarmload::cli {
namespace {

namespace fs = std::filesystem;

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3 };

LogLevel log_level() {
  const char* env = std::getenv("SWARMLOAD_LOG");
  if (env == nullptr) return LogLevel::Warn;
  const std::string value(env);
  if (value == "debug") return LogLevel::Debug;
  if (value == "info") return LogLevel::Info;
  if (value == "error") return LogLevel::Error;
  return LogLevel::Warn;
}

void log_warn(const std::string& message) {
  if (log_level() <= LogLevel::Warn) std::cerr << "warning: " << message << '\n';
}

void log_info(const std::string& message) {
  if (log_level() <= LogLevel::Info) std::cerr << message << '\n';
}

int exit_code_for(const Error& error) {
  switch (error.code()) {
    case Errc::ProfileInvalid:
      return 3;
    case Errc::FormatError:
    case Errc::ScenarioInvalid:
    case Errc::EmptyInput:
    case Errc::EmptyShift:
    case Errc::IoError:
      return 2;
    default:
      return 4;
  }
}

/// Outputs never silently overwrite; --force is the explicit override.
void guard_overwrite(const fs::path& path, bool force) {
  if (!force && fs::exists(path)) {
    throw Error(Errc::IoError,
                "refusing to overwrite " + path.string() + " (use --force)");
  }
}

std::ofstream open_output(const fs::path& path, bool force) {
  guard_overwrite(path, force);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  return out;
}

std::vector<MetricKind> parse_presence(const std::string& text) {
  std::vector<MetricKind> metrics;
  std::stringstream stream(text);
  std::string name;
  while (std::getline(stream, name, ',')) {
    if (name.empty()) continue;
    const auto metric = metric_from_string(name);
    if (!metric) throw Error(Errc::FormatError, "unknown metric in --presence: " + name);
    metrics.push_back(*metric);
  }
  if (metrics.empty()) throw Error(Errc::FormatError, "--presence lists no metrics");
  return metrics;
}

Thresholds parse_thresholds(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw Error(Errc::FormatError, "--thresholds expects 'underload,overload'");
  }
  Thresholds thresholds;
  try {
    thresholds.underload_max = std::stod(text.substr(0, comma));
    thresholds.overload_min = std::stod(text.substr(comma + 1));
  } catch (...) {
    throw Error(Errc::FormatError, "--thresholds expects numbers");
  }
  if (!(thresholds.underload_max < thresholds.overload_min)) {
    throw Error(Errc::FormatError, "--thresholds: underload bound must be below overload");
  }
  return thresholds;
}

WeightingScheme parse_weights(const std::string& text) {
  WeightingScheme scheme;
  std::stringstream stream(text);
  std::string entry;
  while (std::getline(stream, entry, ',')) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::FormatError, "--weights expects component=percent entries");
    }
    const auto kind = component_from_string(entry.substr(0, eq));
    if (!kind) throw Error(Errc::FormatError, "--weights: unknown component in '" + entry + "'");
    try {
      scheme.weight(*kind) = std::stod(entry.substr(eq + 1));
    } catch (...) {
      throw Error(Errc::FormatError, "--weights: bad percent in '" + entry + "'");
    }
  }
  return scheme;
}

struct EstimateOutcome {
  PipelineResult result;
};

EstimateOutcome run_estimate(const std::string& input, const std::string& profile_path,
                             const std::optional<std::string>& presence,
                             const std::optional<std::string>& thresholds_text,
                             std::uint64_t seed, const fs::path& output_dir, bool force) {
  const auto parsed = parse_sensor_csv_file(input);
  for (const auto& error : parsed.errors) {
    log_warn(input + ":" + std::to_string(error.line) + ": " + error.message);
  }
  const ModelProfile profile = load_profile_file(profile_path);

  ShiftConfig config;
  config.noise_repair_seed = seed;
  if (presence) {
    config.present_metrics = parse_presence(*presence);
  } else {
    config.present_metrics.clear();
    for (const auto& channel : parsed.channels) {
      config.present_metrics.push_back(channel.metric);
    }
  }
  if (thresholds_text) config.thresholds = parse_thresholds(*thresholds_text);

  EstimateOutcome outcome{run_pipeline(parsed.channels, profile, config)};

  auto jsonl = open_output(output_dir / "estimates.jsonl", force);
  write_estimates_jsonl(jsonl, outcome.result.estimates);
  auto csv = open_output(output_dir / "estimates.csv", force);
  write_estimates_csv(csv, outcome.result.estimates);

  std::cout << "estimates: " << outcome.result.estimates.size() << " total, "
            << outcome.result.usable_count << " usable, " << outcome.result.no_data_count
            << " no-data\n";
  return outcome;
}

sim::ScenarioResult run_simulate(const std::string& scenario_path,
                                 const fs::path& output_dir, bool force) {
  const auto script = sim::parse_scenario_file(scenario_path);
  auto result = sim::run_scenario(script);

  auto events = open_output(output_dir / "events.jsonl", force);
  sim::write_events_jsonl(events, result.events);
  auto demand = open_output(output_dir / "demand.csv", force);
  sim::write_demand_csv(demand, result.demand);

  std::cout << "tactics: " << result.summary.tactics_issued << " issued, "
            << result.summary.tactics_completed << " completed, "
            << result.summary.tactics_failed << " failed; "
            << result.summary.vehicles_neutralized << " vehicles neutralized, "
            << result.summary.artifacts_neutralized << " artifacts neutralized, "
            << result.summary.blockage_events << " blockages, "
            << result.summary.swap_requests << " swap requests\n";
  return result;
}

void run_synth(const std::vector<double>& demand, const std::string& physio_path,
               std::uint64_t seed, const fs::path& output, bool force) {
  const PhysioProfile profile = physio_path.empty()
                                    ? default_physio_profile()
                                    : load_physio_profile_file(physio_path);
  const auto channels = synthesize(demand, profile, seed);
  auto out = open_output(output, force);
  write_sensor_csv(out, channels);
  std::cout << "synthesized " << channels.size() << " channels, "
            << (demand.empty() ? 0 : demand.size()) << " seconds\n";
}

ShiftReport run_analyze(const std::string& estimates_path,
                        const std::optional<std::string>& probes_path,
                        const std::optional<std::string>& events_path,
                        const std::optional<std::string>& weights_text,
                        const std::string& shift_id, const fs::path& output_dir,
                        bool force) {
  std::ifstream in(estimates_path);
  if (!in) throw Error(Errc::IoError, "cannot open estimates: " + estimates_path);
  const auto estimates = read_estimates_jsonl(in);

  std::vector<InSituProbe> probes;
  if (probes_path) {
    auto parsed = parse_probe_csv_file(*probes_path);
    for (const auto& error : parsed.errors) {
      log_warn(*probes_path + ":" + std::to_string(error.line) + ": " + error.message);
    }
    probes = std::move(parsed.probes);
  }

  std::optional<sim::EventLog> log;
  if (events_path) {
    auto parsed = sim::read_events_jsonl_file(*events_path);
    for (const auto& [line, message] : parsed.errors) {
      log_warn(*events_path + ":" + std::to_string(line) + ": " + message);
    }
    log = std::move(parsed.events);
  }

  ShiftReport report =
      build_shift_report(shift_id, estimates, probes, log ? &*log : nullptr);

  auto json = open_output(output_dir / "report.json", force);
  json << shift_report_to_json(report) << '\n';
  auto descriptives = open_output(output_dir / "descriptives.csv", force);
  write_descriptives_csv(descriptives, report);
  auto frequencies = open_output(output_dir / "frequencies.csv", force);
  write_frequencies_csv(frequencies, report);
  if (report.per_minute) {
    auto per_minute = open_output(output_dir / "per_minute.csv", force);
    write_per_minute_csv(per_minute, *report.per_minute);
  }

  if (weights_text && !probes.empty()) {
    // mean normalized response per component dimension, then the weighted sum
    const WeightingScheme scheme = parse_weights(*weights_text);
    std::array<double, kAllComponents.size()> means{};
    std::array<std::size_t, kAllComponents.size()> counts{};
    for (const auto& probe : probes) {
      const auto dim = static_cast<std::size_t>(probe.dimension);
      if (dim >= kAllComponents.size()) continue;  // stress/fatigue/overall
      means[dim] += normalize_likert(probe.rating);
      ++counts[dim];
    }
    bool complete = true;
    for (std::size_t i = 0; i < means.size(); ++i) {
      if (counts[i] == 0) {
        complete = false;
      } else {
        means[i] /= static_cast<double>(counts[i]);
      }
    }
    if (complete) {
      std::cout << "subjective_overall=" << weighted_subjective_overall(means, scheme)
                << '\n';
    } else {
      log_warn("not every component has probe responses; skipping weighted overall");
    }
  }

  const auto& freq = report.frequencies;
  std::cout << "report: " << freq.total << " estimates, " << freq.usable << " usable, "
            << freq.no_data << " no-data";
  if (freq.pct_overload) std::cout << ", overload " << *freq.pct_overload << "%";
  std::cout << ", probe rows " << report.probes.size() << '\n';
  return report;
}

double demand_estimate_rank_correlation(const std::vector<double>& demand,
                                        std::span<const OverallEstimate> estimates) {
  const auto demand_minutes = minute_means(demand);
  std::map<std::int64_t, std::pair<double, std::size_t>> per_minute;
  for (const auto& estimate : estimates) {
    if (!estimate.usable()) continue;
    auto& slot = per_minute[minute_bin(estimate.t)];
    slot.first += *estimate.value;
    ++slot.second;
  }
  std::vector<double> a;
  std::vector<double> b;
  for (std::size_t minute = 0; minute < demand_minutes.size(); ++minute) {
    const auto it = per_minute.find(static_cast<std::int64_t>(minute));
    if (it == per_minute.end()) continue;
    a.push_back(demand_minutes[minute]);
    b.push_back(it->second.first / static_cast<double>(it->second.second));
  }
  return spearman(a, b);
}

int run_e2e(const std::string& scenario_path, const std::string& model_path,
            const std::string& physio_path, std::uint64_t seed,
            const fs::path& output_dir, bool force) {
  auto sim_result = run_simulate(scenario_path, output_dir, force);

  const PhysioProfile physio = physio_path.empty() ? default_physio_profile()
                                                   : load_physio_profile_file(physio_path);
  const auto channels = synthesize(sim_result.demand.demand, physio, seed);
  {
    auto out = open_output(output_dir / "sensors.csv", force);
    write_sensor_csv(out, channels);
  }

  const ModelProfile profile =
      model_path.empty() ? reference_linear_profile() : load_profile_file(model_path);
  ShiftConfig config;
  config.noise_repair_seed = seed;
  const auto pipeline = run_pipeline(channels, profile, config);
  {
    auto jsonl = open_output(output_dir / "estimates.jsonl", force);
    write_estimates_jsonl(jsonl, pipeline.estimates);
    auto csv = open_output(output_dir / "estimates.csv", force);
    write_estimates_csv(csv, pipeline.estimates);
  }

  const ShiftReport report =
      build_shift_report("e2e", pipeline.estimates, {}, &sim_result.events);
  {
    auto json = open_output(output_dir / "report.json", force);
    json << shift_report_to_json(report) << '\n';
    if (report.per_minute) {
      auto per_minute = open_output(output_dir / "per_minute.csv", force);
      write_per_minute_csv(per_minute, *report.per_minute);
    }
  }

  const double rho =
      demand_estimate_rank_correlation(sim_result.demand.demand, pipeline.estimates);
  std::cout << "spearman_rho=" << rho << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"swarm-shift workload toolkit"};
  app.require_subcommand(1);

  std::string input, profile_path, scenario_path, demand_path, output_path;
  std::string physio_path, model_path, shift_id = "shift";
  std::string output_dir = ".";
  std::optional<std::string> presence, thresholds_text, probes_path, events_path,
      weights_text;
  std::uint64_t seed = 0;
  bool force = false;

  auto* estimate = app.add_subcommand("estimate", "sensor CSV -> overall workload estimates");
  estimate->add_option("--input", input, "sensor CSV")->required();
  estimate->add_option("--profile", profile_path, "model profile JSON")->required();
  estimate->add_option("--output-dir", output_dir, "output directory");
  estimate->add_option("--presence", presence,
                       "comma list of recorded metrics (default: channels found)");
  estimate->add_option("--thresholds", thresholds_text, "underload,overload bounds");
  estimate->add_option("--seed", seed, "noise-repair seed");
  estimate->add_flag("--force", force, "overwrite existing outputs");

  auto* simulate = app.add_subcommand("simulate", "scenario JSON -> event log + demand trace");
  simulate->add_option("--scenario", scenario_path, "scenario JSON")->required();
  simulate->add_option("--output-dir", output_dir, "output directory");
  simulate->add_flag("--force", force, "overwrite existing outputs");

  auto* synth = app.add_subcommand("synth", "demand CSV -> synthetic sensor CSV");
  synth->add_option("--demand", demand_path, "demand CSV")->required();
  synth->add_option("--profile", physio_path, "physio profile JSON (default built-in)");
  synth->add_option("--seed", seed, "noise seed")->required();
  synth->add_option("--output", output_path, "output sensor CSV")->required();
  synth->add_flag("--force", force, "overwrite existing outputs");

  auto* analyze = app.add_subcommand("analyze", "estimates (+probes, +events) -> shift report");
  analyze->add_option("--input", input, "estimates JSONL")->required();
  analyze->add_option("--probes", probes_path, "probe CSV");
  analyze->add_option("--events", events_path, "event log JSONL");
  analyze->add_option("--weights", weights_text,
                      "subjective component weights, e.g. visual=35,cognitive=25,...");
  analyze->add_option("--shift-id", shift_id, "report shift id");
  analyze->add_option("--output-dir", output_dir, "output directory");
  analyze->add_flag("--force", force, "overwrite existing outputs");

  auto* e2e = app.add_subcommand(
      "e2e", "scenario -> demand -> physio -> estimates -> report, with rank check");
  e2e->add_option("--scenario", scenario_path, "scenario JSON")->required();
  e2e->add_option("--model-profile", model_path,
                  "model profile JSON (default reference linear)");
  e2e->add_option("--physio-profile", physio_path, "physio profile JSON");
  e2e->add_option("--seed", seed, "noise seed")->required();
  e2e->add_option("--output-dir", output_dir, "output directory");
  e2e->add_flag("--force", force, "overwrite existing outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (estimate->parsed()) {
      run_estimate(input, profile_path, presence, thresholds_text, seed, output_dir, force);
    } else if (simulate->parsed()) {
      run_simulate(scenario_path, output_dir, force);
    } else if (synth->parsed()) {
      std::ifstream in(demand_path);
      if (!in) throw Error(Errc::IoError, "cannot open demand csv: " + demand_path);
      const auto trace = sim::read_demand_csv(in);
      run_synth(trace.demand, physio_path, seed, output_path, force);
    } else if (analyze->parsed()) {
      run_analyze(input, probes_path, events_path, weights_text, shift_id, output_dir,
                  force);
    } else if (e2e->parsed()) {
      return run_e2e(scenario_path, model_path, physio_path, seed, output_dir, force);
    }
    log_info("done");
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace swarmload::cli
