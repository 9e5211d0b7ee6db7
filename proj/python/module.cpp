// Python bindings for the main pipeline operations. File-based entry points
// mirror the CLI subcommands; the small pure functions are exposed directly.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <map>
#include <sstream>

#include "swarmload/analytics.hpp"
#include "swarmload/errors.hpp"
#include "swarmload/features.hpp"
#include "swarmload/ingest.hpp"
#include "swarmload/profile.hpp"
#include "swarmload/sim/engine.hpp"
#include "swarmload/subjective.hpp"
#include "swarmload/synth.hpp"
#include "swarmload/workload.hpp"

namespace py = pybind11;
using namespace swarmload;

namespace {

py::dict estimate_to_dict(const OverallEstimate& estimate) {
  py::dict out;
  out["t_ms"] = estimate.t;
  out["state"] = std::string(to_string(estimate.state));
  if (estimate.value) out["value"] = *estimate.value;
  py::dict components;
  for (const auto& component : estimate.components) {
    py::dict entry;
    entry["display"] = component.display_value;
    entry["raw"] = component.raw_value;
    entry["source"] = std::string(to_string(component.source));
    components[std::string(to_string(component.kind)).c_str()] = entry;
  }
  out["components"] = components;
  py::list missing;
  for (const auto kind : estimate.missing) missing.append(std::string(to_string(kind)));
  out["missing"] = missing;
  return out;
}

py::list run_pipeline_file(const std::string& sensor_csv, const std::string& profile_path,
                           std::optional<std::vector<std::string>> presence,
                           std::pair<double, double> thresholds, std::uint64_t seed) {
  const auto parsed = parse_sensor_csv_file(sensor_csv);
  const auto profile = load_profile_file(profile_path);
  ShiftConfig config;
  config.thresholds = {thresholds.first, thresholds.second};
  config.noise_repair_seed = seed;
  if (presence) {
    config.present_metrics.clear();
    for (const auto& name : *presence) {
      const auto metric = metric_from_string(name);
      if (!metric) throw Error(Errc::FormatError, "unknown metric: " + name);
      config.present_metrics.push_back(*metric);
    }
  } else {
    config.present_metrics.clear();
    for (const auto& channel : parsed.channels) {
      config.present_metrics.push_back(channel.metric);
    }
  }
  const auto result = run_pipeline(parsed.channels, profile, config);
  py::list out;
  for (const auto& estimate : result.estimates) out.append(estimate_to_dict(estimate));
  return out;
}

py::dict simulate_file(const std::string& scenario_path,
                       std::optional<std::string> events_out,
                       std::optional<std::string> demand_out) {
  const auto script = sim::parse_scenario_file(scenario_path);
  const auto result = sim::run_scenario(script);
  if (events_out) {
    std::ofstream out(*events_out);
    if (!out) throw Error(Errc::IoError, "cannot write " + *events_out);
    sim::write_events_jsonl(out, result.events);
  }
  if (demand_out) {
    std::ofstream out(*demand_out);
    if (!out) throw Error(Errc::IoError, "cannot write " + *demand_out);
    sim::write_demand_csv(out, result.demand);
  }
  py::dict summary;
  summary["tactics_issued"] = result.summary.tactics_issued;
  summary["tactics_completed"] = result.summary.tactics_completed;
  summary["tactics_failed"] = result.summary.tactics_failed;
  summary["vehicles_neutralized"] = result.summary.vehicles_neutralized;
  summary["artifacts_neutralized"] = result.summary.artifacts_neutralized;
  summary["blockage_events"] = result.summary.blockage_events;
  summary["swap_requests"] = result.summary.swap_requests;

  py::dict out;
  out["demand"] = result.demand.demand;
  out["summary"] = summary;
  out["event_count"] = result.events.size();
  out["events_jsonl"] = sim::events_to_jsonl(result.events);
  return out;
}

std::string synthesize_csv(const std::vector<double>& demand, std::uint64_t seed,
                           std::optional<std::string> physio_profile_path) {
  const auto profile = physio_profile_path ? load_physio_profile_file(*physio_profile_path)
                                           : default_physio_profile();
  const auto channels = synthesize(demand, profile, seed);
  std::ostringstream out;
  write_sensor_csv(out, channels);
  return out.str();
}

py::dict features_from_points(const std::vector<std::pair<std::int64_t, double>>& points,
                              Timestamp window_end) {
  std::vector<SensorSample> window;
  window.reserve(points.size());
  for (const auto& [t, value] : points) {
    window.push_back({t, MetricKind::HeartRate, value, true});
  }
  const auto features = extract_epoch_features(window, MetricKind::HeartRate, window_end);
  if (!features) {
    throw Error(Errc::InsufficientSamples, "need at least two valid samples");
  }
  py::dict out;
  out["window_end"] = features->window_end;
  out["mean"] = features->mean;
  out["variance"] = features->variance;
  out["avg_gradient"] = features->avg_gradient;
  out["slope"] = features->slope;
  return out;
}

}  // namespace

PYBIND11_MODULE(_native, m) {
  m.doc() = "swarm-shift workload toolkit bindings";

  py::register_exception<Error>(m, "SwarmloadError");

  m.def("minute_bin", &minute_bin, py::arg("t_ms"),
        "Minute index of a shift-relative millisecond timestamp.");

  m.def(
      "metric_component_map",
      [] {
        py::dict out;
        for (const auto metric : kAllMetrics) {
          py::list fed;
          for (const auto kind : components_for_metric(metric)) {
            fed.append(std::string(to_string(kind)));
          }
          out[std::string(to_string(metric)).c_str()] = fed;
        }
        return out;
      },
      "Mapping of each objective metric to the workload components it feeds.");

  m.def(
      "classify",
      [](double value, double underload_max, double overload_min) {
        return std::string(
            to_string(classify(value, Thresholds{underload_max, overload_min})));
      },
      py::arg("value"), py::arg("underload_max") = 25.0, py::arg("overload_min") = 60.0,
      "Threshold classification of an overall workload value.");

  m.def("normalize_likert", &normalize_likert, py::arg("rating"),
        "Normalize a 1..7 in-situ rating onto the 1..100 scale.");

  m.def(
      "weighted_subjective_overall",
      [](const std::map<std::string, double>& means,
         const std::map<std::string, double>& weights) {
        std::array<double, kAllComponents.size()> mean_array{};
        WeightingScheme scheme;
        for (const auto kind : kAllComponents) {
          const std::string name(to_string(kind));
          mean_array[static_cast<std::size_t>(kind)] = means.at(name);
          scheme.weight(kind) = weights.at(name);
        }
        return weighted_subjective_overall(mean_array, scheme);
      },
      py::arg("component_means"), py::arg("weights_percent"),
      "Weighted subjective overall workload from mean normalized responses.");

  m.def("extract_epoch_features", &features_from_points, py::arg("points"),
        py::arg("window_end_ms"),
        "Epoch features (mean, variance, avg gradient, slope) over (t_ms, value) "
        "points.");

  m.def("spearman",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return spearman(a, b);
        },
        py::arg("a"), py::arg("b"), "Spearman rank correlation with average ranks.");

  m.def("run_pipeline", &run_pipeline_file, py::arg("sensor_csv"), py::arg("profile"),
        py::arg("presence") = std::nullopt,
        py::arg("thresholds") = std::make_pair(25.0, 60.0), py::arg("seed") = 0,
        "Full shift pipeline from a sensor CSV to a list of overall estimates.");

  m.def("simulate", &simulate_file, py::arg("scenario"),
        py::arg("events_out") = std::nullopt, py::arg("demand_out") = std::nullopt,
        "Run a scenario; returns the demand trace, summary counts, and the event "
        "log as JSONL text.");

  m.def("synthesize", &synthesize_csv, py::arg("demand"), py::arg("seed"),
        py::arg("physio_profile") = std::nullopt,
        "Generate the nine synthetic sensor channels as CSV text.");
}
