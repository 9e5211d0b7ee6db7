#include "swarmload/workload.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "swarmload/errors.hpp"

namespace swarmload {

using nlohmann::ordered_json;

WorkloadState classify(double value, const Thresholds& thresholds) {
  if (!std::isfinite(value)) {
    throw Error(Errc::ContractViolation, "classify: value must be finite");
  }
  if (value <= thresholds.underload_max) return WorkloadState::Underload;
  if (value >= thresholds.overload_min) return WorkloadState::Overload;
  return WorkloadState::NormalLoad;
}

OverallEstimate aggregate_overall(std::span<const ComponentEstimate> present,
                                  std::span<const ComponentKind> missing,
                                  const ModelProfile& profile, Timestamp t,
                                  const Thresholds& thresholds) {
  std::set<ComponentKind> seen;
  for (const auto& estimate : present) {
    if (!seen.insert(estimate.kind).second) {
      throw Error(Errc::ContractViolation, "aggregate_overall: duplicate component");
    }
  }
  for (const auto kind : missing) {
    if (!seen.insert(kind).second) {
      throw Error(Errc::ContractViolation,
                  "aggregate_overall: component both present and missing");
    }
  }
  if (seen.size() != kAllComponents.size()) {
    throw Error(Errc::ContractViolation,
                "aggregate_overall: present and missing must cover all five components");
  }

  double raw_sum = 0.0;
  for (const auto& estimate : present) raw_sum += estimate.raw_value;
  double missing_sum = 0.0;
  for (const auto kind : missing) missing_sum += profile.component(kind).midpoint_raw;

  OverallEstimate overall;
  overall.t = t;
  overall.value = 100.0 * (raw_sum + missing_sum) / profile.max_overall;
  overall.state = classify(*overall.value, thresholds);
  overall.components.assign(present.begin(), present.end());
  for (const auto kind : missing) {
    overall.components.push_back(static_component_value(kind, profile, t));
  }
  std::sort(overall.components.begin(), overall.components.end(),
            [](const ComponentEstimate& a, const ComponentEstimate& b) {
              return static_cast<int>(a.kind) < static_cast<int>(b.kind);
            });
  overall.missing.assign(missing.begin(), missing.end());
  std::sort(overall.missing.begin(), overall.missing.end());
  return overall;
}

namespace {

bool window_overlaps_any_gap(Timestamp window_start, Timestamp window_end,
                             const std::vector<GapRecord>& gaps) {
  for (const auto& gap : gaps) {
    if (window_end >= gap.start && window_start <= gap.end) return true;
  }
  return false;
}

bool is_speech_input(MetricKind metric) {
  const auto& fed = components_for_metric(metric);
  return fed.size() == 1 && fed.front() == ComponentKind::Speech;
}

}  // namespace

PipelineResult run_pipeline(std::span<const ChannelSeries> channels,
                            const ModelProfile& profile,
                            const ShiftConfig& config) {
  PipelineResult result;

  // Channels usable this shift: declared present, actually recorded.
  std::map<MetricKind, ChannelSeries> usable;
  for (const auto& channel : channels) {
    const bool declared =
        std::find(config.present_metrics.begin(), config.present_metrics.end(),
                  channel.metric) != config.present_metrics.end();
    if (declared && !channel.samples.empty()) usable[channel.metric] = channel;
  }

  if (auto noise = usable.find(MetricKind::NoiseLevel); noise != usable.end()) {
    try {
        auto repaired = repair_noise_channel(noise->second, config.noise_repair_seed);
        result.noise_repair = repaired.stats;
        noise->second = std::move(repaired.series);
      } catch (const Error& e) {
        if (e.code() != Errc::NoValidReadings) throw;
        usable.erase(noise);  // nothing recoverable; treat the channel as absent
      }
    }
    if (usable.empty()) {
      throw Error(Errc::EmptyInput, "run_pipeline: no present channel has samples");
    }

    // Sensed components need every feeding metric present plus a loaded
    // estimator; everything else is filled from the static model.
    std::vector<ComponentKind> sensed;
    for (const auto kind : kAllComponents) {
      const auto& metrics = metrics_for_component(kind);
      const bool channels_ok =
          !metrics.empty() &&
          std::all_of(metrics.begin(), metrics.end(),
                      [&](MetricKind m) { return usable.count(m) > 0; });
      const bool has_estimator =
          !std::holds_alternative<std::monostate>(profile.component(kind).estimator);
      if (channels_ok && has_estimator) {
        sensed.push_back(kind);
      } else {
        result.missing_components.push_back(kind);
      }
    }

    std::vector<GapRecord> all_gaps;
    std::map<MetricKind, std::map<Timestamp, FeatureVector>> features_by_metric;
    Timestamp shift_end = 0;
    for (auto& [metric, series] : usable) {
      shift_end = std::max(shift_end, series.samples.back().t);
      const auto gaps = detect_gaps(series, config.max_gap_ms);
      all_gaps.insert(all_gaps.end(), gaps.begin(), gaps.end());

      EpochSpec spec;
      spec.step_ms = is_speech_input(metric) ? kSpeechStepMs : kOverallStepMs;
      spec.max_missing_fraction = config.max_missing_fraction;
      auto& slots = features_by_metric[metric];
      for (auto& epoch : slide_epochs(series, spec, gaps)) {
        if (epoch.features) slots.emplace(epoch.window_end, *epoch.features);
      }
    }

    // Speech runs at 1 s internally, then joins the 5 s grid by resampling.
    std::map<Timestamp, double> speech_on_grid;
    const bool speech_sensed =
        std::find(sensed.begin(), sensed.end(), ComponentKind::Speech) != sensed.end();
    if (speech_sensed) {
      const auto& speech_metrics = metrics_for_component(ComponentKind::Speech);
      std::vector<TimedValue> per_second;
      for (Timestamp t = kEpochWindowMs; t <= shift_end; t += kSpeechStepMs) {
        std::vector<FeatureVector> inputs;
        inputs.reserve(speech_metrics.size());
        for (const auto metric : speech_metrics) {
          const auto& slots = features_by_metric[metric];
          if (const auto it = slots.find(t); it != slots.end()) inputs.push_back(it->second);
        }
        if (inputs.size() != speech_metrics.size()) continue;
        const auto estimate =
            estimate_component(ComponentKind::Speech, inputs, profile, t);
        per_second.push_back({t, estimate.display_value});
      }
      for (const auto& bin :
           resample_speech_estimates(per_second, config.speech_resample)) {
        if (bin.value) speech_on_grid.emplace(bin.t, *bin.value);
      }
    }

    const double speech_max_raw = profile.component(ComponentKind::Speech).max_raw;
    const auto emit_no_data = [&](Timestamp t) {
      OverallEstimate no_data;
      no_data.t = t;
      no_data.state = WorkloadState::NoData;
      no_data.missing = result.missing_components;
      result.estimates.push_back(std::move(no_data));
      ++result.no_data_count;
    };
    for (Timestamp t = kEpochWindowMs; t <= shift_end; t += kOverallStepMs) {
      if (window_overlaps_any_gap(t - kEpochWindowMs, t, all_gaps)) {
        emit_no_data(t);
        continue;
      }

    try {
      std::vector<ComponentEstimate> present;
      for (const auto kind : sensed) {
        if (kind == ComponentKind::Speech) {
          if (const auto it = speech_on_grid.find(t); it != speech_on_grid.end()) {
            ComponentEstimate estimate;
            estimate.kind = kind;
            estimate.t = t;
            estimate.display_value = it->second;
            estimate.raw_value = it->second * speech_max_raw / 100.0;
            estimate.source = EstimateSource::Sensed;
            present.push_back(estimate);
          } else {
            auto fallback = static_component_value(kind, profile, t);
            fallback.source = EstimateSource::Imputed;
            present.push_back(fallback);
          }
          continue;
        }
        const auto& metrics = metrics_for_component(kind);
        std::vector<FeatureVector> inputs;
        inputs.reserve(metrics.size());
        for (const auto metric : metrics) {
          const auto& slots = features_by_metric[metric];
          if (const auto it = slots.find(t); it != slots.end()) inputs.push_back(it->second);
        }
        if (inputs.size() == metrics.size()) {
          present.push_back(estimate_component(kind, inputs, profile, t));
        } else {
          // A normally-sensed channel came up short for this tick only.
          auto fallback = static_component_value(kind, profile, t);
          fallback.source = EstimateSource::Imputed;
          present.push_back(fallback);
        }
      }

      result.estimates.push_back(aggregate_overall(
          present, result.missing_components, profile, t, config.thresholds));
      ++result.usable_count;
    } catch (const Error&) {
      emit_no_data(t);  // a tick never aborts the shift
    }
  }
  return result;
}

namespace {

ordered_json estimate_to_json(const OverallEstimate& estimate) {
  ordered_json doc;
  doc["t_ms"] = estimate.t;
  if (estimate.value) doc["value"] = *estimate.value;
  doc["state"] = to_string(estimate.state);
  if (!estimate.components.empty()) {
    ordered_json components;
    for (const auto& component : estimate.components) {
      components[std::string(to_string(component.kind))] = {
          {"display", component.display_value},
          {"raw", component.raw_value},
          {"source", to_string(component.source)}};
    }
    doc["components"] = std::move(components);
  }
  ordered_json missing = ordered_json::array();
  for (const auto kind : estimate.missing) missing.push_back(to_string(kind));
  doc["missing"] = std::move(missing);
  return doc;
}

}  // namespace

void write_estimates_jsonl(std::ostream& out,
                           std::span<const OverallEstimate> estimates) {
  for (const auto& estimate : estimates) {
    out << estimate_to_json(estimate).dump() << '\n';
  }
}

void write_estimates_csv(std::ostream& out,
                         std::span<const OverallEstimate> estimates) {
  out << "t_ms,value,state";
  for (const auto kind : kAllComponents) {
    const auto name = to_string(kind);
    out << ',' << name << "_display," << name << "_raw," << name << "_source";
  }
  out << ",missing\n";
  out.precision(17);
  for (const auto& estimate : estimates) {
    out << estimate.t << ',';
    if (estimate.value) out << *estimate.value;
    out << ',' << to_string(estimate.state);
    for (const auto kind : kAllComponents) {
      const auto it = std::find_if(
          estimate.components.begin(), estimate.components.end(),
          [kind](const ComponentEstimate& c) { return c.kind == kind; });
      if (it == estimate.components.end()) {
        out << ",,,";
      } else {
        out << ',' << it->display_value << ',' << it->raw_value << ','
            << to_string(it->source);
      }
    }
    out << ',';
    for (std::size_t i = 0; i < estimate.missing.size(); ++i) {
      if (i > 0) out << ';';
      out << to_string(estimate.missing[i]);
    }
    out << '\n';
  }
}

std::vector<OverallEstimate> read_estimates_jsonl(std::istream& in) {
  std::vector<OverallEstimate> estimates;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json doc;
    try {
        doc = ordered_json::parse(line);
      } catch (const std::exception& e) {
        throw Error(Errc::FormatError, "estimates jsonl line " + std::to_string(line_no) +
                                           ": " + e.what());
      }
      OverallEstimate estimate;
      estimate.t = doc.at("t_ms").get<Timestamp>();
      if (doc.contains("value")) estimate.value = doc.at("value").get<double>();
      const auto state = state_from_string(doc.value("state", ""));
      if (!state) {
        throw Error(Errc::FormatError,
                    "estimates jsonl line " + std::to_string(line_no) + ": bad state");
      }
      estimate.state = *state;
      if (doc.contains("components")) {
        for (const auto& [name, entry] : doc.at("components").items()) {
          const auto kind = component_from_string(name);
          if (!kind) continue;
          ComponentEstimate component;
          component.kind = *kind;
          component.t = estimate.t;
          component.display_value = entry.value("display", 0.0);
          component.raw_value = entry.value("raw", 0.0);
          const std::string source = entry.value("source", "sensed");
          component.source = source == "static_model" ? EstimateSource::StaticModel
                             : source == "imputed"    ? EstimateSource::Imputed
                                                      : EstimateSource::Sensed;
          estimate.components.push_back(component);
        }
      }
      if (doc.contains("missing")) {
        for (const auto& name : doc.at("missing")) {
          if (const auto kind = component_from_string(name.get<std::string>())) {
            estimate.missing.push_back(*kind);
          }
        }
      }
      estimates.push_back(std::move(estimate));
    }
    return estimates;
  }

  }  // namespace swarmload
