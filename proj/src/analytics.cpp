#include "swarmload/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <json.hpp>

#include "swarmload/errors.hpp"

namespace swarmload {

using nlohmann::ordered_json;

Descriptives shift_descriptives(std::span<const OverallEstimate> estimates) {
  Descriptives stats;
  double sum = 0.0;
  double sq_sum = 0.0;
  stats.min = std::numeric_limits<double>::infinity();
  stats.max = -std::numeric_limits<double>::infinity();
  for (const auto& estimate : estimates) {
    if (!estimate.usable()) continue;
    const double value = *estimate.value;
    sum += value;
    sq_sum += value * value;
    stats.min = std::min(stats.min, value);
    stats.max = std::max(stats.max, value);
    ++stats.count;
  }
  if (stats.count == 0) throw Error(Errc::EmptyShift, "no usable estimates");
  const double n = static_cast<double>(stats.count);
  stats.mean = sum / n;
  stats.sd = std::sqrt(std::max(0.0, sq_sum / n - stats.mean * stats.mean));
  return stats;
}

WeightedStats weighted_campaign_stats(std::span<const CampaignShift> shifts) {
  if (shifts.empty()) throw Error(Errc::EmptyInput, "no shifts given");
  double weight_sum = 0.0;
  double mean_sum = 0.0;
  double moment_sum = 0.0;
  for (const auto& shift : shifts) {
    if (shift.n == 0) {
      throw Error(Errc::ContractViolation, "shift with zero estimates");
    }
    const double n = static_cast<double>(shift.n);
    weight_sum += n;
    mean_sum += n * shift.mean;
    moment_sum += n * (shift.sd * shift.sd + shift.mean * shift.mean);
  }
  WeightedStats stats;
  stats.mean = mean_sum / weight_sum;
  stats.sd = std::sqrt(std::max(0.0, moment_sum / weight_sum - stats.mean * stats.mean));
  return stats;
}

StateFrequencies state_frequencies(std::span<const OverallEstimate> estimates) {
  StateFrequencies freq;
  for (const auto& estimate : estimates) {
    switch (estimate.state) {
      case WorkloadState::Underload: ++freq.underload; break;
      case WorkloadState::NormalLoad: ++freq.normal_load; break;
      case WorkloadState::Overload: ++freq.overload; break;
      case WorkloadState::NoData: ++freq.no_data; break;
    }
  }
  freq.total = estimates.size();
  freq.usable = freq.total - freq.no_data;
  if (freq.usable > 0) {
    freq.pct_normal_load =
        100.0 * static_cast<double>(freq.normal_load) / static_cast<double>(freq.usable);
  }
  if (freq.normal_load > 0) {
    const double baseline = static_cast<double>(freq.normal_load);
    freq.pct_underload = 100.0 * static_cast<double>(freq.underload) / baseline;
    freq.pct_overload = 100.0 * static_cast<double>(freq.overload) / baseline;
  }
  return freq;
}

EpisodeScan sustained_episodes(std::span<const OverallEstimate> estimates,
                               WorkloadState target) {
  EpisodeScan scan;
  std::optional<Episode> open;
  const auto close = [&] {
    if (!open) return;
    open->duration_ms = static_cast<Timestamp>(open->count) * kOverallStepMs;
    scan.episodes.push_back(*open);
    if (!scan.longest || open->count > scan.longest->count) scan.longest = *open;
    open.reset();
  };
  for (const auto& estimate : estimates) {
    if (estimate.state == target && target != WorkloadState::NoData) {
      if (!open) open = Episode{target, estimate.t, 0, 0};
      ++open->count;
    } else {
      close();
    }
  }
  close();
  return scan;
}

namespace {

void bump(std::vector<std::int64_t>& series, std::size_t minute) {
  if (series.size() <= minute) series.resize(minute + 1, 0);
  ++series[minute];
}

void mark(std::vector<std::set<std::int32_t>>& buckets, std::size_t minute,
          std::int32_t id) {
  if (buckets.size() <= minute) buckets.resize(minute + 1);
  buckets[minute].insert(id);
}

}  // namespace

PerMinuteSeries per_minute_series(const sim::EventLog& log) {
  PerMinuteSeries series;
  if (log.empty()) return series;

  std::size_t last_minute = 0;
  for (const auto& event : log) {
    last_minute = std::max(last_minute, static_cast<std::size_t>(minute_bin(event.t)));
  }

  // distinct-vehicle buckets; flattened to counts at the end
  std::vector<std::set<std::int32_t>> tasked_hw_ugv, tasked_hw_uav;
  std::vector<std::set<std::int32_t>> tasked_virt_ugv, tasked_virt_uav;
  std::vector<std::set<std::int32_t>> active_hw;

  // assignment intervals reconstructed by replay
  struct Assignment {
    sim::VehicleRef ref;
    Timestamp since = 0;
  };
  std::map<std::int32_t, std::vector<Assignment>> by_tactic;
  std::map<std::int32_t, std::int32_t> tactic_of_vehicle;

  const auto mark_span = [&](const sim::VehicleRef& ref, Timestamp from, Timestamp to) {
    const auto first = static_cast<std::size_t>(minute_bin(from));
    const auto last = static_cast<std::size_t>(minute_bin(std::max(from, to)));
    for (std::size_t minute = first; minute <= last; ++minute) {
      if (ref.kind == sim::VehicleKind::Ugv) {
        mark(ref.inst == sim::Instantiation::Hardware ? tasked_hw_ugv : tasked_virt_ugv,
             minute, ref.id);
      } else {
        mark(ref.inst == sim::Instantiation::Hardware ? tasked_hw_uav : tasked_virt_uav,
             minute, ref.id);
      }
    }
  };
  const auto end_assignment = [&](std::int32_t vehicle_id, Timestamp at) {
    const auto tactic_it = tactic_of_vehicle.find(vehicle_id);
    if (tactic_it == tactic_of_vehicle.end()) return;
    auto& assignments = by_tactic[tactic_it->second];
    for (auto it = assignments.begin(); it != assignments.end(); ++it) {
      if (it->ref.id == vehicle_id) {
        mark_span(it->ref, it->since, at);
        assignments.erase(it);
        break;
      }
    }
    tactic_of_vehicle.erase(tactic_it);
  };
  const auto end_tactic = [&](std::int32_t tactic_id, Timestamp at) {
    const auto it = by_tactic.find(tactic_id);
    if (it == by_tactic.end()) return;
    for (const auto& assignment : it->second) {
      mark_span(assignment.ref, assignment.since, at);
      tactic_of_vehicle.erase(assignment.ref.id);
    }
    by_tactic.erase(it);
  };

  Timestamp last_t = 0;
  for (const auto& event : log) {
    last_t = std::max(last_t, event.t);
    const auto minute = static_cast<std::size_t>(minute_bin(event.t));
    switch (event.type) {
      case sim::EventType::TacticIssued: {
        bump(event.origin == sim::TacticOrigin::Plan ? series.tactics_plan
                                                     : series.tactics_commander,
             minute);
        for (const auto& ref : event.assigned) {
          end_assignment(ref.id, event.t);  // re-tasking closes the old span
          by_tactic[event.tactic_id].push_back({ref, event.t});
          tactic_of_vehicle[ref.id] = event.tactic_id;
        }
        break;
      }
      case sim::EventType::TacticCompleted:
      case sim::EventType::TacticFailed:
        end_tactic(event.tactic_id, event.t);
        break;
      case sim::EventType::Blocked:
        bump(series.blockages, minute);
        break;
      case sim::EventType::Neutralized:
        end_assignment(event.vehicle.id, event.t);
        break;
      case sim::EventType::SwapCompleted:
        if (event.tactic_id >= 0) {
          by_tactic[event.tactic_id].push_back({event.vehicle, event.t});
          tactic_of_vehicle[event.vehicle.id] = event.tactic_id;
        }
        break;
      case sim::EventType::Telemetry:
        if (event.vehicle.inst == sim::Instantiation::Hardware &&
            (event.status == sim::VehicleStatus::Tasked ||
             event.status == sim::VehicleStatus::Blocked)) {
          mark(active_hw, minute, event.vehicle.id);
        }
        break;
      default:
        break;
    }
  }
  // spans still open at the end of the log
  for (const auto& [tactic_id, assignments] : by_tactic) {
    for (const auto& assignment : assignments) {
      mark_span(assignment.ref, assignment.since, last_t);
    }
  }

  const std::size_t minutes = last_minute + 1;
  const auto flatten = [minutes](std::vector<std::set<std::int32_t>>& buckets) {
    std::vector<std::int64_t> counts(minutes, 0);
    for (std::size_t i = 0; i < buckets.size() && i < minutes; ++i) {
      counts[i] = static_cast<std::int64_t>(buckets[i].size());
    }
    return counts;
  };
  const auto pad = [minutes](std::vector<std::int64_t>& counts) {
    counts.resize(minutes, 0);
  };
  pad(series.tactics_plan);
  pad(series.tactics_commander);
  pad(series.blockages);
  series.tasked_hardware_ugv = flatten(tasked_hw_ugv);
  series.tasked_hardware_uav = flatten(tasked_hw_uav);
  series.tasked_virtual_ugv = flatten(tasked_virt_ugv);
  series.tasked_virtual_uav = flatten(tasked_virt_uav);
  series.active_hardware = flatten(active_hw);
  return series;
}

ShiftReport build_shift_report(const std::string& shift_id,
                               std::span<const OverallEstimate> estimates,
                               std::span<const InSituProbe> probes,
                               const sim::EventLog* log) {
  ShiftReport report;
  report.shift_id = shift_id;
  report.frequencies = state_frequencies(estimates);
  if (report.frequencies.usable > 0) {
    report.descriptives = shift_descriptives(estimates);
  }
  auto overload = sustained_episodes(estimates, WorkloadState::Overload);
  report.overload_episodes = std::move(overload.episodes);
  report.longest_overload = overload.longest;
  report.underload_episodes =
      sustained_episodes(estimates, WorkloadState::Underload).episodes;
  if (log != nullptr) report.per_minute = per_minute_series(*log);
  for (const auto& probe : probes) {
    try {
      ProbeRow row;
      row.probe = probe;
      row.normalized = normalize_likert(probe.rating);
      row.alignment = align_probe_with_estimates(probe.t, estimates);
      report.probes.push_back(row);
    } catch (const Error& e) {
      if (e.code() != Errc::EmptyAlignment) throw;  // empty minutes are skipped
    }
  }
  return report;
}

namespace {

ordered_json episode_to_json(const Episode& episode) {
  return {{"state", to_string(episode.state)},
          {"start_ms", episode.start},
          {"count", episode.count},
          {"duration_ms", episode.duration_ms}};
}

}  // namespace

std::string shift_report_to_json(const ShiftReport& report) {
  ordered_json doc;
  doc["shift_id"] = report.shift_id;
  const auto& freq = report.frequencies;
  ordered_json frequencies;
  frequencies["total"] = freq.total;
  frequencies["usable"] = freq.usable;
  frequencies["no_data"] = freq.no_data;
  frequencies["underload"] = freq.underload;
  frequencies["normal_load"] = freq.normal_load;
  frequencies["overload"] = freq.overload;
  frequencies["pct_underload"] =
      freq.pct_underload ? ordered_json(*freq.pct_underload) : ordered_json(nullptr);
  frequencies["pct_normal_load"] =
      freq.pct_normal_load ? ordered_json(*freq.pct_normal_load) : ordered_json(nullptr);
  frequencies["pct_overload"] =
      freq.pct_overload ? ordered_json(*freq.pct_overload) : ordered_json(nullptr);
  doc["frequencies"] = std::move(frequencies);

  if (report.descriptives) {
    doc["descriptives"] = {{"mean", report.descriptives->mean},
                           {"sd", report.descriptives->sd},
                           {"min", report.descriptives->min},
                           {"max", report.descriptives->max},
                           {"count", report.descriptives->count}};
  }
  ordered_json overload = ordered_json::array();
  for (const auto& episode : report.overload_episodes) overload.push_back(episode_to_json(episode));
  doc["overload_episodes"] = std::move(overload);
  ordered_json underload = ordered_json::array();
  for (const auto& episode : report.underload_episodes) underload.push_back(episode_to_json(episode));
  doc["underload_episodes"] = std::move(underload);
  if (report.longest_overload) {
    doc["longest_overload"] = episode_to_json(*report.longest_overload);
  }
  if (report.per_minute) {
    const auto& per_minute = *report.per_minute;
    doc["per_minute"] = {{"tactics_plan", per_minute.tactics_plan},
                         {"tactics_commander", per_minute.tactics_commander},
                         {"blockages", per_minute.blockages},
                         {"tasked_hardware_ugv", per_minute.tasked_hardware_ugv},
                         {"tasked_hardware_uav", per_minute.tasked_hardware_uav},
                         {"tasked_virtual_ugv", per_minute.tasked_virtual_ugv},
                         {"tasked_virtual_uav", per_minute.tasked_virtual_uav},
                         {"active_hardware", per_minute.active_hardware}};
  }
  if (!report.probes.empty()) {
    ordered_json probes = ordered_json::array();
    for (const auto& row : report.probes) {
      probes.push_back({{"t_ms", row.probe.t},
                        {"dimension", to_string(row.probe.dimension)},
                        {"rating", row.probe.rating},
                        {"normalized", row.normalized},
                        {"estimate_mean", row.alignment.mean},
                        {"estimate_sd", row.alignment.sd},
                        {"estimate_count", row.alignment.count}});
    }
    doc["probes"] = std::move(probes);
  }
  return doc.dump(2);
}

void write_descriptives_csv(std::ostream& out, const ShiftReport& report) {
  out << "shift,mean,sd,min,max,count\n";
  out << report.shift_id << ',';
  if (report.descriptives) {
    out.precision(17);
    out << report.descriptives->mean << ',' << report.descriptives->sd << ','
        << report.descriptives->min << ',' << report.descriptives->max << ','
        << report.descriptives->count;
  } else {
    out << ",,,,0";
  }
  out << '\n';
}

void write_frequencies_csv(std::ostream& out, const ShiftReport& report) {
  const auto& freq = report.frequencies;
  out << "shift,normal_load,overload,underload,no_data,total\n";
  out << report.shift_id << ',' << freq.normal_load << ',' << freq.overload << ','
      << freq.underload << ',' << freq.no_data << ',' << freq.total << '\n';
}

void write_per_minute_csv(std::ostream& out, const PerMinuteSeries& series) {
  out << "minute,series,value\n";
  const auto emit = [&](const char* name, const std::vector<std::int64_t>& values) {
    for (std::size_t minute = 0; minute < values.size(); ++minute) {
      out << minute << ',' << name << ',' << values[minute] << '\n';
    }
  };
  emit("tactics_plan", series.tactics_plan);
  emit("tactics_commander", series.tactics_commander);
  emit("blockages", series.blockages);
  emit("tasked_hardware_ugv", series.tasked_hardware_ugv);
  emit("tasked_hardware_uav", series.tasked_hardware_uav);
  emit("tasked_virtual_ugv", series.tasked_virtual_ugv);
  emit("tasked_virtual_uav", series.tasked_virtual_uav);
  emit("active_hardware", series.active_hardware);
}

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;  // average, 1-based
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw Error(Errc::ContractViolation, "spearman needs two equal series of length >= 2");
  }
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += ra[i];
    mean_b += rb[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = ra[i] - mean_a;
    const double db = rb[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) return 0.0;
  return cov / std::sqrt(var_a * var_b);
}

std::vector<double> minute_means(std::span<const double> per_second) {
  std::vector<double> means;
  std::size_t i = 0;
  while (i < per_second.size()) {
    const std::size_t end = std::min(per_second.size(), i + 60);
    double sum = 0.0;
    for (std::size_t j = i; j < end; ++j) sum += per_second[j];
    means.push_back(sum / static_cast<double>(end - i));
    i = end;
  }
  return means;
}

}  // namespace swarmload
