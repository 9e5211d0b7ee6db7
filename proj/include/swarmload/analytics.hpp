// Shift- and campaign-level analytics: descriptive statistics, state
// frequencies, sustained-episode detection, per-minute event series, and the
// assembled shift report with its JSON/CSV outputs.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmload/sim/events.hpp"
#include "swarmload/subjective.hpp"
#include "swarmload/types.hpp"
#include "swarmload/workload.hpp"

namespace swarmload {

struct Descriptives {
  double mean = 0.0;
  double sd = 0.0;  ///< population SD
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// Mean/SD/min/max over the usable estimates; NoData entries are excluded.
/// Throws Error(EmptyShift) when nothing usable remains.
Descriptives shift_descriptives(std::span<const OverallEstimate> estimates);

struct CampaignShift {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

struct WeightedStats {
  double mean = 0.0;
  double sd = 0.0;
};

/// Estimate-count-weighted campaign statistics. The weighted SD pools the
/// per-shift second moments: sqrt(sum n_i (s_i^2 + m_i^2) / sum n_i - m_w^2).
WeightedStats weighted_campaign_stats(std::span<const CampaignShift> shifts);

struct StateFrequencies {
  std::size_t underload = 0;
  std::size_t normal_load = 0;
  std::size_t overload = 0;
  std::size_t no_data = 0;
  std::size_t usable = 0;  ///< total minus NoData
  std::size_t total = 0;
  /// Percentage conventions follow the published tables: the underload and
  /// overload shares are measured against the normal-load baseline, the
  /// normal-load share against all usable estimates. Absent when the
  /// denominator is empty.
  std::optional<double> pct_underload;
  std::optional<double> pct_normal_load;
  std::optional<double> pct_overload;
};

StateFrequencies state_frequencies(std::span<const OverallEstimate> estimates);

/// Maximal run of consecutive same-state estimates; 5-second cadence makes
/// duration count x 5000 ms.
struct Episode {
  WorkloadState state = WorkloadState::NormalLoad;
  Timestamp start = 0;
  std::size_t count = 0;
  Timestamp duration_ms = 0;
};

struct EpisodeScan {
  std::vector<Episode> episodes;
  std::optional<Episode> longest;
};

/// Maximal consecutive runs of the target state; NoData entries break runs.
EpisodeScan sustained_episodes(std::span<const OverallEstimate> estimates,
                               WorkloadState target);

/// Dense minute-indexed series named for plotting: tactics issued by origin,
/// blockage events, tasked vehicles by hardware/virtual x UGV/UAV, and
/// active hardware vehicles.
struct PerMinuteSeries {
  std::vector<std::int64_t> tactics_plan;
  std::vector<std::int64_t> tactics_commander;
  std::vector<std::int64_t> blockages;
  std::vector<std::int64_t> tasked_hardware_ugv;
  std::vector<std::int64_t> tasked_hardware_uav;
  std::vector<std::int64_t> tasked_virtual_ugv;
  std::vector<std::int64_t> tasked_virtual_uav;
  std::vector<std::int64_t> active_hardware;
  std::vector<std::string> warnings;

  std::size_t minutes() const { return tactics_plan.size(); }
};

/// Tally the event log by minute, zero-filled from minute 0 to the last
/// event's minute. Tasked counts come from tactic assignment intervals;
/// active counts from telemetry actually received.
PerMinuteSeries per_minute_series(const sim::EventLog& log);

struct ProbeRow {
  InSituProbe probe;
  double normalized = 0.0;
  ProbeAlignment alignment;
};

struct ShiftReport {
  std::string shift_id;
  StateFrequencies frequencies;
  std::optional<Descriptives> descriptives;  ///< absent when nothing usable
  std::vector<Episode> overload_episodes;
  std::vector<Episode> underload_episodes;
  std::optional<Episode> longest_overload;
  std::optional<PerMinuteSeries> per_minute;  ///< present when events provided
  std::vector<ProbeRow> probes;               ///< probes with non-empty alignment
};

ShiftReport build_shift_report(const std::string& shift_id,
                               std::span<const OverallEstimate> estimates,
                               std::span<const InSituProbe> probes,
                               const sim::EventLog* log);

std::string shift_report_to_json(const ShiftReport& report);
/// Table mirroring the per-shift descriptive-statistics layout.
void write_descriptives_csv(std::ostream& out, const ShiftReport& report);
/// Table mirroring the state-classification frequency layout.
void write_frequencies_csv(std::ostream& out, const ShiftReport& report);
/// Long-format `minute,series,value` rows for external plotting.
void write_per_minute_csv(std::ostream& out, const PerMinuteSeries& series);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

/// Minute-bucketed means of a 1 Hz series (index = second).
std::vector<double> minute_means(std::span<const double> per_second);

}  // namespace swarmload
