// Overall-workload engine: aggregates component estimates onto the 0-100
// scale, classifies the workload state, and runs the full per-shift pipeline
// from parsed channels to the 5-second estimate stream.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "swarmload/ingest.hpp"
#include "swarmload/profile.hpp"
#include "swarmload/types.hpp"

namespace swarmload {

struct Thresholds {
  double underload_max = 25.0;  ///< value <= this is underload
  double overload_min = 60.0;   ///< value >= this is overload
};

struct OverallEstimate {
  Timestamp t = 0;
  std::optional<double> value;  ///< absent for NoData ticks
  WorkloadState state = WorkloadState::NoData;
  std::vector<ComponentEstimate> components;  ///< all five when usable
  std::vector<ComponentKind> missing;  ///< components filled from the static model

  bool usable() const { return state != WorkloadState::NoData; }
};

/// Threshold classification; boundaries are inclusive on both sides.
/// Throws Error(ContractViolation) for non-finite values.
WorkloadState classify(double value, const Thresholds& thresholds = {});

/// Eq.-style aggregation: overall = 100 * (sum of present raw values + sum of
/// missing components' midpoints) / max_overall. `present` and `missing`
/// together must cover all five components exactly once.
OverallEstimate aggregate_overall(std::span<const ComponentEstimate> present,
                                  std::span<const ComponentKind> missing,
                                  const ModelProfile& profile, Timestamp t,
                                  const Thresholds& thresholds = {});

struct ShiftConfig {
  /// Channels recorded this shift; components whose feeding metrics are not
  /// all present take the static model value for the whole shift.
  std::vector<MetricKind> present_metrics{kAllMetrics.begin(), kAllMetrics.end()};
  Thresholds thresholds;
  Timestamp max_gap_ms = 5'000;
  double max_missing_fraction = 0.20;
  ResamplePolicy speech_resample = ResamplePolicy::BinMean;
  std::uint64_t noise_repair_seed = 0;
};

struct PipelineResult {
  std::vector<OverallEstimate> estimates;
  std::vector<ComponentKind> missing_components;
  std::optional<ImputationStats> noise_repair;
  std::size_t usable_count = 0;
  std::size_t no_data_count = 0;
};

/// Full shift pipeline: noise repair, per-channel gap detection and epoch
/// features (speech inputs at 1 s, the rest at 5 s), component estimation
/// with static substitution for absent channels, aggregation and
/// classification on the 5-second grid. Per-tick problems degrade to NoData
/// or midpoint substitution; the shift never aborts.
PipelineResult run_pipeline(std::span<const ChannelSeries> channels,
                            const ModelProfile& profile,
                            const ShiftConfig& config);

// Estimate stream serialization: JSONL (one object per tick) and a CSV
// mirror with a fixed column order.
void write_estimates_jsonl(std::ostream& out, std::span<const OverallEstimate> estimates);
void write_estimates_csv(std::ostream& out, std::span<const OverallEstimate> estimates);
std::vector<OverallEstimate> read_estimates_jsonl(std::istream& in);

}  // namespace swarmload
