// Sensor stream ingestion: CSV parsing with per-row error reporting, gap
// detection, and the noise-channel Gaussian repair.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "swarmload/types.hpp"

namespace swarmload {

struct SensorSample {
  Timestamp t = 0;
  MetricKind metric = MetricKind::HeartRate;
  double value = 0.0;
  bool valid = true;  ///< invalid readings are ignored by all downstream math

  bool operator==(const SensorSample&) const = default;
};

/// One metric's time-ordered stream, nominally 1 Hz.
struct ChannelSeries {
  MetricKind metric = MetricKind::HeartRate;
  std::vector<SensorSample> samples;

  bool operator==(const ChannelSeries&) const = default;
};

constexpr Timestamp kNominalSampleIntervalMs = 1'000;

/// A hole in the recording; `end > start` always.
struct GapRecord {
  Timestamp start = 0;
  Timestamp end = 0;
  std::vector<MetricKind> affected;  ///< channels silent across the hole
};

struct RowError {
  std::size_t line = 0;  ///< 1-based, header is line 1
  std::string message;
};

struct ParseResult {
  std::vector<ChannelSeries> channels;  ///< ordered by MetricKind
  std::vector<RowError> errors;
};

/// Parse the sensor CSV format (header `t_ms,metric,value,valid`). Malformed
/// rows are reported and skipped; a missing or wrong header throws
/// Error(FormatError).
ParseResult parse_sensor_csv(std::istream& in);
ParseResult parse_sensor_csv_file(const std::string& path);

/// Serialize channels back to the same CSV format, rows merged in time order.
void write_sensor_csv(std::ostream& out, const std::vector<ChannelSeries>& channels);

/// Every inter-sample spacing greater than `max_gap_ms` becomes one gap,
/// spanning the last sample before the hole to the first one after.
std::vector<GapRecord> detect_gaps(const ChannelSeries& series,
                                   Timestamp max_gap_ms = 5'000);

struct ImputationStats {
  double mean = 0.0;  ///< weighted mean of the valid readings
  double sd = 0.0;    ///< weighted (population) standard deviation
  double min = 0.0;
  double max = 0.0;
  std::size_t valid_count = 0;
  std::size_t imputed_count = 0;
};

struct RepairResult {
  ChannelSeries series;
  ImputationStats stats;
};

/// Replace each invalid noise reading with a draw from
/// Normal(weighted mean, weighted SD) of the valid readings, clipped to the
/// valid extrema. Deterministic given the seed. Throws Error(NoValidReadings)
/// when the channel has no valid sample at all.
RepairResult repair_noise_channel(const ChannelSeries& series, std::uint64_t seed);

/// Optional stuck-sensor heuristic: flags runs of `min_run` or more identical
/// consecutive readings as invalid. Returns the number of samples flagged.
std::size_t flag_stuck_runs(ChannelSeries& series, std::size_t min_run = 30);

}  // namespace swarmload
