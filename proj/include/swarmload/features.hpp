// Epoch feature extraction: the four time-based features (mean, variance,
// average gradient, slope) over 30-second sliding windows, plus the speech
// resampling onto the 5-second grid.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "swarmload/ingest.hpp"
#include "swarmload/types.hpp"

namespace swarmload {

struct FeatureVector {
  MetricKind metric = MetricKind::HeartRate;
  Timestamp window_end = 0;
  double mean = 0.0;
  double variance = 0.0;      ///< population variance
  double avg_gradient = 0.0;  ///< mean of successive differences, per second
  double slope = 0.0;         ///< least-squares linear slope, per second
};

struct EpochSpec {
  Timestamp window_ms = kEpochWindowMs;  ///< fixed at 30 s
  Timestamp step_ms = kOverallStepMs;    ///< 5 s; 1 s for speech inputs
  /// Windows missing more than this fraction of their nominal samples are
  /// emitted as NoData instead of being computed over the remainder.
  double max_missing_fraction = 0.20;
};

/// Features over one window of valid samples. Returns nullopt when fewer
/// than two valid samples are present (the epoch is later marked NoData).
std::optional<FeatureVector> extract_epoch_features(
    std::span<const SensorSample> window, MetricKind metric,
    Timestamp window_end);

/// One grid slot of slide_epochs: `features == nullopt` marks NoData.
struct EpochOutput {
  Timestamp window_end = 0;
  std::optional<FeatureVector> features;
};

/// Slide 30-second windows over the channel. Windows end at 30 s, 30 s + step,
/// ... up to the last sample. A window emits NoData when it overlaps a
/// recording gap, misses more than the tolerated sample fraction, or holds
/// fewer than two valid samples.
std::vector<EpochOutput> slide_epochs(const ChannelSeries& series,
                                      const EpochSpec& spec,
                                      std::span<const GapRecord> gaps);

struct TimedValue {
  Timestamp t = 0;
  double value = 0.0;
};

struct ResampledValue {
  Timestamp t = 0;
  std::optional<double> value;  ///< nullopt when the bin held no estimates
};

/// How the 1 Hz speech estimates are folded onto the 5 s grid.
enum class ResamplePolicy {
  BinMean,     ///< mean of the estimates in each (t-5s, t] bin
  TakeLatest,  ///< decimation: last estimate in the bin
};

/// Resample 1-second-cadence estimates to the 5-second overall grid. Bins end
/// at 30 s, 35 s, ...; a bin covers (t - 5000, t].
std::vector<ResampledValue> resample_speech_estimates(
    std::span<const TimedValue> estimates,
    ResamplePolicy policy = ResamplePolicy::BinMean,
    Timestamp step_ms = kOverallStepMs);

}  // namespace swarmload
