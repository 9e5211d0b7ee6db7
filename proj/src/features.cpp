#include "swarmload/features.hpp"

#include <algorithm>
#include <cmath>

#include "swarmload/errors.hpp"

namespace swarmload {

std::optional<FeatureVector> extract_epoch_features(
    std::span<const SensorSample> window, MetricKind metric,
    Timestamp window_end) {
  std::vector<const SensorSample*> valid;
  valid.reserve(window.size());
  for (const auto& sample : window) {
    if (sample.valid) valid.push_back(&sample);
  }
  if (valid.size() < 2) return std::nullopt;

  const double n = static_cast<double>(valid.size());
  double value_sum = 0.0;
  double time_sum = 0.0;
  for (const auto* sample : valid) {
    value_sum += sample->value;
    time_sum += static_cast<double>(sample->t) / 1000.0;
  }
  const double mean = value_sum / n;
  const double time_mean = time_sum / n;

  double sq_dev_sum = 0.0;
  double cross_sum = 0.0;
  double time_dev_sum = 0.0;
  for (const auto* sample : valid) {
    const double dv = sample->value - mean;
    const double dt = static_cast<double>(sample->t) / 1000.0 - time_mean;
    sq_dev_sum += dv * dv;
    cross_sum += dt * dv;
    time_dev_sum += dt * dt;
  }

  double gradient_sum = 0.0;
  for (std::size_t i = 1; i < valid.size(); ++i) {
    const double dv = valid[i]->value - valid[i - 1]->value;
    const double dt = static_cast<double>(valid[i]->t - valid[i - 1]->t) / 1000.0;
    gradient_sum += dv / dt;
  }

  FeatureVector features;
  features.metric = metric;
  features.window_end = window_end;
  features.mean = mean;
  features.variance = sq_dev_sum / n;
  features.slope = cross_sum / time_dev_sum;
  features.avg_gradient = gradient_sum / (n - 1.0);
  return features;
}

namespace {

bool window_overlaps_gap(Timestamp window_start, Timestamp window_end,
                         std::span<const GapRecord> gaps) {
  for (const auto& gap : gaps) {
    if (window_end >= gap.start && window_start <= gap.end) return true;
  }
  return false;
}

}  // namespace

std::vector<EpochOutput> slide_epochs(const ChannelSeries& series,
                                      const EpochSpec& spec,
                                      std::span<const GapRecord> gaps) {
  if (spec.window_ms != kEpochWindowMs || spec.step_ms <= 0 ||
      spec.window_ms % spec.step_ms != 0) {
    throw Error(Errc::ContractViolation,
                "epoch spec: window must be 30 s and divisible by the step");
  }
  std::vector<EpochOutput> outputs;
  if (series.samples.empty()) return outputs;
  const Timestamp last_t = series.samples.back().t;
  const double nominal_count =
      static_cast<double>(spec.window_ms) / static_cast<double>(kNominalSampleIntervalMs);

  std::size_t lo = 0;  // first sample with t > window_start
  std::size_t hi = 0;  // one past the last sample with t <= window_end
  for (Timestamp end = spec.window_ms; end <= last_t; end += spec.step_ms) {
    const Timestamp start = end - spec.window_ms;
    while (lo < series.samples.size() && series.samples[lo].t <= start) ++lo;
    while (hi < series.samples.size() && series.samples[hi].t <= end) ++hi;

    EpochOutput output;
    output.window_end = end;
    if (!window_overlaps_gap(start, end, gaps)) {
      const std::span<const SensorSample> window(series.samples.data() + lo, hi - lo);
      std::size_t valid_count = 0;
      for (const auto& sample : window) valid_count += sample.valid ? 1 : 0;
      const double missing =
          1.0 - static_cast<double>(valid_count) / nominal_count;
      if (missing <= spec.max_missing_fraction) {
        output.features = extract_epoch_features(window, series.metric, end);
      }
    }
    outputs.push_back(std::move(output));
  }
  return outputs;
}

std::vector<ResampledValue> resample_speech_estimates(
    std::span<const TimedValue> estimates, ResamplePolicy policy,
    Timestamp step_ms) {
  std::vector<ResampledValue> outputs;
  if (estimates.empty()) return outputs;
  const Timestamp last_t = estimates.back().t;

  std::size_t lo = 0;
  std::size_t hi = 0;
  for (Timestamp end = kEpochWindowMs; end <= last_t; end += step_ms) {
    const Timestamp start = end - step_ms;
    while (lo < estimates.size() && estimates[lo].t <= start) ++lo;
    while (hi < estimates.size() && estimates[hi].t <= end) ++hi;

    ResampledValue output;
    output.t = end;
    if (hi > lo) {
      if (policy == ResamplePolicy::TakeLatest) {
        output.value = estimates[hi - 1].value;
      } else {
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) sum += estimates[i].value;
        output.value = sum / static_cast<double>(hi - lo);
      }
    }
    outputs.push_back(output);
  }
  return outputs;
}

}  // namespace swarmload
