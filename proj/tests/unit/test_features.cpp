#include <doctest.h>

#include <cmath>
#include <vector>

#include "swarmload/errors.hpp"
#include "swarmload/features.hpp"
#include "swarmload/rng.hpp"

using namespace swarmload;

namespace {

std::vector<SensorSample> window_of(const std::vector<double>& values,
                                    Timestamp start = 0, Timestamp step = 1000) {
  std::vector<SensorSample> window;
  for (std::size_t i = 0; i < values.size(); ++i) {
    window.push_back({start + static_cast<Timestamp>(i) * step, MetricKind::HeartRate,
                      values[i], true});
  }
  return window;
}

// Independent reference: normal-equation slope and raw-moment variance in
// long double, deliberately different algebra from the implementation.
struct Reference {
  double mean, variance, gradient, slope;
};

Reference reference_features(const std::vector<SensorSample>& window) {
  long double sum_y = 0, sum_x = 0, sum_xy = 0, sum_xx = 0, sum_yy = 0;
  std::vector<std::pair<long double, long double>> pts;
  for (const auto& sample : window) {
    if (!sample.valid) continue;
    const long double x = static_cast<long double>(sample.t) / 1000.0L;
    const long double y = sample.value;
    pts.push_back({x, y});
    sum_x += x;
    sum_y += y;
    sum_xy += x * y;
    sum_xx += x * x;
    sum_yy += y * y;
  }
  const long double n = static_cast<long double>(pts.size());
  Reference ref{};
  ref.mean = static_cast<double>(sum_y / n);
  ref.variance = static_cast<double>(sum_yy / n - (sum_y / n) * (sum_y / n));
  ref.slope =
      static_cast<double>((n * sum_xy - sum_x * sum_y) / (n * sum_xx - sum_x * sum_x));
  long double grad = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    grad += (pts[i].second - pts[i - 1].second) / (pts[i].first - pts[i - 1].first);
  }
  ref.gradient = static_cast<double>(grad / (n - 1));
  return ref;
}

}  // namespace

TEST_CASE("constant window has zero spread and zero trend") {
  const auto window = window_of(std::vector<double>(30, 82.0));
  const auto features = extract_epoch_features(window, MetricKind::HeartRate, 30'000);
  REQUIRE(features);
  CHECK(features->mean == doctest::Approx(82.0));
  CHECK(features->variance == doctest::Approx(0.0));
  CHECK(features->avg_gradient == doctest::Approx(0.0));
  CHECK(features->slope == doctest::Approx(0.0));
}

TEST_CASE("unit ramp window") {
  std::vector<double> values(30);
  for (int i = 0; i < 30; ++i) values[i] = i;  // value == time in seconds
  const auto features =
      extract_epoch_features(window_of(values), MetricKind::HeartRate, 30'000);
  REQUIRE(features);
  CHECK(features->mean == doctest::Approx(14.5));
  CHECK(features->variance == doctest::Approx(899.0 / 12.0));  // (30^2-1)/12
  CHECK(features->slope == doctest::Approx(1.0));
  CHECK(features->avg_gradient == doctest::Approx(1.0));
}

TEST_CASE("fewer than two valid samples is not an epoch") {
  CHECK_FALSE(extract_epoch_features({}, MetricKind::HeartRate, 30'000));
  const auto one = window_of({80.0});
  CHECK_FALSE(extract_epoch_features(one, MetricKind::HeartRate, 30'000));
  auto two = window_of({80.0, 81.0});
  two[1].valid = false;
  CHECK_FALSE(extract_epoch_features(two, MetricKind::HeartRate, 30'000));
}

TEST_CASE("random windows match the brute-force reference within 1e-9") {
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> values(30);
    for (auto& v : values) v = 40.0 + 80.0 * rng.uniform();
    auto window = window_of(values, 120'000 * trial);
    for (auto& sample : window) {
      if (rng.uniform() < 0.1) sample.valid = false;
    }
    std::size_t valid = 0;
    for (const auto& sample : window) valid += sample.valid ? 1 : 0;
    if (valid < 2) continue;
    const auto features =
        extract_epoch_features(window, MetricKind::HeartRate, 120'000 * trial + 30'000);
    const auto ref = reference_features(window);
    REQUIRE(features);
    CHECK(std::abs(features->mean - ref.mean) < 1e-9);
    CHECK(std::abs(features->variance - ref.variance) < 1e-9);
    CHECK(std::abs(features->slope - ref.slope) < 1e-9);
    CHECK(std::abs(features->avg_gradient - ref.gradient) < 1e-9);
  }
}

TEST_CASE("affine input transform maps features affinely") {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> values(30);
    for (auto& v : values) v = 50.0 + 20.0 * rng.uniform();
    const double a = rng.uniform_in(-3.0, 3.0);
    const double b = rng.uniform_in(-50.0, 50.0);
    std::vector<double> mapped(30);
    for (int i = 0; i < 30; ++i) mapped[i] = a * values[i] + b;

    const auto base =
        extract_epoch_features(window_of(values), MetricKind::HeartRate, 30'000);
    const auto scaled =
        extract_epoch_features(window_of(mapped), MetricKind::HeartRate, 30'000);
    REQUIRE(base);
    REQUIRE(scaled);
    CHECK(scaled->mean == doctest::Approx(a * base->mean + b).epsilon(1e-9));
    CHECK(scaled->variance == doctest::Approx(a * a * base->variance).epsilon(1e-9));
    CHECK(scaled->slope == doctest::Approx(a * base->slope).epsilon(1e-9));
    CHECK(scaled->avg_gradient == doctest::Approx(a * base->avg_gradient).epsilon(1e-9));
  }
}

TEST_CASE("time reversal negates trend features and keeps moments") {
  Rng rng(17);
  std::vector<double> values(30);
  for (auto& v : values) v = 60.0 + 30.0 * rng.uniform();
  std::vector<double> reversed(values.rbegin(), values.rend());

  const auto forward =
      extract_epoch_features(window_of(values), MetricKind::HeartRate, 30'000);
  const auto backward =
      extract_epoch_features(window_of(reversed), MetricKind::HeartRate, 30'000);
  REQUIRE(forward);
  REQUIRE(backward);
  CHECK(backward->mean == doctest::Approx(forward->mean).epsilon(1e-12));
  CHECK(backward->variance == doctest::Approx(forward->variance).epsilon(1e-12));
  CHECK(backward->slope == doctest::Approx(-forward->slope).epsilon(1e-9));
  CHECK(backward->avg_gradient == doctest::Approx(-forward->avg_gradient).epsilon(1e-9));
}

namespace {

ChannelSeries one_hz_series(int seconds, MetricKind metric = MetricKind::HeartRate) {
  ChannelSeries series;
  series.metric = metric;
  for (int i = 0; i <= seconds; ++i) {
    series.samples.push_back({i * 1000, metric, 80.0 + (i % 7), true});
  }
  return series;
}

}  // namespace

TEST_CASE("slide_epochs emission counts") {
  const auto series = one_hz_series(120);
  EpochSpec overall;
  const auto epochs = slide_epochs(series, overall, {});
  CHECK(epochs.size() == 19);  // ends at 30, 35, ..., 120
  CHECK(epochs.front().window_end == 30'000);
  CHECK(epochs.back().window_end == 120'000);
  for (const auto& epoch : epochs) CHECK(epoch.features.has_value());

  EpochSpec speech;
  speech.step_ms = kSpeechStepMs;
  CHECK(slide_epochs(series, speech, {}).size() == 91);
}

TEST_CASE("slide_epochs count formula for gap-free series") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int seconds = static_cast<int>(rng.uniform_int(30, 400));
    const auto series = one_hz_series(seconds);
    EpochSpec spec;
    const auto epochs = slide_epochs(series, spec, {});
    const auto expected = (static_cast<Timestamp>(seconds) * 1000 - 30'000) / 5'000 + 1;
    CHECK(epochs.size() == static_cast<std::size_t>(expected));
  }
}

TEST_CASE("epoch spec shape is enforced") {
  const auto series = one_hz_series(60);
  EpochSpec bad_window;
  bad_window.window_ms = 20'000;
  CHECK_THROWS_AS(slide_epochs(series, bad_window, {}), Error);
  EpochSpec bad_step;
  bad_step.step_ms = 7'000;  // does not divide 30 s
  CHECK_THROWS_AS(slide_epochs(series, bad_step, {}), Error);
}

TEST_CASE("windows overlapping a gap are NoData") {
  // samples exist up to 40 s and from 70 s on; gap (40000, 70000)
  ChannelSeries series;
  series.metric = MetricKind::HeartRate;
  for (int i = 0; i <= 40; ++i) {
    series.samples.push_back({i * 1000, MetricKind::HeartRate, 80.0, true});
  }
  for (int i = 70; i <= 130; ++i) {
    series.samples.push_back({i * 1000, MetricKind::HeartRate, 80.0, true});
  }
  const auto gaps = detect_gaps(series, 5'000);
  REQUIRE(gaps.size() == 1);
  EpochSpec spec;
  const auto epochs = slide_epochs(series, spec, gaps);
  for (const auto& epoch : epochs) {
    const bool in_no_data_range =
        epoch.window_end >= 40'000 && epoch.window_end <= 100'000;
    CAPTURE(epoch.window_end);
    CHECK(epoch.features.has_value() == !in_no_data_range);
  }
}

TEST_CASE("missing-sample tolerance boundary") {
  // 30-sample windows tolerate up to 20% missing: 24 valid passes, 23 fails
  auto make_series = [](int invalid_count) {
    ChannelSeries series;
    series.metric = MetricKind::HeartRate;
    for (int i = 0; i <= 30; ++i) {
      const bool valid = i > invalid_count;  // first samples invalid
      series.samples.push_back({i * 1000, MetricKind::HeartRate, 80.0 + i, valid});
    }
    return series;
  };
  EpochSpec spec;
  // window (0, 30000] holds samples at 1..30 s; invalid_count of them invalid
  const auto six = slide_epochs(make_series(6), spec, {});
  REQUIRE(!six.empty());
  CHECK(six.front().features.has_value());
  const auto seven = slide_epochs(make_series(7), spec, {});
  REQUIRE(!seven.empty());
  CHECK_FALSE(seven.front().features.has_value());
}

TEST_CASE("resample_speech_estimates") {
  SUBCASE("constant input stays constant") {
    std::vector<TimedValue> estimates;
    for (int t = 30; t <= 120; ++t) estimates.push_back({t * 1000, 40.0});
    const auto bins = resample_speech_estimates(estimates);
    CHECK(bins.size() == 19);
    for (const auto& bin : bins) {
      REQUIRE(bin.value.has_value());
      CHECK(*bin.value == doctest::Approx(40.0));
    }
  }
  SUBCASE("bin mean of five values") {
    std::vector<TimedValue> estimates = {
        {31'000, 10.0}, {32'000, 20.0}, {33'000, 30.0}, {34'000, 40.0}, {35'000, 50.0}};
    const auto bins = resample_speech_estimates(estimates);
    REQUIRE(bins.size() == 2);
    CHECK_FALSE(bins[0].value.has_value());  // bin ending 30 s is empty
    REQUIRE(bins[1].value.has_value());
    CHECK(*bins[1].value == doctest::Approx(30.0));
  }
  SUBCASE("staircase equals per-bin brute force") {
    Rng rng(23);
    std::vector<TimedValue> estimates;
    for (int t = 30; t <= 300; ++t) {
      estimates.push_back({t * 1000, std::floor(rng.uniform() * 10) * 7.0});
    }
    const auto bins = resample_speech_estimates(estimates);
    for (const auto& bin : bins) {
      double sum = 0.0;
      int count = 0;
      for (const auto& estimate : estimates) {
        if (estimate.t > bin.t - 5'000 && estimate.t <= bin.t) {
          sum += estimate.value;
          ++count;
        }
      }
      REQUIRE(bin.value.has_value());
      CHECK(*bin.value == doctest::Approx(sum / count).epsilon(1e-12));
    }
  }
  SUBCASE("take-latest policy decimates") {
    std::vector<TimedValue> estimates = {
        {31'000, 10.0}, {32'000, 20.0}, {33'000, 30.0}, {34'000, 40.0}, {35'000, 50.0}};
    const auto bins =
        resample_speech_estimates(estimates, ResamplePolicy::TakeLatest);
    REQUIRE(bins.size() == 2);
    REQUIRE(bins[1].value.has_value());
    CHECK(*bins[1].value == doctest::Approx(50.0));
  }
}
