#include <doctest.h>

#include <cmath>
#include <sstream>

#include "swarmload/errors.hpp"
#include "swarmload/rng.hpp"
#include "swarmload/synth.hpp"
#include "swarmload/workload.hpp"

using namespace swarmload;

namespace {

ComponentEstimate at_display(ComponentKind kind, double display,
                             const ModelProfile& profile) {
  ComponentEstimate estimate;
  estimate.kind = kind;
  estimate.t = 30'000;
  estimate.display_value = display;
  estimate.raw_value = display * profile.component(kind).max_raw / 100.0;
  estimate.source = EstimateSource::Sensed;
  return estimate;
}

}  // namespace

TEST_CASE("classification thresholds are inclusive") {
  CHECK(classify(25.0) == WorkloadState::Underload);
  CHECK(classify(25.000001) == WorkloadState::NormalLoad);
  CHECK(classify(60.0) == WorkloadState::Overload);
  CHECK(classify(59.999999) == WorkloadState::NormalLoad);
  CHECK(classify(46.58) == WorkloadState::NormalLoad);
  CHECK(classify(0.0) == WorkloadState::Underload);
  CHECK(classify(100.0) == WorkloadState::Overload);
  CHECK_THROWS_AS(classify(std::nan("")), Error);
}

TEST_CASE("classification partitions every finite value") {
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const double value = rng.uniform_in(-50.0, 150.0);
    int matches = 0;
    if (value <= 25.0) ++matches;
    if (value >= 60.0) ++matches;
    if (value > 25.0 && value < 60.0) ++matches;
    CHECK(matches == 1);
    CHECK(classify(value) != WorkloadState::NoData);
  }
}

TEST_CASE("aggregation pins") {
  const auto profile = uniform_static_profile();

  SUBCASE("all components at raw max normalize to 100") {
    std::vector<ComponentEstimate> present;
    for (const auto kind : kAllComponents) present.push_back(at_display(kind, 100.0, profile));
    const auto overall = aggregate_overall(present, {}, profile, 30'000);
    REQUIRE(overall.value);
    CHECK(std::abs(*overall.value - 100.0) < 1e-9);
    CHECK(overall.state == WorkloadState::Overload);
  }
  SUBCASE("all zero normalizes to 0") {
    std::vector<ComponentEstimate> present;
    for (const auto kind : kAllComponents) present.push_back(at_display(kind, 0.0, profile));
    const auto overall = aggregate_overall(present, {}, profile, 30'000);
    REQUIRE(overall.value);
    CHECK(std::abs(*overall.value) < 1e-12);
    CHECK(overall.state == WorkloadState::Underload);
  }
  SUBCASE("four sensed components with visual from the static model") {
    const std::vector<ComponentEstimate> present = {
        at_display(ComponentKind::Cognitive, 43.52, profile),
        at_display(ComponentKind::Speech, 9.73, profile),
        at_display(ComponentKind::Auditory, 59.20, profile),
        at_display(ComponentKind::Physical, 61.34, profile)};
    const std::vector<ComponentKind> missing = {ComponentKind::Visual};
    const auto overall = aggregate_overall(present, missing, profile, 30'000);
    REQUIRE(overall.value);
    const double expected = 100.0 * (0.1408 * (43.52 + 9.73 + 59.20 + 61.34) + 7.04) / 70.4;
    CHECK(*overall.value == doctest::Approx(expected).epsilon(1e-12));
    CHECK(*overall.value == doctest::Approx(44.76).epsilon(1e-3));
    REQUIRE(overall.components.size() == 5);
    CHECK(overall.missing == missing);
  }
}

TEST_CASE("aggregation contract violations") {
  const auto profile = uniform_static_profile();
  const std::vector<ComponentEstimate> cognitive_only = {
      at_display(ComponentKind::Cognitive, 50.0, profile)};

  SUBCASE("component both present and missing") {
    const std::vector<ComponentKind> missing = {
        ComponentKind::Cognitive, ComponentKind::Speech, ComponentKind::Auditory,
        ComponentKind::Visual, ComponentKind::Physical};
    CHECK_THROWS_AS(aggregate_overall(cognitive_only, missing, profile, 0), Error);
  }
  SUBCASE("coverage incomplete") {
    const std::vector<ComponentKind> missing = {ComponentKind::Visual};
    CHECK_THROWS_AS(aggregate_overall(cognitive_only, missing, profile, 0), Error);
  }
}

TEST_CASE("raising any present component strictly raises the overall value") {
  const auto profile = uniform_static_profile();
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ComponentEstimate> present;
    for (const auto kind : kAllComponents) {
      present.push_back(at_display(kind, rng.uniform_in(5.0, 95.0), profile));
    }
    const auto base = aggregate_overall(present, {}, profile, 0);
    const auto which = static_cast<std::size_t>(rng.uniform_int(0, 4));
    present[which].raw_value += 0.5;
    const auto bumped = aggregate_overall(present, {}, profile, 0);
    CHECK(*bumped.value > *base.value);
  }
}

TEST_CASE("midpoint substitution raises the estimate over treating missing as zero") {
  const auto profile = uniform_static_profile();
  const std::vector<ComponentEstimate> present = {
      at_display(ComponentKind::Cognitive, 40.0, profile),
      at_display(ComponentKind::Speech, 30.0, profile),
      at_display(ComponentKind::Auditory, 50.0, profile),
      at_display(ComponentKind::Physical, 45.0, profile)};
  const std::vector<ComponentKind> missing = {ComponentKind::Visual};
  const auto with_midpoint = aggregate_overall(present, missing, profile, 0);

  auto zero_mid = profile;
  zero_mid.component(ComponentKind::Visual).midpoint_raw = 0.0;
  const auto without = aggregate_overall(present, missing, zero_mid, 0);
  CHECK(*with_midpoint.value > *without.value);
}

namespace {

std::vector<ChannelSeries> flat_demand_channels(int seconds, std::uint64_t seed) {
  std::vector<double> demand(static_cast<std::size_t>(seconds) + 1, 0.3);
  return synthesize(demand, default_physio_profile(), seed);
}

}  // namespace

TEST_CASE("pipeline cadence: one-hour shift gives 715 estimates") {
  const auto channels = flat_demand_channels(3600, 5);
  ShiftConfig config;
  const auto result = run_pipeline(channels, reference_linear_profile(), config);
  CHECK(result.estimates.size() == 715);
  CHECK(result.estimates.front().t == 30'000);
  CHECK(result.estimates.back().t == 3'600'000);
  CHECK(result.usable_count + result.no_data_count == result.estimates.size());
  CHECK(result.no_data_count == 0);
  // visual is never objectively sensed
  REQUIRE(result.missing_components.size() == 1);
  CHECK(result.missing_components[0] == ComponentKind::Visual);
  for (const auto& estimate : result.estimates) {
    REQUIRE(estimate.components.size() == 5);
  }
}

TEST_CASE("absent microphone turns every speech estimate static") {
  const auto channels = flat_demand_channels(600, 6);
  ShiftConfig config;
  config.present_metrics = {MetricKind::HeartRate, MetricKind::Hrv,
                            MetricKind::RespirationRate, MetricKind::PostureMagnitude,
                            MetricKind::NoiseLevel};
  const auto result = run_pipeline(channels, reference_linear_profile(), config);
  CHECK(result.usable_count > 0);
  for (const auto& estimate : result.estimates) {
    if (!estimate.usable()) continue;
    const auto speech = std::find_if(
        estimate.components.begin(), estimate.components.end(),
        [](const ComponentEstimate& c) { return c.kind == ComponentKind::Speech; });
    REQUIRE(speech != estimate.components.end());
    CHECK(speech->source == EstimateSource::StaticModel);
    CHECK(std::find(estimate.missing.begin(), estimate.missing.end(),
                    ComponentKind::Speech) != estimate.missing.end());
  }
}

TEST_CASE("recording holes become NoData ticks, counted separately") {
  auto channels = flat_demand_channels(600, 7);
  // drop 60 seconds from every channel: 240 s .. 300 s
  std::vector<FaultSpec> faults;
  for (const auto metric : kAllMetrics) {
    faults.push_back({metric, 240'000, 300'000, FaultMode::DropSamples});
  }
  channels = inject_faults(std::move(channels), faults, 0);

  ShiftConfig config;
  const auto result = run_pipeline(channels, reference_linear_profile(), config);
  CHECK(result.estimates.size() == 115);  // 30..600 step 5
  CHECK(result.no_data_count > 0);
  CHECK(result.usable_count + result.no_data_count == result.estimates.size());
  // the hole leaves a gap (239000, 300000); every tick whose closed window
  // intersects it is NoData, everything else stays usable
  for (const auto& estimate : result.estimates) {
    CAPTURE(estimate.t);
    if (estimate.t >= 239'000 && estimate.t - 30'000 <= 300'000) {
      CHECK(estimate.state == WorkloadState::NoData);
      CHECK(!estimate.value.has_value());
      CHECK(estimate.components.empty());
    } else {
      CHECK(estimate.state != WorkloadState::NoData);
    }
  }
}

TEST_CASE("pipeline without usable channels fails loudly") {
  ShiftConfig config;
  CHECK_THROWS_AS(run_pipeline({}, reference_linear_profile(), config), Error);
}

TEST_CASE("estimates jsonl round trip") {
  const auto channels = flat_demand_channels(300, 8);
  ShiftConfig config;
  const auto result = run_pipeline(channels, reference_linear_profile(), config);

  std::ostringstream out;
  write_estimates_jsonl(out, result.estimates);
  std::istringstream in(out.str());
  const auto parsed = read_estimates_jsonl(in);
  REQUIRE(parsed.size() == result.estimates.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].t == result.estimates[i].t);
    CHECK(parsed[i].state == result.estimates[i].state);
    if (result.estimates[i].value) {
      REQUIRE(parsed[i].value);
      CHECK(*parsed[i].value == doctest::Approx(*result.estimates[i].value).epsilon(1e-12));
    }
    CHECK(parsed[i].components.size() == result.estimates[i].components.size());
    CHECK(parsed[i].missing == result.estimates[i].missing);
  }
}
