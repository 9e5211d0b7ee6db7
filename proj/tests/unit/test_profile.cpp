#include <doctest.h>

#include <cmath>

#include "swarmload/errors.hpp"
#include "swarmload/profile.hpp"
#include "swarmload/rng.hpp"

using namespace swarmload;

namespace {

FeatureVector fv(MetricKind metric, double mean, double variance = 0.0,
                 double gradient = 0.0, double slope = 0.0, Timestamp t = 30'000) {
  return {metric, t, mean, variance, gradient, slope};
}

std::vector<FeatureVector> cognitive_inputs(double hr, double hrv, double noise) {
  return {fv(MetricKind::HeartRate, hr), fv(MetricKind::Hrv, hrv),
          fv(MetricKind::NoiseLevel, noise)};
}

}  // namespace

TEST_CASE("estimator input dimensions") {
  CHECK(feature_input_dim(ComponentKind::Cognitive) == 12);
  CHECK(feature_input_dim(ComponentKind::Physical) == 12);
  CHECK(feature_input_dim(ComponentKind::Auditory) == 4);
  CHECK(feature_input_dim(ComponentKind::Speech) == 16);
  CHECK(estimator_input_dim(ComponentKind::Cognitive) == 15);
  CHECK(estimator_input_dim(ComponentKind::Physical) == 15);
  CHECK(estimator_input_dim(ComponentKind::Auditory) == 7);
  CHECK(estimator_input_dim(ComponentKind::Speech) == 16);
}

TEST_CASE("uniform profile is valid and round-trips through json") {
  const auto profile = uniform_static_profile();
  CHECK(profile.max_overall == doctest::Approx(70.4));
  for (const auto kind : kAllComponents) {
    CHECK(profile.component(kind).max_raw == doctest::Approx(14.08));
    CHECK(profile.component(kind).midpoint_raw == doctest::Approx(7.04));
  }
  const auto reloaded = load_profile(profile_to_json(reference_linear_profile()));
  CHECK(reloaded.max_overall == doctest::Approx(70.4));
  CHECK(std::holds_alternative<LinearWeights>(
      reloaded.component(ComponentKind::Cognitive).estimator));
}

TEST_CASE("profile validation failures") {
  auto broken = uniform_static_profile();

  SUBCASE("ceilings must sum to the overall maximum") {
    broken.component(ComponentKind::Visual).max_raw = 4.0;  // sum 60.32
    CHECK_THROWS_AS(load_profile(profile_to_json(broken)), Error);
    try {
      load_profile(profile_to_json(broken));
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ProfileInvalid);
    }
  }
  SUBCASE("midpoint outside [0, max_raw]") {
    broken.component(ComponentKind::Speech).midpoint_raw = 15.0;
    CHECK_THROWS_AS(load_profile(profile_to_json(broken)), Error);
  }
  SUBCASE("wrong estimator input dimension") {
    auto profile = reference_linear_profile();
    auto& linear = std::get<LinearWeights>(
        profile.component(ComponentKind::Cognitive).estimator);
    linear.weights.resize(11);
    CHECK_THROWS_WITH_AS(load_profile(profile_to_json(profile)),
                         doctest::Contains("input dim"), Error);
  }
  SUBCASE("network layer shape mismatch") {
    auto profile = uniform_static_profile();
    NetworkWeights net;
    net.layers = {15, 4, 1};
    net.weights = {std::vector<double>(15 * 4, 0.0), std::vector<double>(3, 0.0)};
    net.biases = {std::vector<double>(4, 0.0), std::vector<double>(1, 0.0)};
    profile.component(ComponentKind::Cognitive).estimator = net;
    CHECK_THROWS_AS(load_profile(profile_to_json(profile)), Error);
  }
  SUBCASE("visual may not carry an estimator") {
    CHECK_THROWS_AS(load_profile(R"({
      "max_overall_workload": 70.4,
      "components": {
        "cognitive": {"max_raw": 14.08, "midpoint_raw": 7.04},
        "speech": {"max_raw": 14.08, "midpoint_raw": 7.04},
        "auditory": {"max_raw": 14.08, "midpoint_raw": 7.04},
        "visual": {"max_raw": 14.08, "midpoint_raw": 7.04,
                   "estimator": {"type": "linear", "weights": [], "bias": 0}},
        "physical": {"max_raw": 14.08, "midpoint_raw": 7.04}
      }})"),
                    Error);
  }
}

TEST_CASE("zero network squashes to the display midpoint") {
  auto profile = uniform_static_profile();
  NetworkWeights net;
  net.layers = {15, 3, 1};
  net.weights = {std::vector<double>(45, 0.0), std::vector<double>(3, 0.0)};
  net.biases = {std::vector<double>(3, 0.0), std::vector<double>(1, 0.0)};
  profile.component(ComponentKind::Cognitive).estimator = net;

  const auto estimate = estimate_component(
      ComponentKind::Cognitive, cognitive_inputs(82.0, 60.0, 58.0), profile, 30'000);
  CHECK(estimate.display_value == doctest::Approx(50.0));
  CHECK(estimate.raw_value == doctest::Approx(7.04));
  CHECK(estimate.source == EstimateSource::Sensed);
}

TEST_CASE("reference linear estimator equals the hand-computed squash") {
  const auto profile = reference_linear_profile();
  // constant 82 bpm / 60 ms / 58 dB windows: only the means are nonzero
  const auto estimate = estimate_component(
      ComponentKind::Cognitive, cognitive_inputs(82.0, 60.0, 58.0), profile, 30'000);
  const double pre = 0.04 * 82.0 - 0.02 * 60.0 + 0.02 * 58.0 - 3.26;
  const double expected = 100.0 / (1.0 + std::exp(-pre));
  CHECK(estimate.display_value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(estimate.raw_value ==
        doctest::Approx(expected * 14.08 / 100.0).epsilon(1e-12));
}

TEST_CASE("display values stay inside [0, 100] for wild inputs") {
  const auto profile = demo_network_profile(7);
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inputs = cognitive_inputs(rng.uniform_in(-1e6, 1e6),
                                         rng.uniform_in(-1e6, 1e6),
                                         rng.uniform_in(-1e6, 1e6));
    const auto estimate =
        estimate_component(ComponentKind::Cognitive, inputs, profile, 30'000);
    CHECK(estimate.display_value >= 0.0);
    CHECK(estimate.display_value <= 100.0);
  }
}

TEST_CASE("forward pass is deterministic") {
  const auto profile = demo_network_profile(21);
  const auto inputs = cognitive_inputs(91.5, 48.25, 63.125);
  const auto a = estimate_component(ComponentKind::Cognitive, inputs, profile, 30'000);
  const auto b = estimate_component(ComponentKind::Cognitive, inputs, profile, 30'000);
  CHECK(a.display_value == b.display_value);
  CHECK(a.raw_value == b.raw_value);
}

TEST_CASE("contextual features feed cognitive/physical/auditory only") {
  auto base = demo_network_profile(3);
  auto perturbed = base;
  perturbed.contextual = {0.7, 0.3, 0.5};

  const auto cog = cognitive_inputs(82.0, 60.0, 58.0);
  const std::vector<FeatureVector> speech = {
      fv(MetricKind::SpeechRate, 3.0), fv(MetricKind::VoiceIntensity, 55.0),
      fv(MetricKind::VoiceActivity, 0.4), fv(MetricKind::VoicePitch, 120.0)};
  const std::vector<FeatureVector> phys = {fv(MetricKind::HeartRate, 82.0),
                                           fv(MetricKind::RespirationRate, 14.0),
                                           fv(MetricKind::PostureMagnitude, 8.0)};
  const std::vector<FeatureVector> aud = {fv(MetricKind::NoiseLevel, 58.0)};

  CHECK(estimate_component(ComponentKind::Cognitive, cog, base, 0).display_value !=
        estimate_component(ComponentKind::Cognitive, cog, perturbed, 0).display_value);
  CHECK(estimate_component(ComponentKind::Physical, phys, base, 0).display_value !=
        estimate_component(ComponentKind::Physical, phys, perturbed, 0).display_value);
  CHECK(estimate_component(ComponentKind::Auditory, aud, base, 0).display_value !=
        estimate_component(ComponentKind::Auditory, aud, perturbed, 0).display_value);
  CHECK(estimate_component(ComponentKind::Speech, speech, base, 0).display_value ==
        estimate_component(ComponentKind::Speech, speech, perturbed, 0).display_value);
  CHECK(static_component_value(ComponentKind::Visual, base, 0).display_value ==
        static_component_value(ComponentKind::Visual, perturbed, 0).display_value);
}

TEST_CASE("static component values") {
  const auto profile = uniform_static_profile();
  const auto visual = static_component_value(ComponentKind::Visual, profile, 0);
  CHECK(visual.raw_value == doctest::Approx(7.04));
  CHECK(visual.display_value == doctest::Approx(50.0));
  CHECK(visual.source == EstimateSource::StaticModel);

  auto zero_mid = profile;
  zero_mid.component(ComponentKind::Speech).midpoint_raw = 0.0;
  CHECK(static_component_value(ComponentKind::Speech, zero_mid, 0).display_value ==
        doctest::Approx(0.0));
}

TEST_CASE("estimate_component rejects malformed calls") {
  const auto profile = reference_linear_profile();
  SUBCASE("wrong metric order") {
    std::vector<FeatureVector> swapped = {fv(MetricKind::Hrv, 60.0),
                                          fv(MetricKind::HeartRate, 82.0),
                                          fv(MetricKind::NoiseLevel, 58.0)};
    CHECK_THROWS_AS(
        estimate_component(ComponentKind::Cognitive, swapped, profile, 0), Error);
  }
  SUBCASE("missing estimator") {
    const auto statics = uniform_static_profile();
    CHECK_THROWS_AS(estimate_component(ComponentKind::Cognitive,
                                       cognitive_inputs(82, 60, 58), statics, 0),
                    Error);
  }
}

TEST_CASE("demo network profile is reproducible per seed") {
  const auto a = profile_to_json(demo_network_profile(11));
  const auto b = profile_to_json(demo_network_profile(11));
  const auto c = profile_to_json(demo_network_profile(12));
  CHECK(a == b);
  CHECK(a != c);
}
