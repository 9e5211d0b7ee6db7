#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "swarmload/errors.hpp"
#include "swarmload/rng.hpp"
#include "swarmload/subjective.hpp"

using namespace swarmload;

TEST_CASE("likert lookup reproduces the published normalization") {
  CHECK(normalize_likert(1) == doctest::Approx(1.0));
  CHECK(normalize_likert(2) == doctest::Approx(18.0));
  CHECK(normalize_likert(3) == doctest::Approx(34.0));
  CHECK(normalize_likert(4) == doctest::Approx(50.5));
  CHECK(normalize_likert(5) == doctest::Approx(67.0));
  CHECK(normalize_likert(6) == doctest::Approx(83.5));
  CHECK(normalize_likert(7) == doctest::Approx(100.0));
  CHECK_THROWS_AS(normalize_likert(0), Error);
  CHECK_THROWS_AS(normalize_likert(8), Error);
}

TEST_CASE("likert normalization is strictly increasing") {
  for (int rating = 1; rating < 7; ++rating) {
    CHECK(normalize_likert(rating) < normalize_likert(rating + 1));
  }
}

namespace {

WeightingScheme scheme_of(double visual, double cognitive, double speech,
                          double auditory, double physical) {
  WeightingScheme scheme;
  scheme.weight(ComponentKind::Visual) = visual;
  scheme.weight(ComponentKind::Cognitive) = cognitive;
  scheme.weight(ComponentKind::Speech) = speech;
  scheme.weight(ComponentKind::Auditory) = auditory;
  scheme.weight(ComponentKind::Physical) = physical;
  return scheme;
}

std::array<double, 5> means_of(double cognitive, double speech, double auditory,
                               double visual, double physical) {
  std::array<double, 5> means{};
  means[static_cast<std::size_t>(ComponentKind::Cognitive)] = cognitive;
  means[static_cast<std::size_t>(ComponentKind::Speech)] = speech;
  means[static_cast<std::size_t>(ComponentKind::Auditory)] = auditory;
  means[static_cast<std::size_t>(ComponentKind::Visual)] = visual;
  means[static_cast<std::size_t>(ComponentKind::Physical)] = physical;
  return means;
}

}  // namespace

TEST_CASE("weighted subjective overall") {
  SUBCASE("equal means collapse to that value under any valid scheme") {
    const auto means = means_of(50.5, 50.5, 50.5, 50.5, 50.5);
    CHECK(weighted_subjective_overall(means, scheme_of(35, 25, 20, 15, 5)) ==
          doctest::Approx(50.5));
    CHECK(weighted_subjective_overall(means, scheme_of(20, 20, 20, 20, 20)) ==
          doctest::Approx(50.5));
  }
  SUBCASE("first-commander weighting worked example") {
    // visual 35 / cognitive 25 / speech 20 / auditory 15 / physical 5
    const auto means = means_of(27.6, 21.2, 18.0, 37.4, 24.2);
    const double overall =
        weighted_subjective_overall(means, scheme_of(35, 25, 20, 15, 5));
    CHECK(overall == doctest::Approx(28.14).epsilon(1e-9));
  }
  SUBCASE("degenerate scheme returns the single weighted mean") {
    const auto means = means_of(10, 20, 30, 40, 50);
    CHECK(weighted_subjective_overall(means, scheme_of(100, 0, 0, 0, 0)) ==
          doctest::Approx(40.0));
  }
  SUBCASE("weights must total 100") {
    CHECK_THROWS_AS(
        weighted_subjective_overall(means_of(1, 1, 1, 1, 1), scheme_of(30, 30, 30, 5, 4)),
        Error);
  }
  SUBCASE("bounded by the extreme means and permutation-consistent") {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
      std::array<double, 5> means{};
      for (auto& mean : means) mean = rng.uniform_in(1.0, 100.0);
      std::array<double, 5> weights{};
      double total = 0.0;
      for (auto& weight : weights) {
        weight = rng.uniform_in(0.0, 10.0);
        total += weight;
      }
      WeightingScheme scheme;
      for (std::size_t i = 0; i < 5; ++i) scheme.weights[i] = weights[i] * 100.0 / total;
      // fix rounding drift exactly
      const double drift =
          100.0 - (scheme.weights[0] + scheme.weights[1] + scheme.weights[2] +
                   scheme.weights[3] + scheme.weights[4]);
      scheme.weights[0] += drift;

      const double overall = weighted_subjective_overall(means, scheme);
      CHECK(overall >= *std::min_element(means.begin(), means.end()) - 1e-9);
      CHECK(overall <= *std::max_element(means.begin(), means.end()) + 1e-9);

      // permuting matched (weight, mean) pairs changes nothing
      std::array<double, 5> permuted_means = means;
      WeightingScheme permuted_scheme = scheme;
      std::swap(permuted_means[0], permuted_means[3]);
      std::swap(permuted_scheme.weights[0], permuted_scheme.weights[3]);
      CHECK(weighted_subjective_overall(permuted_means, permuted_scheme) ==
            doctest::Approx(overall).epsilon(1e-12));
    }
  }
}

namespace {

std::vector<OverallEstimate> constant_estimates(double value, Timestamp from,
                                                Timestamp to) {
  std::vector<OverallEstimate> estimates;
  for (Timestamp t = from; t <= to; t += kOverallStepMs) {
    OverallEstimate estimate;
    estimate.t = t;
    estimate.value = value;
    estimate.state = classify(value);
    estimates.push_back(estimate);
  }
  return estimates;
}

}  // namespace

TEST_CASE("probe alignment over the estimates in its minute") {
  SUBCASE("a full minute holds twelve estimates") {
    const auto estimates = constant_estimates(50.0, 30'000, 600'000);
    const auto alignment = align_probe_with_estimates(125'000, estimates);
    CHECK(alignment.count == 12);
    CHECK(alignment.mean == doctest::Approx(50.0));
    CHECK(alignment.sd == doctest::Approx(0.0));
  }
  SUBCASE("a truncated final minute keeps its partial count") {
    const auto estimates = constant_estimates(50.0, 30'000, 90'000);  // ends mid-minute
    const auto alignment = align_probe_with_estimates(61'000, estimates);
    CHECK(alignment.count == 7);  // 60, 65, ..., 90 s
  }
  SUBCASE("random minutes match a brute-force filter") {
    Rng rng(55);
    std::vector<OverallEstimate> estimates;
    for (Timestamp t = 30'000; t <= 1'800'000; t += kOverallStepMs) {
      OverallEstimate estimate;
      estimate.t = t;
      if (rng.uniform() < 0.05) {
        estimate.state = WorkloadState::NoData;
      } else {
        estimate.value = rng.uniform_in(20.0, 80.0);
        estimate.state = classify(*estimate.value);
      }
      estimates.push_back(estimate);
    }
    for (int trial = 0; trial < 50; ++trial) {
      const Timestamp probe_t = rng.uniform_int(30'000, 1'800'000);
      double sum = 0.0, sq = 0.0;
      std::size_t count = 0;
      for (const auto& estimate : estimates) {
        if (!estimate.usable()) continue;
        if (minute_bin(estimate.t) != minute_bin(probe_t)) continue;
        sum += *estimate.value;
        sq += *estimate.value * *estimate.value;
        ++count;
      }
      if (count == 0) {
        CHECK_THROWS_AS(align_probe_with_estimates(probe_t, estimates), Error);
        continue;
      }
      const auto alignment = align_probe_with_estimates(probe_t, estimates);
      CHECK(alignment.count == count);
      CHECK(alignment.mean == doctest::Approx(sum / count).epsilon(1e-12));
      const double variance = sq / count - (sum / count) * (sum / count);
      CHECK(alignment.sd ==
            doctest::Approx(std::sqrt(std::max(0.0, variance))).epsilon(1e-9));
    }
  }
  SUBCASE("empty minutes raise EmptyAlignment") {
    const auto estimates = constant_estimates(50.0, 30'000, 60'000);
    CHECK_THROWS_AS(align_probe_with_estimates(600'000, estimates), Error);
  }
}

TEST_CASE("probe csv parsing") {
  std::istringstream in(
      "t_ms,dimension,rating\n"
      "600000,cognitive,4\n"
      "600000,stress,6\n"
      "600001,overall,2\n"
      "700000,bogus,3\n"
      "700000,speech,9\n");
  const auto result = parse_probe_csv(in);
  REQUIRE(result.probes.size() == 3);
  CHECK(result.probes[0].dimension == ProbeDimension::Cognitive);
  CHECK(result.probes[0].rating == 4);
  CHECK(result.probes[1].dimension == ProbeDimension::Stress);
  CHECK(result.probes[2].dimension == ProbeDimension::Overall);
  CHECK(result.errors.size() == 2);

  std::istringstream bad("time,dim,rating\n");
  CHECK_THROWS_AS(parse_probe_csv(bad), Error);
}
