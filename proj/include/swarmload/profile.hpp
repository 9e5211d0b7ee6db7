// Model profiles and component estimators. A profile carries each workload
// component's raw-scale ceiling and midpoint plus an optional loadable
// estimator (small feedforward network or a single linear stage); the five
// ceilings sum to the overall raw maximum that drives normalization.
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "swarmload/features.hpp"
#include "swarmload/types.hpp"

namespace swarmload {

constexpr double kDefaultMaxOverallWorkload = 70.4;
constexpr std::size_t kFeaturesPerMetric = 4;  // mean, variance, gradient, slope
constexpr std::size_t kContextualFeatureCount = 3;

enum class Activation { Tanh, Rectifier };

/// Fully-connected feedforward weights. `layers` lists the width of every
/// layer including input and the single output; `weights[i]` is row-major
/// (layers[i+1] x layers[i]). The output is squashed by a logistic.
struct NetworkWeights {
  std::vector<std::size_t> layers;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  Activation activation = Activation::Tanh;
};

/// Single affine stage followed by the logistic squash; the documented
/// reference estimator form used by the test fixtures.
struct LinearWeights {
  std::vector<double> weights;
  double bias = 0.0;
};

/// monostate = no estimator; the component can only take its static value.
using Estimator = std::variant<std::monostate, LinearWeights, NetworkWeights>;

struct ComponentModel {
  double max_raw = 0.0;
  double midpoint_raw = 0.0;
  Estimator estimator;
};

/// Task-composition inputs for the cognitive/physical/auditory estimators.
/// Zero in an unfamiliar environment.
struct ContextualFeatures {
  double cognitive = 0.0;
  double physical = 0.0;
  double auditory = 0.0;
};

struct ModelProfile {
  double max_overall = kDefaultMaxOverallWorkload;
  ContextualFeatures contextual;
  std::array<ComponentModel, kAllComponents.size()> components;

  const ComponentModel& component(ComponentKind kind) const {
    return components[static_cast<std::size_t>(kind)];
  }
  ComponentModel& component(ComponentKind kind) {
    return components[static_cast<std::size_t>(kind)];
  }
};

/// Number of metric-derived features feeding a component's estimator
/// (4 per metric): cognitive 12, physical 12, auditory 4, speech 16.
std::size_t feature_input_dim(ComponentKind kind);

/// Full estimator input width: the metric features plus the three appended
/// contextual features for cognitive/physical/auditory.
std::size_t estimator_input_dim(ComponentKind kind);

/// Parse and validate a profile document. Throws Error(ProfileInvalid) when
/// the component ceilings do not sum to the overall maximum, a midpoint
/// falls outside [0, max_raw], or estimator dimensions disagree.
ModelProfile load_profile(const std::string& json_text);
ModelProfile load_profile_file(const std::string& path);
std::string profile_to_json(const ModelProfile& profile);

/// Uniform split of the overall maximum across the five components, static
/// values only (no estimators loaded).
ModelProfile uniform_static_profile(double max_overall = kDefaultMaxOverallWorkload);

/// Uniform-split profile with the documented reference linear estimator per
/// sensed component; monotone in each feeding metric's window mean.
ModelProfile reference_linear_profile();

/// Uniform-split profile with seeded random tanh networks per sensed
/// component; exercises the network code path, not trained on anything.
ModelProfile demo_network_profile(std::uint64_t seed);

enum class EstimateSource { Sensed, StaticModel, Imputed };
std::string_view to_string(EstimateSource source);

struct ComponentEstimate {
  ComponentKind kind = ComponentKind::Cognitive;
  Timestamp t = 0;
  double display_value = 0.0;  ///< 0..100 scale
  double raw_value = 0.0;      ///< display_value x max_raw / 100
  EstimateSource source = EstimateSource::Sensed;
};

double logistic(double x);

/// Run one component's estimator over its feeding metrics' feature vectors,
/// which must be supplied in metrics_for_component() order for the same
/// timestamp. Throws Error(MissingInput) when the profile has no estimator
/// for the component and Error(ContractViolation) on malformed inputs.
ComponentEstimate estimate_component(ComponentKind kind,
                                     std::span<const FeatureVector> features,
                                     const ModelProfile& profile, Timestamp t);

/// The static model value (midpoint) for a component; always used for
/// Visual and for any component whose channels are absent in a shift.
ComponentEstimate static_component_value(ComponentKind kind,
                                         const ModelProfile& profile,
                                         Timestamp t);

}  // namespace swarmload
