#include "swarmload/profile.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "swarmload/errors.hpp"
#include "swarmload/rng.hpp"

namespace swarmload {

using nlohmann::ordered_json;

std::size_t feature_input_dim(ComponentKind kind) {
  return kFeaturesPerMetric * metrics_for_component(kind).size();
}

std::size_t estimator_input_dim(ComponentKind kind) {
  const bool takes_contextual = kind == ComponentKind::Cognitive ||
                                kind == ComponentKind::Physical ||
                                kind == ComponentKind::Auditory;
  return feature_input_dim(kind) + (takes_contextual ? kContextualFeatureCount : 0);
}

std::string_view to_string(EstimateSource source) {
  switch (source) {
    case EstimateSource::Sensed: return "sensed";
    case EstimateSource::StaticModel: return "static_model";
    case EstimateSource::Imputed: return "imputed";
  }
  return "?";
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw Error(Errc::ProfileInvalid, "profile: " + message);
}

Estimator parse_estimator(const ordered_json& doc, ComponentKind kind) {
  const std::string type = doc.value("type", "");
  const std::size_t want = estimator_input_dim(kind);
  if (type == "linear") {
    LinearWeights linear;
    linear.weights = doc.at("weights").get<std::vector<double>>();
    linear.bias = doc.value("bias", 0.0);
    if (linear.weights.size() != want) {
      invalid(std::string(to_string(kind)) + " linear estimator has input dim " +
              std::to_string(linear.weights.size()) + ", requires " + std::to_string(want) +
              " (" + std::to_string(feature_input_dim(kind)) + " metric features" +
              (want != feature_input_dim(kind) ? " + 3 contextual)" : ")"));
    }
    return linear;
  }
  if (type == "network") {
    NetworkWeights net;
    net.layers = doc.at("layers").get<std::vector<std::size_t>>();
    net.weights = doc.at("weights").get<std::vector<std::vector<double>>>();
    net.biases = doc.at("biases").get<std::vector<std::vector<double>>>();
    const std::string activation = doc.value("activation", "tanh");
    if (activation == "tanh") {
      net.activation = Activation::Tanh;
    } else if (activation == "rectifier") {
      net.activation = Activation::Rectifier;
    } else {
      invalid("unknown activation '" + activation + "'");
    }
    if (net.layers.size() < 2) invalid("network needs at least input and output layers");
    if (net.layers.front() != want) {
      invalid(std::string(to_string(kind)) + " network has input dim " +
              std::to_string(net.layers.front()) + ", requires " + std::to_string(want));
    }
    if (net.layers.back() != 1) invalid("network output layer must have width 1");
    if (net.weights.size() != net.layers.size() - 1 || net.biases.size() != net.weights.size()) {
      invalid("network needs one weight matrix and bias vector per layer transition");
    }
    for (std::size_t i = 0; i + 1 < net.layers.size(); ++i) {
      if (net.weights[i].size() != net.layers[i] * net.layers[i + 1]) {
        invalid("weight matrix " + std::to_string(i) + " size mismatch");
      }
      if (net.biases[i].size() != net.layers[i + 1]) {
        invalid("bias vector " + std::to_string(i) + " size mismatch");
      }
    }
    return net;
  }
  invalid("unknown estimator type '" + type + "'");
}

void validate(const ModelProfile& profile) {
  double ceiling_sum = 0.0;
  for (const auto kind : kAllComponents) {
    const auto& model = profile.component(kind);
    if (!(model.max_raw > 0.0)) invalid(std::string(to_string(kind)) + " max_raw must be > 0");
    if (model.midpoint_raw < 0.0 || model.midpoint_raw > model.max_raw) {
      invalid(std::string(to_string(kind)) + " midpoint_raw outside [0, max_raw]");
    }
    ceiling_sum += model.max_raw;
  }
  if (std::abs(ceiling_sum - profile.max_overall) > 1e-6) {
    invalid("component max_raw values sum to " + std::to_string(ceiling_sum) +
            ", must equal max_overall_workload " + std::to_string(profile.max_overall));
  }
}

ordered_json estimator_to_json(const Estimator& estimator) {
  ordered_json doc;
  if (const auto* linear = std::get_if<LinearWeights>(&estimator)) {
    doc["type"] = "linear";
    doc["weights"] = linear->weights;
    doc["bias"] = linear->bias;
  } else if (const auto* net = std::get_if<NetworkWeights>(&estimator)) {
    doc["type"] = "network";
    doc["layers"] = net->layers;
    doc["weights"] = net->weights;
    doc["biases"] = net->biases;
    doc["activation"] = net->activation == Activation::Tanh ? "tanh" : "rectifier";
  }
  return doc;
}

}  // namespace

ModelProfile load_profile(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    invalid(std::string("bad json: ") + e.what());
  }
  try {
    ModelProfile profile;
    profile.max_overall = doc.value("max_overall_workload", kDefaultMaxOverallWorkload);
    if (doc.contains("contextual_features")) {
      const auto& ctx = doc.at("contextual_features");
      profile.contextual.cognitive = ctx.value("cognitive", 0.0);
      profile.contextual.physical = ctx.value("physical", 0.0);
      profile.contextual.auditory = ctx.value("auditory", 0.0);
    }
    const auto& components = doc.at("components");
    for (const auto kind : kAllComponents) {
      const std::string name(to_string(kind));
      if (!components.contains(name)) invalid("missing component '" + name + "'");
      const auto& entry = components.at(name);
      auto& model = profile.component(kind);
      model.max_raw = entry.at("max_raw").get<double>();
      model.midpoint_raw = entry.at("midpoint_raw").get<double>();
      if (entry.contains("estimator")) {
        if (kind == ComponentKind::Visual) invalid("visual takes no estimator");
        model.estimator = parse_estimator(entry.at("estimator"), kind);
      }
    }
    validate(profile);
    return profile;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    invalid(std::string("bad document: ") + e.what());
  }
}

ModelProfile load_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open profile: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_profile(buffer.str());
}

std::string profile_to_json(const ModelProfile& profile) {
  ordered_json doc;
  doc["max_overall_workload"] = profile.max_overall;
  doc["contextual_features"] = {{"cognitive", profile.contextual.cognitive},
                                {"physical", profile.contextual.physical},
                                {"auditory", profile.contextual.auditory}};
  ordered_json components;
  for (const auto kind : kAllComponents) {
    const auto& model = profile.component(kind);
    ordered_json entry;
    entry["max_raw"] = model.max_raw;
    entry["midpoint_raw"] = model.midpoint_raw;
    if (!std::holds_alternative<std::monostate>(model.estimator)) {
      entry["estimator"] = estimator_to_json(model.estimator);
    }
    components[std::string(to_string(kind))] = std::move(entry);
  }
  doc["components"] = std::move(components);
  return doc.dump(2);
}

ModelProfile uniform_static_profile(double max_overall) {
  ModelProfile profile;
  profile.max_overall = max_overall;
  const double share = max_overall / static_cast<double>(kAllComponents.size());
  for (const auto kind : kAllComponents) {
    profile.component(kind) = ComponentModel{share, share / 2.0, std::monostate{}};
  }
  return profile;
}

namespace {

// Reference linear coefficients. Weights act on [mean, variance, gradient,
// slope] per feeding metric, in metrics_for_component() order, then the
// three contextual features where applicable. Centered so typical resting
// inputs land below the logistic midpoint and elevated inputs above it.
LinearWeights reference_linear(ComponentKind kind) {
  LinearWeights linear;
  linear.weights.assign(estimator_input_dim(kind), 0.0);
  switch (kind) {
    case ComponentKind::Cognitive:
      linear.weights[0] = 0.04;    // heart-rate mean (bpm)
      linear.weights[4] = -0.02;   // HRV mean (ms), inverse response
      linear.weights[8] = 0.02;    // noise-level mean (dB)
      linear.weights[12] = 0.01;   // contextual: cognitive composition
      linear.bias = -3.26;
      break;
    case ComponentKind::Physical:
      linear.weights[0] = 0.03;    // heart-rate mean (bpm)
      linear.weights[4] = 0.10;    // respiration-rate mean (breaths/min)
      linear.weights[8] = 0.05;    // posture-magnitude mean (degrees)
      linear.weights[13] = 0.01;   // contextual: physical composition
      linear.bias = -4.70;
      break;
    case ComponentKind::Auditory:
      linear.weights[0] = 0.15;    // noise-level mean (dB)
      linear.weights[6] = 0.01;    // contextual: auditory composition
      linear.bias = -9.00;
      break;
    case ComponentKind::Speech:
      linear.weights[0] = 0.30;    // speech-rate mean (syllables/s)
      linear.weights[4] = 0.012;   // voice-intensity mean (dB)
      linear.weights[8] = 2.00;    // voice-activity mean (speaking fraction)
      linear.weights[12] = 0.004;  // voice-pitch mean (Hz)
      linear.bias = -1.40;
      break;
    case ComponentKind::Visual:
      break;
  }
  return linear;
}

}  // namespace

ModelProfile reference_linear_profile() {
  ModelProfile profile = uniform_static_profile();
  for (const auto kind : kAllComponents) {
    if (kind == ComponentKind::Visual) continue;
    profile.component(kind).estimator = reference_linear(kind);
  }
  return profile;
}

ModelProfile demo_network_profile(std::uint64_t seed) {
  ModelProfile profile = uniform_static_profile();
  Rng rng(seed);
  for (const auto kind : kAllComponents) {
    if (kind == ComponentKind::Visual) continue;
    NetworkWeights net;
    const std::size_t input = estimator_input_dim(kind);
    net.layers = {input, 6, 1};
    net.activation = Activation::Tanh;
    for (std::size_t i = 0; i + 1 < net.layers.size(); ++i) {
      const std::size_t fan_in = net.layers[i];
      const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
      std::vector<double> weights(net.layers[i] * net.layers[i + 1]);
      for (auto& w : weights) w = rng.uniform_in(-scale, scale);
      std::vector<double> biases(net.layers[i + 1]);
      for (auto& b : biases) b = rng.uniform_in(-0.1, 0.1);
      net.weights.push_back(std::move(weights));
      net.biases.push_back(std::move(biases));
    }
    profile.component(kind).estimator = std::move(net);
  }
  return profile;
}

namespace {

double forward_network(const NetworkWeights& net, std::vector<double> input) {
  std::vector<double> next;
  for (std::size_t layer = 0; layer + 1 < net.layers.size(); ++layer) {
    const std::size_t in_width = net.layers[layer];
    const std::size_t out_width = net.layers[layer + 1];
    next.assign(out_width, 0.0);
    for (std::size_t row = 0; row < out_width; ++row) {
      double acc = net.biases[layer][row];
      const double* weights = net.weights[layer].data() + row * in_width;
      for (std::size_t col = 0; col < in_width; ++col) acc += weights[col] * input[col];
      next[row] = acc;
    }
    const bool is_output = layer + 2 == net.layers.size();
    if (!is_output) {
      for (auto& v : next) {
        v = net.activation == Activation::Tanh ? std::tanh(v) : std::max(0.0, v);
      }
    }
    input = next;
  }
  return input[0];
}

}  // namespace

ComponentEstimate estimate_component(ComponentKind kind,
                                     std::span<const FeatureVector> features,
                                     const ModelProfile& profile, Timestamp t) {
  const auto& metrics = metrics_for_component(kind);
  if (features.size() != metrics.size()) {
    throw Error(Errc::ContractViolation,
                "estimate_component: expected " + std::to_string(metrics.size()) +
                    " feature vectors for " + std::string(to_string(kind)));
  }
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (features[i].metric != metrics[i]) {
      throw Error(Errc::ContractViolation,
                  "estimate_component: feature vectors out of order for " +
                      std::string(to_string(kind)));
    }
  }
  const auto& model = profile.component(kind);
  if (std::holds_alternative<std::monostate>(model.estimator)) {
    throw Error(Errc::MissingInput,
                "no estimator loaded for " + std::string(to_string(kind)));
  }

  std::vector<double> input;
  input.reserve(estimator_input_dim(kind));
  for (const auto& fv : features) {
    input.push_back(fv.mean);
    input.push_back(fv.variance);
    input.push_back(fv.avg_gradient);
    input.push_back(fv.slope);
  }
  if (estimator_input_dim(kind) != feature_input_dim(kind)) {
    input.push_back(profile.contextual.cognitive);
    input.push_back(profile.contextual.physical);
    input.push_back(profile.contextual.auditory);
  }

  double pre_squash = 0.0;
  if (const auto* linear = std::get_if<LinearWeights>(&model.estimator)) {
    pre_squash = linear->bias;
    for (std::size_t i = 0; i < input.size(); ++i) pre_squash += linear->weights[i] * input[i];
  } else {
    pre_squash = forward_network(std::get<NetworkWeights>(model.estimator), std::move(input));
  }

  ComponentEstimate estimate;
  estimate.kind = kind;
  estimate.t = t;
  estimate.display_value = 100.0 * logistic(pre_squash);
  estimate.raw_value = estimate.display_value * model.max_raw / 100.0;
  estimate.source = EstimateSource::Sensed;
  return estimate;
}

ComponentEstimate static_component_value(ComponentKind kind,
                                         const ModelProfile& profile,
                                         Timestamp t) {
  const auto& model = profile.component(kind);
  ComponentEstimate estimate;
  estimate.kind = kind;
  estimate.t = t;
  estimate.raw_value = model.midpoint_raw;
  estimate.display_value = 100.0 * model.midpoint_raw / model.max_raw;
  estimate.source = EstimateSource::StaticModel;
  return estimate;
}

}  // namespace swarmload
