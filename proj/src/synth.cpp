#include "swarmload/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "swarmload/errors.hpp"
#include "swarmload/rng.hpp"

namespace swarmload {

using nlohmann::ordered_json;

const MetricResponse& PhysioProfile::response(MetricKind metric) const {
  switch (metric) {
    case MetricKind::HeartRate: return heart_rate;
    case MetricKind::Hrv: return hrv;
    case MetricKind::RespirationRate: return respiration_rate;
    case MetricKind::PostureMagnitude: return posture_magnitude;
    case MetricKind::NoiseLevel: return noise_level;
    case MetricKind::SpeechRate: return speech_rate;
    case MetricKind::VoiceIntensity: return voice_intensity;
    case MetricKind::VoicePitch: return voice_pitch;
    case MetricKind::VoiceActivity: return speech_rate;  // activity has no response of its own
  }
  return heart_rate;
}

PhysioProfile default_physio_profile() { return PhysioProfile{}; }

namespace {

MetricResponse parse_response(const ordered_json& doc, const MetricResponse& fallback) {
  MetricResponse response = fallback;
  response.baseline = doc.value("baseline", fallback.baseline);
  response.gain = doc.value("gain", fallback.gain);
  response.noise_sd = doc.value("noise_sd", fallback.noise_sd);
  response.lag_s = doc.value("lag_s", fallback.lag_s);
  if (doc.contains("plausible")) {
    const auto& range = doc.at("plausible");
    response.plausible_lo = range.at(0).get<double>();
    response.plausible_hi = range.at(1).get<double>();
  }
  if (response.noise_sd < 0.0) {
    throw Error(Errc::FormatError, "physio profile: noise_sd must be >= 0");
  }
  if (response.baseline < response.plausible_lo ||
      response.baseline > response.plausible_hi) {
    throw Error(Errc::FormatError, "physio profile: baseline outside the plausible range");
  }
  return response;
}

ordered_json response_to_json(const MetricResponse& response) {
  return {{"baseline", response.baseline},
          {"gain", response.gain},
          {"noise_sd", response.noise_sd},
          {"lag_s", response.lag_s},
          {"plausible", {response.plausible_lo, response.plausible_hi}}};
}

}  // namespace

PhysioProfile load_physio_profile(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(Errc::FormatError, std::string("physio profile: bad json: ") + e.what());
  }
  PhysioProfile profile;
  const auto read = [&](const char* name, MetricResponse& target) {
    if (doc.contains(name)) target = parse_response(doc.at(name), target);
  };
  read("heart_rate", profile.heart_rate);
  read("hrv", profile.hrv);
  read("respiration_rate", profile.respiration_rate);
  read("posture_magnitude", profile.posture_magnitude);
  read("noise_level", profile.noise_level);
  read("speech_rate", profile.speech_rate);
  read("voice_intensity", profile.voice_intensity);
  read("voice_pitch", profile.voice_pitch);
  if (doc.contains("bouts")) {
    const auto& bouts = doc.at("bouts");
    profile.bouts.base_rate_per_min =
        bouts.value("base_rate_per_min", profile.bouts.base_rate_per_min);
    profile.bouts.demand_rate_per_min =
        bouts.value("demand_rate_per_min", profile.bouts.demand_rate_per_min);
    profile.bouts.min_len_s = bouts.value("min_len_s", profile.bouts.min_len_s);
    profile.bouts.max_len_s = bouts.value("max_len_s", profile.bouts.max_len_s);
    if (profile.bouts.min_len_s < 1 || profile.bouts.max_len_s < profile.bouts.min_len_s) {
      throw Error(Errc::FormatError, "physio profile: bad bout length bounds");
    }
  }
  profile.noise_floor_db = doc.value("noise_floor_db", profile.noise_floor_db);
  profile.confound_bias = doc.value("confound_bias", profile.confound_bias);
  return profile;
}

PhysioProfile load_physio_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open physio profile: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_physio_profile(buffer.str());
}

std::string physio_profile_to_json(const PhysioProfile& profile) {
  ordered_json doc;
  doc["heart_rate"] = response_to_json(profile.heart_rate);
  doc["hrv"] = response_to_json(profile.hrv);
  doc["respiration_rate"] = response_to_json(profile.respiration_rate);
  doc["posture_magnitude"] = response_to_json(profile.posture_magnitude);
  doc["noise_level"] = response_to_json(profile.noise_level);
  doc["speech_rate"] = response_to_json(profile.speech_rate);
  doc["voice_intensity"] = response_to_json(profile.voice_intensity);
  doc["voice_pitch"] = response_to_json(profile.voice_pitch);
  doc["bouts"] = {{"base_rate_per_min", profile.bouts.base_rate_per_min},
                  {"demand_rate_per_min", profile.bouts.demand_rate_per_min},
                  {"min_len_s", profile.bouts.min_len_s},
                  {"max_len_s", profile.bouts.max_len_s}};
  doc["noise_floor_db"] = profile.noise_floor_db;
  doc["confound_bias"] = profile.confound_bias;
  return doc.dump(2);
}

std::vector<ChannelSeries> synthesize(std::span<const double> demand,
                                      const PhysioProfile& profile,
                                      std::uint64_t seed) {
  for (const double d : demand) {
    if (!(d >= 0.0 && d <= 1.0)) {
      throw Error(Errc::ContractViolation, "synthesize: demand must lie in [0, 1]");
    }
  }

  const std::size_t n = demand.size();
  const auto lagged = [&](std::size_t t, int lag) {
    return lag >= 0 && t >= static_cast<std::size_t>(lag) ? demand[t - lag] : demand[0];
  };

  // One independent stream per metric keeps each channel's draw sequence
  // stable when other profile entries change.
  const auto metric_rng = [&](MetricKind metric) {
    return Rng(mix64(seed ^ (0x5939aULL + static_cast<std::uint64_t>(metric))));
  };

  // speaking bouts: a talk-pressure accumulator fed by the demand-scaled
  // rate starts a bout each time it fills; lengths are drawn uniformly
  std::vector<bool> speaking(n, false);
  {
    Rng rng = metric_rng(MetricKind::VoiceActivity);
    double pressure = rng.uniform();  // seeded phase
    std::size_t t = 0;
    while (t < n) {
      pressure += (profile.bouts.base_rate_per_min +
                   profile.bouts.demand_rate_per_min * demand[t]) /
                  60.0;
      if (pressure >= 1.0) {
        pressure -= 1.0;
        const auto len = static_cast<std::size_t>(
            rng.uniform_int(profile.bouts.min_len_s, profile.bouts.max_len_s));
        for (std::size_t i = t; i < std::min(n, t + len); ++i) speaking[i] = true;
        t += len;
      } else {
        ++t;
      }
    }
  }

  std::vector<ChannelSeries> channels;
  channels.reserve(kAllMetrics.size());
  for (const auto metric : kAllMetrics) {
    ChannelSeries series;
    series.metric = metric;
    series.samples.reserve(n);
    Rng rng = metric_rng(metric);
    const auto& response = profile.response(metric);
    const bool speech_only = metric == MetricKind::SpeechRate ||
                             metric == MetricKind::VoiceIntensity ||
                             metric == MetricKind::VoicePitch ||
                             metric == MetricKind::VoiceActivity;
    for (std::size_t t = 0; t < n; ++t) {
      double value = 0.0;
      if (metric == MetricKind::VoiceActivity) {
        value = speaking[t] ? 1.0 : 0.0;
      } else if (speech_only && !speaking[t]) {
        value = 0.0;
      } else {
        value = response.baseline + response.gain * lagged(t, response.lag_s);
        if (response.noise_sd > 0.0) value += rng.normal(0.0, response.noise_sd);
        if (metric == MetricKind::NoiseLevel) {
          value = std::max(value, profile.noise_floor_db);
        }
        if (profile.confound_bias != 0.0 &&
            (metric == MetricKind::HeartRate || metric == MetricKind::RespirationRate)) {
          value += profile.confound_bias;
        }
      }
      series.samples.push_back(
          {static_cast<Timestamp>(t) * 1000, metric, value, true});
    }
    channels.push_back(std::move(series));
  }
  return channels;
}

std::vector<ChannelSeries> inject_faults(std::vector<ChannelSeries> channels,
                                         std::span<const FaultSpec> faults,
                                         [[maybe_unused]] std::uint64_t seed) {
  // every current fault mode is deterministic; the seed stays in the
  // signature for future stochastic modes
  for (std::size_t i = 0; i < faults.size(); ++i) {
    if (faults[i].end <= faults[i].start) {
      throw Error(Errc::FormatError, "fault spec: end must exceed start");
    }
    for (std::size_t j = i + 1; j < faults.size(); ++j) {
      if (faults[i].metric == faults[j].metric &&
          faults[i].start < faults[j].end && faults[j].start < faults[i].end) {
        throw Error(Errc::FormatError,
                    "fault spec: overlapping faults on " +
                        std::string(to_string(faults[i].metric)));
      }
    }
  }

  for (const auto& fault : faults) {
    for (auto& channel : channels) {
      if (channel.metric != fault.metric) continue;
      const auto in_window = [&](const SensorSample& s) {
        return s.t >= fault.start && s.t < fault.end;
      };
      switch (fault.mode) {
        case FaultMode::InvalidFlag:
          for (auto& sample : channel.samples) {
            if (in_window(sample)) sample.valid = false;
          }
          break;
        case FaultMode::StuckValue: {
          std::optional<double> held;
          for (auto& sample : channel.samples) {
            if (!in_window(sample)) continue;
            if (!held) held = sample.value;
            sample.value = *held;
          }
          break;
        }
        case FaultMode::DropSamples:
          channel.samples.erase(
              std::remove_if(channel.samples.begin(), channel.samples.end(), in_window),
              channel.samples.end());
          break;
      }
    }
  }
  return channels;
}

}  // namespace swarmload
