#include "swarmload/types.hpp"

#include <cctype>

namespace swarmload {

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Cognitive: return "cognitive";
    case ComponentKind::Speech: return "speech";
    case ComponentKind::Auditory: return "auditory";
    case ComponentKind::Visual: return "visual";
    case ComponentKind::Physical: return "physical";
  }
  return "?";
}

std::string_view to_string(WorkloadState state) {
  switch (state) {
    case WorkloadState::Underload: return "underload";
    case WorkloadState::NormalLoad: return "normal_load";
    case WorkloadState::Overload: return "overload";
    case WorkloadState::NoData: return "no_data";
  }
  return "?";
}

std::string_view to_string(MetricKind metric) {
  switch (metric) {
    case MetricKind::HeartRate: return "heart_rate";
    case MetricKind::Hrv: return "hrv";
    case MetricKind::RespirationRate: return "respiration_rate";
    case MetricKind::PostureMagnitude: return "posture_magnitude";
    case MetricKind::SpeechRate: return "speech_rate";
    case MetricKind::VoiceIntensity: return "voice_intensity";
    case MetricKind::VoiceActivity: return "voice_activity";
    case MetricKind::VoicePitch: return "voice_pitch";
    case MetricKind::NoiseLevel: return "noise_level";
  }
  return "?";
}

std::optional<ComponentKind> component_from_string(std::string_view name) {
  for (const auto kind : kAllComponents) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::optional<WorkloadState> state_from_string(std::string_view name) {
  for (const auto state : {WorkloadState::Underload, WorkloadState::NormalLoad,
                           WorkloadState::Overload, WorkloadState::NoData}) {
    if (to_string(state) == name) return state;
  }
  return std::nullopt;
}

std::optional<MetricKind> metric_from_string(std::string_view name) {
  for (const auto metric : kAllMetrics) {
    if (to_string(metric) == name) return metric;
  }
  return std::nullopt;
}

const std::vector<ComponentKind>& components_for_metric(MetricKind metric) {
  using C = ComponentKind;
  static const std::vector<C> cog_phys = {C::Cognitive, C::Physical};
  static const std::vector<C> cog = {C::Cognitive};
  static const std::vector<C> phys = {C::Physical};
  static const std::vector<C> speech = {C::Speech};
  static const std::vector<C> cog_aud = {C::Cognitive, C::Auditory};
  switch (metric) {
    case MetricKind::HeartRate: return cog_phys;
    case MetricKind::Hrv: return cog;
    case MetricKind::RespirationRate: return phys;
    case MetricKind::PostureMagnitude: return phys;
    case MetricKind::SpeechRate:
    case MetricKind::VoiceIntensity:
    case MetricKind::VoiceActivity:
    case MetricKind::VoicePitch: return speech;
    case MetricKind::NoiseLevel: return cog_aud;
  }
  static const std::vector<C> none;
  return none;
}

const std::vector<MetricKind>& metrics_for_component(ComponentKind kind) {
  using M = MetricKind;
  static const std::vector<M> cognitive = {M::HeartRate, M::Hrv, M::NoiseLevel};
  static const std::vector<M> speech = {M::SpeechRate, M::VoiceIntensity,
                                        M::VoiceActivity, M::VoicePitch};
  static const std::vector<M> auditory = {M::NoiseLevel};
  static const std::vector<M> visual;  // not objectively measured
  static const std::vector<M> physical = {M::HeartRate, M::RespirationRate,
                                          M::PostureMagnitude};
  switch (kind) {
    case ComponentKind::Cognitive: return cognitive;
    case ComponentKind::Speech: return speech;
    case ComponentKind::Auditory: return auditory;
    case ComponentKind::Visual: return visual;
    case ComponentKind::Physical: return physical;
  }
  return visual;
}

std::optional<Timestamp> parse_hhmm(std::string_view hhmm) {
  if (hhmm.size() != 4) return std::nullopt;
  for (const char c : hhmm) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  }
  const int hours = (hhmm[0] - '0') * 10 + (hhmm[1] - '0');
  const int minutes = (hhmm[2] - '0') * 10 + (hhmm[3] - '0');
  if (hours > 23 || minutes > 59) return std::nullopt;
  return Timestamp{(hours * 60 + minutes) * kMinuteMs};
}

}  // namespace swarmload
