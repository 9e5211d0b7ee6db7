// Shared vocabulary: clocks, workload components, sensor metrics and the
// metric-to-component correspondence used by every downstream module.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace swarmload {

/// Shift-relative clock, integer milliseconds since shift start (>= 0).
using Timestamp = std::int64_t;

constexpr Timestamp kEpochWindowMs = 30'000;   ///< feature epoch length
constexpr Timestamp kOverallStepMs = 5'000;    ///< overall-estimate cadence
constexpr Timestamp kSpeechStepMs = 1'000;     ///< speech-estimate cadence
constexpr Timestamp kMinuteMs = 60'000;

enum class ComponentKind : std::uint8_t {
  Cognitive,
  Speech,
  Auditory,
  Visual,
  Physical,
};

inline constexpr std::array<ComponentKind, 5> kAllComponents = {
    ComponentKind::Cognitive, ComponentKind::Speech, ComponentKind::Auditory,
    ComponentKind::Visual, ComponentKind::Physical};

enum class WorkloadState : std::uint8_t {
  Underload,
  NormalLoad,
  Overload,
  NoData,  ///< produced only by gap handling, never by classifying a value
};

/// Objective workload metrics. Units: bpm, ms, breaths/min, degrees,
/// syllables/s, dB, 0/1 flag, Hz, dB, in declaration order.
enum class MetricKind : std::uint8_t {
  HeartRate,
  Hrv,
  RespirationRate,
  PostureMagnitude,
  SpeechRate,
  VoiceIntensity,
  VoiceActivity,
  VoicePitch,
  NoiseLevel,
};

inline constexpr std::array<MetricKind, 9> kAllMetrics = {
    MetricKind::HeartRate,      MetricKind::Hrv,
    MetricKind::RespirationRate, MetricKind::PostureMagnitude,
    MetricKind::SpeechRate,     MetricKind::VoiceIntensity,
    MetricKind::VoiceActivity,  MetricKind::VoicePitch,
    MetricKind::NoiseLevel};

std::string_view to_string(ComponentKind kind);
std::string_view to_string(WorkloadState state);
std::string_view to_string(MetricKind metric);  // snake_case wire names

std::optional<ComponentKind> component_from_string(std::string_view name);
std::optional<WorkloadState> state_from_string(std::string_view name);
std::optional<MetricKind> metric_from_string(std::string_view name);

/// Components fed by a metric. Total over MetricKind; the union of images is
/// every component except Visual, which has no objective metric.
const std::vector<ComponentKind>& components_for_metric(MetricKind metric);

/// Metrics feeding a component, in the fixed concatenation order used when
/// assembling estimator inputs. Empty for Visual.
const std::vector<MetricKind>& metrics_for_component(ComponentKind kind);

/// Minute index of a shift-relative timestamp: floor(millis / 60000).
constexpr std::int64_t minute_bin(Timestamp t) { return t / kMinuteMs; }

/// Parse a wall-clock "HHMM" string into milliseconds since midnight.
/// Ingestion helper for shift logs recorded against clock time.
std::optional<Timestamp> parse_hhmm(std::string_view hhmm);

}  // namespace swarmload
