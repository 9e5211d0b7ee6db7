// Synthetic physiology generator: turns a commander task-demand trace into
// plausible 1 Hz sensor channels so the estimation pipeline can be exercised
// end to end without human data. The link is a deliberately simple
// affine-plus-lag response per metric, not a physiological model.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmload/ingest.hpp"
#include "swarmload/types.hpp"

namespace swarmload {

struct MetricResponse {
  double baseline = 0.0;
  double gain = 0.0;      ///< response per unit demand; negative for HRV
  double noise_sd = 0.0;
  int lag_s = 0;          ///< seconds between demand change and response
  /// plausibility bounds the baseline must respect when loaded from a file
  double plausible_lo = 0.0;
  double plausible_hi = 0.0;
};

struct SpeakingBoutModel {
  double base_rate_per_min = 0.3;    ///< bout starts per minute at zero demand
  double demand_rate_per_min = 12.0; ///< additional rate at full demand
  int min_len_s = 4;
  int max_len_s = 8;
};

struct PhysioProfile {
  MetricResponse heart_rate{80.0, 25.0, 1.5, 2, 40.0, 120.0};  // resting near 80 bpm
  MetricResponse hrv{60.0, -25.0, 2.0, 3, 10.0, 200.0};        // inverse response
  MetricResponse respiration_rate{14.0, 6.0, 0.5, 3, 6.0, 30.0};
  MetricResponse posture_magnitude{8.0, 10.0, 1.0, 1, 0.0, 90.0};
  MetricResponse noise_level{55.0, 10.0, 1.5, 0, 30.0, 110.0};
  MetricResponse speech_rate{3.5, 1.0, 0.3, 0, 1.0, 9.0};         // inside bouts only
  MetricResponse voice_intensity{55.0, 10.0, 2.0, 0, 30.0, 100.0}; // inside bouts only
  MetricResponse voice_pitch{120.0, 30.0, 5.0, 0, 60.0, 400.0};    // inside bouts only
  SpeakingBoutModel bouts;
  double noise_floor_db = 45.0;  ///< ambient floor for the noise channel
  double confound_bias = 0.0;    ///< optional additive bias on HR/RR

  const MetricResponse& response(MetricKind metric) const;
};

PhysioProfile default_physio_profile();
PhysioProfile load_physio_profile(const std::string& json_text);
PhysioProfile load_physio_profile_file(const std::string& path);
std::string physio_profile_to_json(const PhysioProfile& profile);

/// Generate all nine channels at 1 Hz from a demand trace (values in [0, 1],
/// one per second). Deterministic given the seed. Throws
/// Error(ContractViolation) when demand leaves [0, 1].
std::vector<ChannelSeries> synthesize(std::span<const double> demand,
                                      const PhysioProfile& profile,
                                      std::uint64_t seed);

enum class FaultMode { InvalidFlag, StuckValue, DropSamples };

struct FaultSpec {
  MetricKind metric = MetricKind::NoiseLevel;
  Timestamp start = 0;
  Timestamp end = 0;  ///< exclusive
  FaultMode mode = FaultMode::InvalidFlag;
};

/// Reproduce the field failure modes on top of clean channels: readings
/// flagged invalid, a sensor stuck on one value, or samples dropped outright.
/// Overlapping faults on one metric are a spec error.
std::vector<ChannelSeries> inject_faults(std::vector<ChannelSeries> channels,
                                         std::span<const FaultSpec> faults,
                                         std::uint64_t seed);

}  // namespace swarmload
