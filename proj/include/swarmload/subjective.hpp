// In-situ probe handling: Likert normalization onto the 1-100 scale,
// subjective component weighting, and probe-to-estimate minute alignment.
#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "swarmload/ingest.hpp"
#include "swarmload/types.hpp"
#include "swarmload/workload.hpp"

namespace swarmload {

enum class ProbeDimension : std::uint8_t {
  Cognitive,
  Speech,
  Auditory,
  Visual,
  Physical,
  Stress,
  Fatigue,
  Overall,
};

std::string_view to_string(ProbeDimension dimension);
std::optional<ProbeDimension> probe_dimension_from_string(std::string_view name);

/// A live verbal rating collected during a shift, 1 (very low) .. 7 (very high).
struct InSituProbe {
  Timestamp t = 0;
  ProbeDimension dimension = ProbeDimension::Overall;
  int rating = 1;
};

/// Normalize a 1..7 rating onto [1, 100]. The mapping is the published
/// lookup {1, 18, 34, 50.5, 67, 83.5, 100}; note the near-linear form
/// 16.5 * r - 15.5 reproduces every entry except rating 2 (17.5 vs 18).
double normalize_likert(int rating);

/// Percent weight per workload component; must total 100.
struct WeightingScheme {
  std::array<double, kAllComponents.size()> weights{};

  double weight(ComponentKind kind) const {
    return weights[static_cast<std::size_t>(kind)];
  }
  double& weight(ComponentKind kind) {
    return weights[static_cast<std::size_t>(kind)];
  }
};

/// Weighted sum of mean normalized component responses:
/// sum(weight/100 * mean). Throws unless the weights total 100.
double weighted_subjective_overall(
    const std::array<double, kAllComponents.size()>& component_means,
    const WeightingScheme& scheme);

struct ProbeAlignment {
  double mean = 0.0;
  double sd = 0.0;  ///< population SD
  std::size_t count = 0;
};

/// Mean/SD/count of the usable overall estimates sharing the probe's minute
/// (at most 12 on the 5-second grid). Throws Error(EmptyAlignment) when the
/// minute holds none.
ProbeAlignment align_probe_with_estimates(Timestamp probe_t,
                                          std::span<const OverallEstimate> estimates);

struct ProbeParseResult {
  std::vector<InSituProbe> probes;
  std::vector<RowError> errors;
};

/// Parse the probe CSV (header `t_ms,dimension,rating`). Row errors are
/// collected, not fatal; a bad header throws Error(FormatError).
ProbeParseResult parse_probe_csv(std::istream& in);
ProbeParseResult parse_probe_csv_file(const std::string& path);

}  // namespace swarmload
