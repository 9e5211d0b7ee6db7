#include "swarmload/subjective.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "swarmload/errors.hpp"

namespace swarmload {

std::string_view to_string(ProbeDimension dimension) {
  switch (dimension) {
    case ProbeDimension::Cognitive: return "cognitive";
    case ProbeDimension::Speech: return "speech";
    case ProbeDimension::Auditory: return "auditory";
    case ProbeDimension::Visual: return "visual";
    case ProbeDimension::Physical: return "physical";
    case ProbeDimension::Stress: return "stress";
    case ProbeDimension::Fatigue: return "fatigue";
    case ProbeDimension::Overall: return "overall";
  }
  return "?";
}

std::optional<ProbeDimension> probe_dimension_from_string(std::string_view name) {
  for (const auto dimension :
       {ProbeDimension::Cognitive, ProbeDimension::Speech, ProbeDimension::Auditory,
        ProbeDimension::Visual, ProbeDimension::Physical, ProbeDimension::Stress,
        ProbeDimension::Fatigue, ProbeDimension::Overall}) {
    if (to_string(dimension) == name) return dimension;
  }
  return std::nullopt;
}

double normalize_likert(int rating) {
  // Lookup pinned to the published normalized values.
  static constexpr std::array<double, 7> table = {1.0,  18.0, 34.0, 50.5,
                                                  67.0, 83.5, 100.0};
  if (rating < 1 || rating > 7) {
    throw Error(Errc::ContractViolation,
                "likert rating must be 1..7, got " + std::to_string(rating));
  }
  return table[static_cast<std::size_t>(rating - 1)];
}

double weighted_subjective_overall(
    const std::array<double, kAllComponents.size()>& component_means,
    const WeightingScheme& scheme) {
  double total = 0.0;
  for (const auto weight : scheme.weights) total += weight;
  if (std::abs(total - 100.0) > 1e-9) {
    throw Error(Errc::ContractViolation,
                "component weights must total 100, got " + std::to_string(total));
  }
  double overall = 0.0;
  for (std::size_t i = 0; i < component_means.size(); ++i) {
    overall += scheme.weights[i] / 100.0 * component_means[i];
  }
  return overall;
}

ProbeAlignment align_probe_with_estimates(
    Timestamp probe_t, std::span<const OverallEstimate> estimates) {
  const auto minute = minute_bin(probe_t);
  double sum = 0.0;
  double sq_sum = 0.0;
  std::size_t count = 0;
  for (const auto& estimate : estimates) {
    if (!estimate.usable() || minute_bin(estimate.t) != minute) continue;
    sum += *estimate.value;
    sq_sum += *estimate.value * *estimate.value;
    ++count;
  }
  if (count == 0) {
    throw Error(Errc::EmptyAlignment,
                "no usable estimates in minute " + std::to_string(minute));
  }
  ProbeAlignment alignment;
  alignment.count = count;
  alignment.mean = sum / static_cast<double>(count);
  const double variance =
      std::max(0.0, sq_sum / static_cast<double>(count) - alignment.mean * alignment.mean);
  alignment.sd = std::sqrt(variance);
  return alignment;
}

ProbeParseResult parse_probe_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::FormatError, "probe csv: empty stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_ms,dimension,rating") {
    throw Error(Errc::FormatError,
                "probe csv: expected header 't_ms,dimension,rating', got '" + line + "'");
  }

  ProbeParseResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::istringstream fields(line);
    std::string t_text, dim_text, rating_text;
    if (!std::getline(fields, t_text, ',') || !std::getline(fields, dim_text, ',') ||
        !std::getline(fields, rating_text)) {
      result.errors.push_back({line_no, "expected 3 fields"});
      continue;
    }
    std::int64_t t = 0;
    const auto [t_ptr, t_ec] =
        std::from_chars(t_text.data(), t_text.data() + t_text.size(), t);
    if (t_ec != std::errc() || t_ptr != t_text.data() + t_text.size() || t < 0) {
      result.errors.push_back({line_no, "bad timestamp '" + t_text + "'"});
      continue;
    }
    const auto dimension = probe_dimension_from_string(dim_text);
    if (!dimension) {
      result.errors.push_back({line_no, "unknown dimension '" + dim_text + "'"});
      continue;
    }
    int rating = 0;
    const auto [r_ptr, r_ec] =
        std::from_chars(rating_text.data(), rating_text.data() + rating_text.size(), rating);
    if (r_ec != std::errc() || r_ptr != rating_text.data() + rating_text.size() ||
        rating < 1 || rating > 7) {
      result.errors.push_back({line_no, "bad rating '" + rating_text + "'"});
      continue;
    }
    result.probes.push_back({t, *dimension, rating});
  }
  return result;
}

ProbeParseResult parse_probe_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open probe csv: " + path);
  return parse_probe_csv(in);
}

}  // namespace swarmload
