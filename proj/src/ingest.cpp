#include "swarmload/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "swarmload/errors.hpp"
#include "swarmload/rng.hpp"

namespace swarmload {
namespace {

std::string strip(std::string_view field) {
  const auto begin = field.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = field.find_last_not_of(" \t\r");
  return std::string(field.substr(begin, end - begin + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(strip(std::string_view(line).substr(start)));
      break;
    }
    fields.push_back(strip(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool parse_int(const std::string& text, std::int64_t& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  try {
    std::size_t consumed = 0;
    out = std::stod(text, &consumed);
    return consumed == text.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

}  // namespace

ParseResult parse_sensor_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(Errc::FormatError, "sensor csv: empty stream");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split_csv_line(line) != std::vector<std::string>{"t_ms", "metric", "value", "valid"}) {
    throw Error(Errc::FormatError,
                "sensor csv: expected header 't_ms,metric,value,valid', got '" + line + "'");
  }

  ParseResult result;
  std::map<MetricKind, ChannelSeries> channels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      result.errors.push_back({line_no, "expected 4 fields, got " + std::to_string(fields.size())});
      continue;
    }
    std::int64_t t = 0;
    if (!parse_int(fields[0], t) || t < 0) {
      result.errors.push_back({line_no, "bad timestamp '" + fields[0] + "'"});
      continue;
    }
    const auto metric = metric_from_string(fields[1]);
    if (!metric) {
      result.errors.push_back({line_no, "unknown metric '" + fields[1] + "'"});
      continue;
    }
    double value = 0.0;
    if (!parse_double(fields[2], value)) {
      result.errors.push_back({line_no, "bad value '" + fields[2] + "'"});
      continue;
    }
    if (fields[3] != "0" && fields[3] != "1") {
      result.errors.push_back({line_no, "bad valid flag '" + fields[3] + "'"});
      continue;
    }

    auto& series = channels[*metric];
    series.metric = *metric;
    if (!series.samples.empty() && t <= series.samples.back().t) {
      result.errors.push_back({line_no, "non-increasing timestamp for " + std::string(to_string(*metric))});
      continue;
    }
    series.samples.push_back({t, *metric, value, fields[3] == "1"});
  }

  result.channels.reserve(channels.size());
  for (auto& [metric, series] : channels) result.channels.push_back(std::move(series));
  return result;
}

ParseResult parse_sensor_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open sensor csv: " + path);
  return parse_sensor_csv(in);
}

void write_sensor_csv(std::ostream& out, const std::vector<ChannelSeries>& channels) {
  out << "t_ms,metric,value,valid\n";
  std::vector<const SensorSample*> rows;
  for (const auto& channel : channels) {
    for (const auto& sample : channel.samples) rows.push_back(&sample);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SensorSample* a, const SensorSample* b) {
    if (a->t != b->t) return a->t < b->t;
    return a->metric < b->metric;
  });
  out.precision(17);
  for (const auto* sample : rows) {
    out << sample->t << ',' << to_string(sample->metric) << ',' << sample->value << ','
        << (sample->valid ? 1 : 0) << '\n';
  }
}

std::vector<GapRecord> detect_gaps(const ChannelSeries& series, Timestamp max_gap_ms) {
  std::vector<GapRecord> gaps;
  for (std::size_t i = 1; i < series.samples.size(); ++i) {
    const Timestamp prev = series.samples[i - 1].t;
    const Timestamp next = series.samples[i].t;
    if (next - prev > max_gap_ms) gaps.push_back({prev, next, {series.metric}});
  }
  return gaps;
}

RepairResult repair_noise_channel(const ChannelSeries& series, std::uint64_t seed) {
  if (series.metric != MetricKind::NoiseLevel) {
    throw Error(Errc::ContractViolation, "repair_noise_channel expects the noise_level channel");
  }

  // Duration-weighted moments over the valid readings; each sample is
  // weighted by the interval it covers, which at a uniform rate reduces to
  // the ordinary mean/SD.
  double weight_sum = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t valid_count = 0;
  for (std::size_t i = 0; i < series.samples.size(); ++i) {
    const auto& sample = series.samples[i];
    if (!sample.valid) continue;
    const Timestamp covered = (i + 1 < series.samples.size())
                                  ? series.samples[i + 1].t - sample.t
                                  : kNominalSampleIntervalMs;
    const double weight = static_cast<double>(covered);
    weight_sum += weight;
    const double delta = sample.value - mean;
    mean += (weight / weight_sum) * delta;
    m2 += weight * delta * (sample.value - mean);
    lo = std::min(lo, sample.value);
    hi = std::max(hi, sample.value);
    ++valid_count;
  }
  if (valid_count == 0) {
    throw Error(Errc::NoValidReadings, "noise channel has no valid readings");
  }

  RepairResult result;
  result.stats.mean = mean;
  result.stats.sd = std::sqrt(m2 / weight_sum);
  result.stats.min = lo;
  result.stats.max = hi;
  result.stats.valid_count = valid_count;

  result.series = series;
  Rng rng(seed);
  for (auto& sample : result.series.samples) {
    if (sample.valid) continue;
    const double draw = rng.normal(result.stats.mean, result.stats.sd);
    sample.value = std::clamp(draw, result.stats.min, result.stats.max);
    sample.valid = true;
    ++result.stats.imputed_count;
  }
  return result;
}

std::size_t flag_stuck_runs(ChannelSeries& series, std::size_t min_run) {
  std::size_t flagged = 0;
  std::size_t run_start = 0;
  const auto flag_run = [&](std::size_t begin, std::size_t end) {
    if (end - begin < min_run) return;
    for (std::size_t i = begin; i < end; ++i) {
      if (series.samples[i].valid) {
        series.samples[i].valid = false;
        ++flagged;
      }
    }
  };
  for (std::size_t i = 1; i <= series.samples.size(); ++i) {
    if (i == series.samples.size() ||
        series.samples[i].value != series.samples[run_start].value) {
      flag_run(run_start, i);
      run_start = i;
    }
  }
  return flagged;
}

}  // namespace swarmload
