#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dvsnoise/array.hpp"
#include "dvsnoise/stats.hpp"

namespace dvsnoise {

enum class SweepKind { refractory, threshold_ratio };

/*
 * Which threshold the ratio sweep anchors while theta_on/theta_off
 * tracks the swept ratio. With the polarity-symmetric noise model the
 * choice matters: anchoring theta_on (raising theta_off as the ratio
 * drops) is the variant that breaks the event-pair cycle and lowers
 * total rate; anchoring theta_off cheapens ON events and raises it.
 */
enum class RatioHold { theta_off, theta_on, geometric_mean };

struct SweepSpec {
  SweepKind kind = SweepKind::refractory;
  std::vector<double> values;
  ArrayConfig base;
  double duration = 1.0;  // seconds per point
  RatioHold hold = RatioHold::theta_off;

  void validate() const {
    auto fail = [](const std::string& msg) {
      throw std::invalid_argument("SweepSpec: " + msg);
    };
    if (values.empty()) fail("values must be non-empty");
    if (values.size() > 1) {
      const bool increasing = values[1] > values[0];
      for (size_t i = 1; i < values.size(); ++i) {
        if (increasing ? values[i] <= values[i - 1] : values[i] >= values[i - 1])
          fail("values must be strictly monotonic");
      }
    }
    if (!(duration > 0.0) || !std::isfinite(duration))
      fail("duration must be > 0");
    if (kind == SweepKind::threshold_ratio) {
      for (double v : values)
        if (!(v > 0.0)) fail("threshold ratios must be > 0");
    } else {
      for (double v : values)
        if (v < 0.0) fail("refractory periods must be >= 0");
    }
    base.validate();
  }
};

/// One sweep row: the swept value plus the summary statistics of that
/// point, in the order of the CSV schema.
struct SweepPoint {
  double value = 0.0;
  double rate_total_hz = 0.0;  // mean events per pixel per second
  double rate_on_hz = 0.0;
  double rate_off_hz = 0.0;
  double opposite_fraction = 0.0;
  std::array<double, 4> isi_median_us{};  // indexed by TransitionClass

  bool equals(const SweepPoint& other) const {
    auto same = [](double a, double b) {
      return a == b || (std::isnan(a) && std::isnan(b));
    };
    if (!same(value, other.value) || !same(rate_total_hz, other.rate_total_hz) ||
        !same(rate_on_hz, other.rate_on_hz) ||
        !same(rate_off_hz, other.rate_off_hz) ||
        !same(opposite_fraction, other.opposite_fraction))
      return false;
    for (int c = 0; c < 4; ++c)
      if (!same(isi_median_us[c], other.isi_median_us[c])) return false;
    return true;
  }
};

struct SweepResult {
  SweepKind kind = SweepKind::refractory;
  std::vector<SweepPoint> points;

  bool equals(const SweepResult& other) const {
    if (kind != other.kind || points.size() != other.points.size()) return false;
    for (size_t i = 0; i < points.size(); ++i)
      if (!points[i].equals(other.points[i])) return false;
    return true;
  }
};

namespace detail {

inline SweepPoint summarize_point(double value, const std::vector<DvsEvent>& events,
                                  const ArrayConfig& cfg, double duration) {
  SweepPoint point;
  point.value = value;
  const double n_pixels =
      static_cast<double>(cfg.width) * static_cast<double>(cfg.height);
  uint64_t n_on = 0;
  for (const DvsEvent& e : events)
    if (e.polarity == Polarity::on) ++n_on;
  point.rate_total_hz = static_cast<double>(events.size()) / duration / n_pixels;
  point.rate_on_hz = static_cast<double>(n_on) / duration / n_pixels;
  point.rate_off_hz =
      static_cast<double>(events.size() - n_on) / duration / n_pixels;
  point.opposite_fraction = pair_transitions(events).opposite_fraction();
  const auto isi = isi_values_by_class(events);
  for (int c = 0; c < 4; ++c) point.isi_median_us[c] = median(isi[c]);
  return point;
}

}  // namespace detail

/// Each sweep point gets a fresh master seed so points are statistically
/// independent while the whole sweep stays a pure function of the spec.
/// Public so a sweep point can be re-simulated in isolation.
inline uint64_t sweep_point_seed(const SweepSpec& spec, size_t index) {
  return derive_stream_seed(spec.base.master_seed, index, 0, kStreamSweepPoint);
}

/// Sweeps the refractory period: each point re-runs the array with
/// tau_refr overridden to the swept value.
inline SweepResult run_refractory_sweep(const SweepSpec& spec,
                                        uint64_t max_events = kDefaultMaxEvents) {
  spec.validate();
  if (spec.kind != SweepKind::refractory)
    throw std::invalid_argument("run_refractory_sweep: spec.kind mismatch");
  SweepResult result;
  result.kind = spec.kind;
  for (size_t i = 0; i < spec.values.size(); ++i) {
    ArrayConfig cfg = spec.base;
    cfg.base.tau_refr = spec.values[i];
    cfg.master_seed = sweep_point_seed(spec, i);
    try {
      const auto events = simulate_array(cfg, spec.duration, max_events);
      result.points.push_back(
          detail::summarize_point(spec.values[i], events, cfg, spec.duration));
    } catch (const std::exception& e) {
      throw std::runtime_error("refractory sweep point " + std::to_string(i) +
                               " (tau_refr = " + std::to_string(spec.values[i]) +
                               "): " + e.what());
    }
  }
  return result;
}

/// Resolves the per-point thresholds for a swept theta_on/theta_off ratio.
inline std::pair<double, double> ratio_thresholds(const PixelParams& base,
                                                  double ratio, RatioHold hold) {
  switch (hold) {
    case RatioHold::theta_off:
      return {ratio * base.theta_off, base.theta_off};
    case RatioHold::theta_on:
      return {base.theta_on, base.theta_on / ratio};
    case RatioHold::geometric_mean: {
      const double mean = std::sqrt(base.theta_on * base.theta_off);
      const double s = std::sqrt(ratio);
      return {mean * s, mean / s};
    }
  }
  throw std::logic_error("ratio_thresholds: bad hold");
}

/// Sweeps the ON/OFF threshold ratio at a fixed (short) refractory
/// period, anchoring whichever threshold spec.hold selects.
inline SweepResult run_threshold_ratio_sweep(const SweepSpec& spec,
                                             uint64_t max_events = kDefaultMaxEvents) {
  spec.validate();
  if (spec.kind != SweepKind::threshold_ratio)
    throw std::invalid_argument("run_threshold_ratio_sweep: spec.kind mismatch");
  SweepResult result;
  result.kind = spec.kind;
  for (size_t i = 0; i < spec.values.size(); ++i) {
    ArrayConfig cfg = spec.base;
    const auto [theta_on, theta_off] =
        ratio_thresholds(spec.base.base, spec.values[i], spec.hold);
    cfg.base.theta_on = theta_on;
    cfg.base.theta_off = theta_off;
    cfg.master_seed = sweep_point_seed(spec, i);
    try {
      const auto events = simulate_array(cfg, spec.duration, max_events);
      result.points.push_back(
          detail::summarize_point(spec.values[i], events, cfg, spec.duration));
    } catch (const std::exception& e) {
      throw std::runtime_error("threshold ratio sweep point " +
                               std::to_string(i) + " (ratio = " +
                               std::to_string(spec.values[i]) + "): " + e.what());
    }
  }
  return result;
}

inline constexpr std::string_view kSweepCsvHeader =
    "value,rate_total_hz,rate_on_hz,rate_off_hz,opposite_fraction,"
    "isi_med_on_on_us,isi_med_on_off_us,isi_med_off_on_us,isi_med_off_off_us";

namespace detail {

/// Shortest round-trip decimal rendering; always '.' regardless of locale.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc())
    throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

inline double parse_double_field(std::string_view field, const std::string& path,
                                 size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                             ": bad numeric field '" + std::string(field) + "'");
  return value;
}

}  // namespace detail

/// Writes one header row plus one row per sweep point.
inline void emit_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("emit_sweep_csv: cannot open '" + path + "'");
  out << kSweepCsvHeader << '\n';
  for (const SweepPoint& p : result.points) {
    out << detail::format_double(p.value) << ','
        << detail::format_double(p.rate_total_hz) << ','
        << detail::format_double(p.rate_on_hz) << ','
        << detail::format_double(p.rate_off_hz) << ','
        << detail::format_double(p.opposite_fraction);
    for (int c = 0; c < 4; ++c)
      out << ',' << detail::format_double(p.isi_median_us[c]);
    out << '\n';
  }
  if (!out.flush())
    throw std::runtime_error("emit_sweep_csv: write failed for '" + path + "'");
}

/// Reads a sweep CSV back; inverse of emit_sweep_csv.
inline SweepResult parse_sweep_csv(const std::string& path,
                                   SweepKind kind = SweepKind::refractory) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("parse_sweep_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader)
    throw std::runtime_error("parse_sweep_csv: bad header in '" + path + "'");
  SweepResult result;
  result.kind = kind;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      const size_t comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 9)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 9 fields, got " +
                               std::to_string(fields.size()));
    SweepPoint p;
    p.value = detail::parse_double_field(fields[0], path, line_no);
    p.rate_total_hz = detail::parse_double_field(fields[1], path, line_no);
    p.rate_on_hz = detail::parse_double_field(fields[2], path, line_no);
    p.rate_off_hz = detail::parse_double_field(fields[3], path, line_no);
    p.opposite_fraction = detail::parse_double_field(fields[4], path, line_no);
    for (int c = 0; c < 4; ++c)
      p.isi_median_us[c] = detail::parse_double_field(fields[5 + c], path, line_no);
    result.points.push_back(p);
  }
  return result;
}

}  // namespace dvsnoise
