#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dvsnoise/array.hpp"
#include "dvsnoise/sweep.hpp"

namespace dvsnoise {

/// Parse or validation failure, carrying the config line and key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, size_t line, const std::string& key,
              const std::string& msg)
      : std::runtime_error(path + ":" + std::to_string(line) +
                           (key.empty() ? "" : ": key '" + key + "'") + ": " + msg),
        line_(line),
        key_(key) {}

  size_t line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  size_t line_;
  std::string key_;
};

/*
 * A complete run description: the array configuration, the simulated
 * duration, output paths, and (for the sweep subcommand) an optional
 * sweep specification.
 */
struct RunConfig {
  ArrayConfig array;
  double duration_s = 1.0;
  uint64_t max_events = kDefaultMaxEvents;
  std::string out_events;       // binary event file; empty = not written
  std::string out_events_csv;   // CSV event file; empty = not written
  std::string out_sweep;        // sweep CSV; required when sweep is set
  std::optional<SweepSpec> sweep;
};

namespace detail {

struct ConfigLine {
  size_t number;
  std::string key;
  std::string value;
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double to_double(const ConfigLine& l, const std::string& path) {
  double v = 0.0;
  const std::string_view s = l.value;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(path, l.number, l.key, "expected a number, got '" + l.value + "'");
  return v;
}

inline uint64_t to_u64(const ConfigLine& l, const std::string& path) {
  uint64_t v = 0;
  const std::string_view s = l.value;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(path, l.number, l.key,
                      "expected a non-negative integer, got '" + l.value + "'");
  return v;
}

inline std::vector<double> to_double_list(const ConfigLine& l, const std::string& path) {
  std::vector<double> values;
  std::string_view rest = l.value;
  while (true) {
    const size_t comma = rest.find(',');
    const std::string_view field = trim(rest.substr(0, comma));
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
      throw ConfigError(path, l.number, l.key,
                        "bad list element '" + std::string(field) + "'");
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return values;
}

}  // namespace detail

/*
 * Parses the line-oriented `key = value` run configuration. '#' starts a
 * comment; blank lines are ignored; unknown or duplicate keys are
 * rejected with the offending line number. All pixel and array
 * invariants are re-validated after parsing.
 */
inline RunConfig parse_run_config(std::istream& in, const std::string& path) {
  std::vector<detail::ConfigLine> lines;
  std::set<std::string> seen;
  std::string raw;
  size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::string_view s = raw;
    const size_t hash = s.find('#');
    if (hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    const size_t eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(path, number, "", "expected 'key = value'");
    const std::string key(detail::trim(s.substr(0, eq)));
    const std::string value(detail::trim(s.substr(eq + 1)));
    if (key.empty()) throw ConfigError(path, number, "", "empty key");
    if (value.empty()) throw ConfigError(path, number, key, "empty value");
    if (!seen.insert(key).second)
      throw ConfigError(path, number, key, "duplicate key");
    lines.push_back({number, key, value});
  }

  RunConfig cfg;
  cfg.array.base.sigma_noise = 0.0;
  bool have_dt = false, have_f3db = false;
  bool have_theta_on = false, have_theta_off = false, have_duration = false;
  std::optional<SweepKind> sweep_kind;
  std::vector<double> sweep_values;
  double sweep_duration = -1.0;
  RatioHold sweep_hold = RatioHold::theta_off;
  size_t first_line = lines.empty() ? 1 : lines.front().number;

  auto to_dimension = [&](const detail::ConfigLine& l) {
    const uint64_t v = detail::to_u64(l, path);
    if (v < 1 || v > 0xFFFF)
      throw ConfigError(path, l.number, l.key, "must be in [1, 65535]");
    return static_cast<uint32_t>(v);
  };

  for (const auto& l : lines) {
    if (l.key == "width") {
      cfg.array.width = to_dimension(l);
    } else if (l.key == "height") {
      cfg.array.height = to_dimension(l);
    } else if (l.key == "master_seed") {
      cfg.array.master_seed = detail::to_u64(l, path);
    } else if (l.key == "duration_s") {
      cfg.duration_s = detail::to_double(l, path);
      have_duration = true;
    } else if (l.key == "theta_on") {
      cfg.array.base.theta_on = detail::to_double(l, path);
      have_theta_on = true;
    } else if (l.key == "theta_off") {
      cfg.array.base.theta_off = detail::to_double(l, path);
      have_theta_off = true;
    } else if (l.key == "tau_refr_s") {
      cfg.array.base.tau_refr = detail::to_double(l, path);
    } else if (l.key == "f3db_hz") {
      cfg.array.base.f3db = detail::to_double(l, path);
      have_f3db = true;
    } else if (l.key == "sigma_noise") {
      cfg.array.base.sigma_noise = detail::to_double(l, path);
    } else if (l.key == "dt_s") {
      cfg.array.base.dt = detail::to_double(l, path);
      have_dt = true;
    } else if (l.key == "mismatch_sigma_thresh") {
      cfg.array.mismatch_sigma_thresh = detail::to_double(l, path);
    } else if (l.key == "max_events") {
      cfg.max_events = detail::to_u64(l, path);
    } else if (l.key == "out_events") {
      cfg.out_events = l.value;
    } else if (l.key == "out_events_csv") {
      cfg.out_events_csv = l.value;
    } else if (l.key == "out_sweep") {
      cfg.out_sweep = l.value;
    } else if (l.key == "sweep_kind") {
      if (l.value == "refractory") sweep_kind = SweepKind::refractory;
      else if (l.value == "threshold_ratio") sweep_kind = SweepKind::threshold_ratio;
      else
        throw ConfigError(path, l.number, l.key,
                          "expected 'refractory' or 'threshold_ratio'");
    } else if (l.key == "sweep_values") {
      sweep_values = detail::to_double_list(l, path);
    } else if (l.key == "sweep_duration_s") {
      sweep_duration = detail::to_double(l, path);
    } else if (l.key == "sweep_hold") {
      if (l.value == "theta_off") sweep_hold = RatioHold::theta_off;
      else if (l.value == "theta_on") sweep_hold = RatioHold::theta_on;
      else if (l.value == "geometric") sweep_hold = RatioHold::geometric_mean;
      else
        throw ConfigError(path, l.number, l.key,
                          "expected 'theta_off', 'theta_on' or 'geometric'");
    } else {
      throw ConfigError(path, l.number, l.key, "unknown key");
    }
  }

  auto require = [&](bool have, const char* key) {
    if (!have)
      throw ConfigError(path, first_line, key, "required key is missing");
  };
  require(have_theta_on, "theta_on");
  require(have_theta_off, "theta_off");
  require(have_f3db, "f3db_hz");
  require(have_duration, "duration_s");
  if (!have_dt) cfg.array.base.dt = default_dt(cfg.array.base.f3db);

  try {
    cfg.array.validate();
    if (!(cfg.duration_s > 0.0) || !std::isfinite(cfg.duration_s))
      throw std::invalid_argument("duration_s must be > 0");
  } catch (const std::exception& e) {
    throw ConfigError(path, first_line, "", e.what());
  }

  if (sweep_kind || !sweep_values.empty()) {
    if (!sweep_kind)
      throw ConfigError(path, first_line, "sweep_kind",
                        "required when sweep_values is present");
    if (sweep_values.empty())
      throw ConfigError(path, first_line, "sweep_values",
                        "required when sweep_kind is present");
    if (cfg.out_sweep.empty())
      throw ConfigError(path, first_line, "out_sweep",
                        "required when sweep_kind is present");
    SweepSpec spec;
    spec.kind = *sweep_kind;
    spec.values = std::move(sweep_values);
    spec.base = cfg.array;
    spec.duration = sweep_duration > 0.0 ? sweep_duration : cfg.duration_s;
    spec.hold = sweep_hold;
    try {
      spec.validate();
    } catch (const std::exception& e) {
      throw ConfigError(path, first_line, "sweep_values", e.what());
    }
    cfg.sweep = std::move(spec);
  }
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(path, 0, "", "cannot open config file");
  return parse_run_config(in, path);
}

}  // namespace dvsnoise
