#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <string_view>
#include <vector>

#include "dvsnoise/array.hpp"
#include "dvsnoise/config.hpp"
#include "dvsnoise/event_io.hpp"
#include "dvsnoise/stats.hpp"
#include "dvsnoise/sweep.hpp"

namespace dvsnoise {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitIoError = 2;

namespace cli_detail {

inline void print_usage(std::ostream& out) {
  out << "usage:\n"
         "  dvsnoise simulate --config <path> [--seed N]\n"
         "  dvsnoise sweep    --config <path> [--seed N]\n"
         "  dvsnoise stats    <events-file> --out-dir <dir> [--duration S]\n"
         "\n"
         "simulate  run the pixel-array simulation from a config file and\n"
         "          write the event stream (binary and/or CSV outputs as\n"
         "          configured by out_events / out_events_csv)\n"
         "sweep     run the parameter sweep described by the config file\n"
         "          and write the sweep CSV to out_sweep\n"
         "stats     read an event file (binary or CSV) and write\n"
         "          pairstats.csv, isi.csv and rates.csv into --out-dir\n"
         "\n"
         "--seed N overrides master_seed from the config file.\n"
         "--duration S sets the analysis window for rates; the default is\n"
         "the recorded event time span.\n";
}

struct ParsedArgs {
  std::string config_path;
  std::string input_path;
  std::string out_dir;
  bool have_seed = false;
  uint64_t seed = 0;
  bool have_duration = false;
  double duration = 0.0;
};

inline bool parse_u64_arg(std::string_view s, uint64_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_double_arg(std::string_view s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

/// Parses flags after the subcommand. Returns false (after printing
/// usage to stderr) on any unknown flag or malformed value.
inline bool parse_args(const std::vector<std::string_view>& args,
                       bool positional_input, ParsedArgs& parsed) {
  size_t i = 0;
  auto fail = [&](const std::string& msg) {
    std::cerr << "dvsnoise: " << msg << "\n";
    print_usage(std::cerr);
    return false;
  };
  while (i < args.size()) {
    const std::string_view arg = args[i];
    auto value = [&](const char* flag) -> std::string_view {
      if (i + 1 >= args.size())
        throw std::invalid_argument(std::string(flag) + " requires a value");
      return args[++i];
    };
    try {
      if (arg == "--config") {
        parsed.config_path = std::string(value("--config"));
      } else if (arg == "--seed") {
        if (!parse_u64_arg(value("--seed"), parsed.seed))
          return fail("--seed expects an unsigned integer");
        parsed.have_seed = true;
      } else if (arg == "--out-dir") {
        parsed.out_dir = std::string(value("--out-dir"));
      } else if (arg == "--duration") {
        if (!parse_double_arg(value("--duration"), parsed.duration) ||
            !(parsed.duration > 0.0))
          return fail("--duration expects a positive number");
        parsed.have_duration = true;
      } else if (!arg.empty() && arg.front() == '-') {
        return fail("unknown flag '" + std::string(arg) + "'");
      } else if (positional_input && parsed.input_path.empty()) {
        parsed.input_path = std::string(arg);
      } else {
        return fail("unexpected argument '" + std::string(arg) + "'");
      }
    } catch (const std::invalid_argument& e) {
      return fail(e.what());
    }
    ++i;
  }
  return true;
}

inline int run_simulate(const ParsedArgs& args) {
  RunConfig cfg = load_run_config(args.config_path);
  if (args.have_seed) cfg.array.master_seed = args.seed;
  if (cfg.out_events.empty() && cfg.out_events_csv.empty()) {
    std::cerr << "dvsnoise: config sets neither out_events nor out_events_csv\n";
    return kExitConfigError;
  }
  const auto events = simulate_array(cfg.array, cfg.duration_s, cfg.max_events);
  std::cerr << "dvsnoise: simulated " << cfg.array.width << "x" << cfg.array.height
            << " array for " << cfg.duration_s << " s, " << events.size()
            << " events\n";
  if (!cfg.out_events.empty())
    write_events_binary(events, cfg.array.width, cfg.array.height, cfg.out_events);
  if (!cfg.out_events_csv.empty()) write_events_csv(events, cfg.out_events_csv);
  return kExitOk;
}

inline int run_sweep(const ParsedArgs& args) {
  RunConfig cfg = load_run_config(args.config_path);
  if (args.have_seed) {
    cfg.array.master_seed = args.seed;
    if (cfg.sweep) cfg.sweep->base.master_seed = args.seed;
  }
  if (!cfg.sweep) {
    std::cerr << "dvsnoise: config has no sweep section (sweep_kind/sweep_values)\n";
    return kExitConfigError;
  }
  const SweepResult result = cfg.sweep->kind == SweepKind::refractory
                                 ? run_refractory_sweep(*cfg.sweep, cfg.max_events)
                                 : run_threshold_ratio_sweep(*cfg.sweep, cfg.max_events);
  emit_sweep_csv(result, cfg.out_sweep);
  std::cerr << "dvsnoise: wrote " << result.points.size() << " sweep points to "
            << cfg.out_sweep << "\n";
  return kExitOk;
}

inline void write_pairstats_csv(const PairStats& stats, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoError::Kind::open_failed, path, "cannot open for writing");
  out << "on_on,on_off,off_on,off_off,total_pairs,opposite_fraction\n";
  out << stats.count(TransitionClass::on_on) << ','
      << stats.count(TransitionClass::on_off) << ','
      << stats.count(TransitionClass::off_on) << ','
      << stats.count(TransitionClass::off_off) << ',' << stats.total_pairs()
      << ',' << detail::format_double(stats.opposite_fraction()) << '\n';
  if (!out.flush()) throw IoError(IoError::Kind::write_failed, path, "write failed");
}

inline void write_isi_csv(const std::array<IsiHistogram, 4>& histograms,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoError::Kind::open_failed, path, "cannot open for writing");
  out << "class,bin_lo_us,bin_hi_us,count\n";
  for (const IsiHistogram& h : histograms)
    for (size_t b = 0; b + 1 < h.bin_edges.size(); ++b)
      out << transition_class_name(h.cls) << ','
          << detail::format_double(h.bin_edges[b]) << ','
          << detail::format_double(h.bin_edges[b + 1]) << ',' << h.counts[b]
          << '\n';
  if (!out.flush()) throw IoError(IoError::Kind::write_failed, path, "write failed");
}

inline void write_rates_csv(const RateTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoError::Kind::open_failed, path, "cannot open for writing");
  out << "x,y,rate_on_hz,rate_off_hz\n";
  for (const RateEntry& e : table)
    out << e.x << ',' << e.y << ',' << detail::format_double(e.rate_on_hz) << ','
        << detail::format_double(e.rate_off_hz) << '\n';
  if (!out.flush()) throw IoError(IoError::Kind::write_failed, path, "write failed");
}

inline int run_stats(const ParsedArgs& args) {
  if (args.input_path.empty()) {
    std::cerr << "dvsnoise: stats requires an event file argument\n";
    print_usage(std::cerr);
    return kExitConfigError;
  }
  if (args.out_dir.empty()) {
    std::cerr << "dvsnoise: stats requires --out-dir\n";
    print_usage(std::cerr);
    return kExitConfigError;
  }
  const std::vector<DvsEvent> events =
      is_binary_event_file(args.input_path)
          ? read_events_binary(args.input_path).second
          : read_events_csv(args.input_path);

  double duration = args.duration;
  if (!args.have_duration) {
    duration = events.empty()
                   ? 1.0
                   : static_cast<double>(events.back().t_us - events.front().t_us + 1) * 1e-6;
  }

  std::error_code ec;
  std::filesystem::create_directories(args.out_dir, ec);
  if (ec)
    throw IoError(IoError::Kind::open_failed, args.out_dir,
                  "cannot create output directory: " + ec.message());

  const auto dir = std::filesystem::path(args.out_dir);
  write_pairstats_csv(pair_transitions(events), (dir / "pairstats.csv").string());
  write_isi_csv(isi_by_class(events), (dir / "isi.csv").string());
  write_rates_csv(per_pixel_rates(events, duration), (dir / "rates.csv").string());
  std::cerr << "dvsnoise: analyzed " << events.size() << " events over "
            << duration << " s\n";
  return kExitOk;
}

}  // namespace cli_detail

/*
 * Command-line entry point. Exit codes: 0 success, 1 configuration or
 * usage error, 2 I/O error. Diagnostics go to stderr; data goes only to
 * the requested files.
 */
inline int cli_main(int argc, const char* const* argv) {
  using namespace cli_detail;
  std::vector<std::string_view> args(argv + std::min(argc, 1), argv + argc);
  if (args.empty()) {
    print_usage(std::cerr);
    return kExitConfigError;
  }
  const std::string_view command = args.front();
  args.erase(args.begin());

  try {
    if (command == "simulate" || command == "sweep") {
      ParsedArgs parsed;
      if (!parse_args(args, false, parsed)) return kExitConfigError;
      if (parsed.config_path.empty()) {
        std::cerr << "dvsnoise: " << command << " requires --config\n";
        print_usage(std::cerr);
        return kExitConfigError;
      }
      return command == "simulate" ? run_simulate(parsed) : run_sweep(parsed);
    }
    if (command == "stats") {
      ParsedArgs parsed;
      if (!parse_args(args, true, parsed)) return kExitConfigError;
      return run_stats(parsed);
    }
    if (command == "--help" || command == "-h" || command == "help") {
      print_usage(std::cout);
      return kExitOk;
    }
    std::cerr << "dvsnoise: unknown command '" << command << "'\n";
    print_usage(std::cerr);
    return kExitConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "dvsnoise: config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const IoError& e) {
    std::cerr << "dvsnoise: I/O error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "dvsnoise: invalid configuration: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "dvsnoise: error: " << e.what() << "\n";
    return kExitIoError;
  }
}

}  // namespace dvsnoise
