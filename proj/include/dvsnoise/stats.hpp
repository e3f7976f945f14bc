#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "dvsnoise/events.hpp"

namespace dvsnoise {

/// Consecutive-pair transition classes, in the fixed column order used
/// by every CSV this library emits.
enum class TransitionClass : int {
  on_on = 0,
  on_off = 1,
  off_on = 2,
  off_off = 3,
};

inline constexpr const char* transition_class_name(TransitionClass c) {
  switch (c) {
    case TransitionClass::on_on: return "on_on";
    case TransitionClass::on_off: return "on_off";
    case TransitionClass::off_on: return "off_on";
    case TransitionClass::off_off: return "off_off";
  }
  return "?";
}

inline constexpr TransitionClass transition_class(Polarity prev, Polarity next) {
  if (prev == Polarity::on)
    return next == Polarity::on ? TransitionClass::on_on : TransitionClass::on_off;
  return next == Polarity::on ? TransitionClass::off_on : TransitionClass::off_off;
}

/// 2x2 polarity-transition counts over consecutive same-pixel pairs.
struct PairStats {
  // counts[prev][next], indexed by Polarity (off = 0, on = 1).
  std::array<std::array<uint64_t, 2>, 2> counts{};
  uint64_t n_events = 0;
  uint64_t n_active_pixels = 0;

  uint64_t count(TransitionClass c) const {
    switch (c) {
      case TransitionClass::on_on: return counts[1][1];
      case TransitionClass::on_off: return counts[1][0];
      case TransitionClass::off_on: return counts[0][1];
      case TransitionClass::off_off: return counts[0][0];
    }
    return 0;
  }

  uint64_t total_pairs() const {
    return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
  }

  uint64_t opposite_count() const { return counts[0][1] + counts[1][0]; }

  double opposite_fraction() const {
    const uint64_t total = total_pairs();
    return total ? static_cast<double>(opposite_count()) / total : 0.0;
  }
};

struct IsiHistogram {
  TransitionClass cls = TransitionClass::on_on;
  std::vector<double> bin_edges;  // microseconds, strictly increasing
  std::vector<uint64_t> counts;   // size = bin_edges.size() - 1

  uint64_t total() const {
    uint64_t sum = 0;
    for (uint64_t c : counts) sum += c;
    return sum;
  }
};

struct RateEntry {
  uint16_t x = 0;
  uint16_t y = 0;
  double rate_on_hz = 0.0;
  double rate_off_hz = 0.0;
};

using RateTable = std::vector<RateEntry>;

namespace detail {

inline uint32_t pixel_key(const DvsEvent& e) {
  return (static_cast<uint32_t>(e.y) << 16) | e.x;
}

/// Buckets a timestamp-sorted stream per pixel and canonicalizes
/// equal-timestamp ties within a pixel (ON before OFF). Calls
/// fn(prev, next) for every consecutive same-pixel pair.
template <typename Fn>
std::pair<uint64_t, uint64_t> for_each_pixel_pair(
    const std::vector<DvsEvent>& events, Fn&& fn) {
  if (!is_timestamp_sorted(events))
    throw std::invalid_argument("event stream is not timestamp-sorted");

  std::unordered_map<uint32_t, std::vector<DvsEvent>> per_pixel;
  for (const DvsEvent& e : events) per_pixel[pixel_key(e)].push_back(e);

  for (auto& [key, seq] : per_pixel) {
    std::stable_sort(seq.begin(), seq.end(),
                     [](const DvsEvent& a, const DvsEvent& b) {
                       if (a.t_us != b.t_us) return a.t_us < b.t_us;
                       return static_cast<uint8_t>(a.polarity) >
                              static_cast<uint8_t>(b.polarity);
                     });
    for (size_t i = 1; i < seq.size(); ++i) fn(seq[i - 1], seq[i]);
  }
  return {events.size(), per_pixel.size()};
}

}  // namespace detail

/// Counts polarity transitions over consecutive same-pixel pairs.
/// Conservation holds by construction: total pairs = events - active pixels.
inline PairStats pair_transitions(const std::vector<DvsEvent>& events) {
  PairStats stats;
  auto [n_events, n_pixels] = detail::for_each_pixel_pair(
      events, [&](const DvsEvent& prev, const DvsEvent& next) {
        ++stats.counts[static_cast<int>(prev.polarity)]
                      [static_cast<int>(next.polarity)];
      });
  stats.n_events = n_events;
  stats.n_active_pixels = n_pixels;
  return stats;
}

/// Raw per-class inter-spike intervals in microseconds.
inline std::array<std::vector<double>, 4> isi_values_by_class(
    const std::vector<DvsEvent>& events) {
  std::array<std::vector<double>, 4> values;
  detail::for_each_pixel_pair(
      events, [&](const DvsEvent& prev, const DvsEvent& next) {
        const auto c = transition_class(prev.polarity, next.polarity);
        values[static_cast<int>(c)].push_back(
            static_cast<double>(next.t_us - prev.t_us));
      });
  return values;
}

/// Log-spaced ISI histogram edges: t_min * 10^(k / bins_per_decade),
/// extended until the range covers t_max.
inline std::vector<double> isi_bin_edges(int bins_per_decade, double t_min_us,
                                         double t_max_us) {
  if (t_min_us < 1.0)
    throw std::invalid_argument("isi_bin_edges: t_min_us must be >= 1");
  if (!(t_max_us > t_min_us))
    throw std::invalid_argument("isi_bin_edges: t_max_us must exceed t_min_us");
  if (bins_per_decade < 1)
    throw std::invalid_argument("isi_bin_edges: bins_per_decade must be >= 1");
  const double decades = std::log10(t_max_us / t_min_us);
  const int n_bins =
      std::max(1, static_cast<int>(std::ceil(bins_per_decade * decades - 1e-9)));
  std::vector<double> edges(n_bins + 1);
  for (int k = 0; k <= n_bins; ++k)
    edges[k] = t_min_us * std::pow(10.0, static_cast<double>(k) / bins_per_decade);
  return edges;
}

inline constexpr int kDefaultBinsPerDecade = 8;
inline constexpr double kDefaultIsiMinUs = 10.0;
inline constexpr double kDefaultIsiMaxUs = 1e7;

/*
 * Splits same-pixel consecutive-pair ISIs into one histogram per
 * transition class. ISIs below t_min_us (including the 0 us ties left
 * by microsecond quantization) land in the first bin; ISIs beyond the
 * top edge land in the last.
 */
inline std::array<IsiHistogram, 4> isi_by_class(
    const std::vector<DvsEvent>& events,
    int bins_per_decade = kDefaultBinsPerDecade,
    double t_min_us = kDefaultIsiMinUs, double t_max_us = kDefaultIsiMaxUs) {
  const std::vector<double> edges =
      isi_bin_edges(bins_per_decade, t_min_us, t_max_us);
  const int n_bins = static_cast<int>(edges.size()) - 1;
  const double log_min = std::log10(t_min_us);

  std::array<IsiHistogram, 4> histograms;
  for (int c = 0; c < 4; ++c) {
    histograms[c].cls = static_cast<TransitionClass>(c);
    histograms[c].bin_edges = edges;
    histograms[c].counts.assign(n_bins, 0);
  }

  detail::for_each_pixel_pair(
      events, [&](const DvsEvent& prev, const DvsEvent& next) {
        const auto c = static_cast<int>(
            transition_class(prev.polarity, next.polarity));
        const double isi = static_cast<double>(next.t_us - prev.t_us);
        int bin = 0;
        if (isi >= t_min_us) {
          bin = static_cast<int>(bins_per_decade * (std::log10(isi) - log_min));
          bin = std::clamp(bin, 0, n_bins - 1);
        }
        ++histograms[c].counts[bin];
      });
  return histograms;
}

/// Per-pixel ON/OFF event rates over the analyzed window, sorted by
/// (y, x). Pixels with no events are omitted.
inline RateTable per_pixel_rates(const std::vector<DvsEvent>& events,
                                 double duration_s) {
  if (!(duration_s > 0.0))
    throw std::invalid_argument("per_pixel_rates: duration must be > 0");
  std::unordered_map<uint32_t, std::pair<uint64_t, uint64_t>> counts;
  for (const DvsEvent& e : events) {
    auto& [n_on, n_off] = counts[detail::pixel_key(e)];
    (e.polarity == Polarity::on ? n_on : n_off)++;
  }
  RateTable table;
  table.reserve(counts.size());
  for (const auto& [key, c] : counts)
    table.push_back(RateEntry{static_cast<uint16_t>(key & 0xFFFF),
                              static_cast<uint16_t>(key >> 16),
                              static_cast<double>(c.first) / duration_s,
                              static_cast<double>(c.second) / duration_s});
  std::sort(table.begin(), table.end(), [](const RateEntry& a, const RateEntry& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  return table;
}

/// Nearest-rank percentile of the per-pixel total rate magnitude
/// sqrt(rate_on^2 + rate_off^2).
inline double rate_percentile_radius(const RateTable& table, double percentile) {
  if (table.empty())
    throw std::invalid_argument("rate_percentile_radius: empty rate table");
  if (!(percentile > 0.0) || !(percentile < 100.0))
    throw std::invalid_argument(
        "rate_percentile_radius: percentile must be in (0, 100)");
  std::vector<double> magnitudes;
  magnitudes.reserve(table.size());
  for (const RateEntry& e : table)
    magnitudes.push_back(std::hypot(e.rate_on_hz, e.rate_off_hz));
  std::sort(magnitudes.begin(), magnitudes.end());
  const auto n = static_cast<double>(magnitudes.size());
  auto rank = static_cast<size_t>(std::ceil(percentile / 100.0 * n));
  rank = std::clamp<size_t>(rank, 1, magnitudes.size());
  return magnitudes[rank - 1];
}

/// Median of a sample; NaN when empty, mean of the middle two when even.
inline double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace dvsnoise
