#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dvsnoise/events.hpp"
#include "dvsnoise/pixel.hpp"
#include "dvsnoise/rng.hpp"

namespace dvsnoise {

/*
 * Array-level configuration: nominal pixel parameters plus the
 * per-pixel threshold mismatch model. Mismatch multiplies each
 * threshold by an independent lognormal factor with median 1 and
 * log-std mismatch_sigma_thresh, so thresholds stay positive. Pixel
 * (x, y) always sees the same factors for a given master_seed.
 */
struct ArrayConfig {
  uint32_t width = 1;
  uint32_t height = 1;
  PixelParams base;
  double mismatch_sigma_thresh = 0.0;
  uint64_t master_seed = 0;

  void validate() const {
    auto fail = [](const std::string& msg) {
      throw std::invalid_argument("ArrayConfig: " + msg);
    };
    if (width < 1 || height < 1) fail("width and height must be >= 1");
    if (width > 0xFFFF || height > 0xFFFF)
      fail("width and height must fit 16-bit event coordinates");
    if (!(mismatch_sigma_thresh >= 0.0) ||
        !std::isfinite(mismatch_sigma_thresh))
      fail("mismatch_sigma_thresh must be finite and >= 0");
    base.validate();
  }
};

/*
 * Comparator and refractory bias operating point. Thresholds follow the
 * log ratios of the comparator currents; the refractory period follows
 * a linear charging model of the reset node.
 */
struct BiasPoint {
  double i_on = 0.0;      // amperes
  double i_off = 0.0;     // amperes
  double i_d = 0.0;       // amperes
  double i_refr = 0.0;    // amperes
  double c_reset = 0.0;   // farads
  double v_swing = 0.0;   // volts
  double k_thresh = 1.0;  // dimensionless

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(i_on) || !positive(i_off) || !positive(i_d) ||
        !positive(i_refr) || !positive(c_reset) || !positive(v_swing) ||
        !positive(k_thresh))
      throw std::invalid_argument("BiasPoint: all fields must be positive");
  }
};

/// theta_on = k * ln(i_on/i_d), theta_off = k * ln(i_d/i_off).
/// Requires i_on > i_d > i_off so both log ratios are positive.
inline std::pair<double, double> bias_to_thresholds(const BiasPoint& bp) {
  bp.validate();
  if (bp.i_on <= bp.i_d)
    throw std::invalid_argument(
        "bias_to_thresholds: requires i_on > i_d (theta_on would be <= 0)");
  if (bp.i_off >= bp.i_d)
    throw std::invalid_argument(
        "bias_to_thresholds: requires i_off < i_d (theta_off would be <= 0)");
  return {bp.k_thresh * std::log(bp.i_on / bp.i_d),
          bp.k_thresh * std::log(bp.i_d / bp.i_off)};
}

/// Linear reset-node charging: tau_refr = C * V / I_refr.
inline double bias_to_refractory(const BiasPoint& bp) {
  bp.validate();
  return bp.c_reset * bp.v_swing / bp.i_refr;
}

/*
 * Realizes the per-pixel parameters for (x, y): base parameters with
 * thresholds scaled by two independent lognormal mismatch factors drawn
 * from a stream derived from (master_seed, x, y). Stable across calls.
 */
inline PixelParams make_pixel_params(const ArrayConfig& cfg, uint32_t x,
                                     uint32_t y) {
  cfg.validate();
  if (x >= cfg.width || y >= cfg.height)
    throw std::out_of_range("make_pixel_params: pixel (" + std::to_string(x) +
                            ", " + std::to_string(y) + ") out of bounds");
  PixelParams p = cfg.base;
  if (cfg.mismatch_sigma_thresh > 0.0) {
    GaussianRng rng(derive_stream_seed(cfg.master_seed, x, y, kStreamMismatch));
    p.theta_on *= std::exp(cfg.mismatch_sigma_thresh * rng.next());
    p.theta_off *= std::exp(cfg.mismatch_sigma_thresh * rng.next());
  }
  return p;
}

inline constexpr uint64_t kDefaultMaxEvents = 100'000'000;

/*
 * Simulates the full array and returns one stream in canonical
 * (t, y, x, polarity) order. Pixels are independent: each derives its
 * own noise stream from (master_seed, x, y), so the result is identical
 * for any thread count. n_threads = 0 picks the hardware concurrency.
 *
 * max_events bounds the merged stream; exceeding it throws with the cap
 * in the message.
 */
inline std::vector<DvsEvent> simulate_array(const ArrayConfig& cfg,
                                            double duration,
                                            uint64_t max_events = kDefaultMaxEvents,
                                            unsigned n_threads = 0) {
  cfg.validate();
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw std::invalid_argument("simulate_array: duration must be > 0");

  const uint64_t n_pixels =
      static_cast<uint64_t>(cfg.width) * static_cast<uint64_t>(cfg.height);
  if (n_threads == 0) {
    n_threads = std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
  }
  if (n_threads > n_pixels) n_threads = static_cast<unsigned>(n_pixels);

  // Per-pixel slots keep the merge independent of completion order.
  std::vector<std::vector<DvsEvent>> per_pixel(n_pixels);
  auto worker = [&](uint64_t begin, uint64_t end) {
    for (uint64_t id = begin; id < end; ++id) {
      const uint32_t x = static_cast<uint32_t>(id % cfg.width);
      const uint32_t y = static_cast<uint32_t>(id / cfg.width);
      const PixelParams params = make_pixel_params(cfg, x, y);
      per_pixel[id] =
          simulate_pixel(params, duration, cfg.master_seed,
                         static_cast<uint16_t>(x), static_cast<uint16_t>(y));
    }
  };

  if (n_threads <= 1) {
    worker(0, n_pixels);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    const uint64_t chunk = (n_pixels + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
      const uint64_t begin = t * chunk;
      const uint64_t end = std::min(n_pixels, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(worker, begin, end);
    }
    for (auto& th : threads) th.join();
  }

  uint64_t total = 0;
  for (const auto& v : per_pixel) total += v.size();
  if (total > max_events)
    throw std::runtime_error("simulate_array: event count " +
                             std::to_string(total) + " exceeds cap " +
                             std::to_string(max_events));

  std::vector<DvsEvent> merged;
  merged.reserve(total);
  for (auto& v : per_pixel) {
    merged.insert(merged.end(), v.begin(), v.end());
    v.clear();
    v.shrink_to_fit();
  }
  canonical_sort(merged);
  return merged;
}

}  // namespace dvsnoise
