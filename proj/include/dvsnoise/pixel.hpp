#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dvsnoise/events.hpp"
#include "dvsnoise/rng.hpp"

namespace dvsnoise {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Default timestep: 1/(50 f3db), well below the 1/(20 f3db) validity
/// bound so threshold-crossing detection is insensitive to step size.
inline constexpr double default_dt(double f3db_hz) {
  return 1.0 / (50.0 * f3db_hz);
}

/// Correlation time of the filtered noise, 1/(2 pi f3db).
inline constexpr double noise_correlation_time(double f3db_hz) {
  return 1.0 / (kTwoPi * f3db_hz);
}

/*
 * Complete configuration of one pixel: log-intensity contrast thresholds,
 * refractory period, photoreceptor corner frequency, the stationary noise
 * amplitude of the filtered photoreceptor signal, and the simulation
 * timestep. Thresholds and the noise amplitude share the same
 * dimensionless log-intensity units.
 */
struct PixelParams {
  double theta_on = 0.2;
  double theta_off = 0.2;
  double tau_refr = 0.0;   // seconds
  double f3db = 1000.0;    // Hz
  double sigma_noise = 0.0;
  double dt = default_dt(1000.0);  // seconds

  void validate() const {
    auto fail = [](const std::string& msg) {
      throw std::invalid_argument("PixelParams: " + msg);
    };
    if (!std::isfinite(theta_on) || !std::isfinite(theta_off) ||
        !std::isfinite(tau_refr) || !std::isfinite(f3db) ||
        !std::isfinite(sigma_noise) || !std::isfinite(dt))
      fail("all fields must be finite");
    if (theta_on <= 0.0) fail("theta_on must be > 0");
    if (theta_off <= 0.0) fail("theta_off must be > 0");
    if (tau_refr < 0.0) fail("tau_refr must be >= 0");
    if (f3db <= 0.0) fail("f3db must be > 0");
    if (sigma_noise < 0.0) fail("sigma_noise must be >= 0");
    if (dt <= 0.0) fail("dt must be > 0");
    if (dt > 1.0 / (20.0 * f3db))
      fail("dt must be <= 1/(20*f3db) to resolve the noise correlation time");
  }
};

inline PixelParams make_pixel_params_checked(PixelParams p) {
  p.validate();
  return p;
}

/*
 * Precomputed coefficients of the exact Ornstein-Uhlenbeck
 * discretization with correlation time tau = 1/(2 pi f3db):
 *
 *   x' = decay * x + innovation_gain * g,   g ~ N(0, 1)
 *
 * decay = exp(-dt/tau); innovation_gain = sigma * sqrt(1 - decay^2),
 * which keeps the stationary standard deviation at sigma for any dt.
 */
struct OuCoeffs {
  double decay = 0.0;
  double innovation_gain = 0.0;

  OuCoeffs() = default;
  OuCoeffs(double sigma_noise, double f3db, double dt) {
    decay = std::exp(-dt / noise_correlation_time(f3db));
    innovation_gain = sigma_noise * std::sqrt(1.0 - decay * decay);
  }
};

/// State of one filtered-Gaussian noise process: the current sample and
/// its private deterministic random stream.
struct NoiseState {
  double value = 0.0;
  GaussianRng rng;

  explicit NoiseState(uint64_t seed = 0) : rng(seed) {}
  bool operator==(const NoiseState&) const = default;
};

/// Advances the noise process one step and returns the new sample.
inline double noise_step(NoiseState& state, const OuCoeffs& coeffs) {
  state.value = coeffs.decay * state.value +
                coeffs.innovation_gain * state.rng.next();
  return state.value;
}

inline double noise_step(NoiseState& state, double sigma_noise, double f3db,
                         double dt) {
  return noise_step(state, OuCoeffs(sigma_noise, f3db, dt));
}

/*
 * Change-detector memory of one pixel. The reference level is the signal
 * value memorized at the last reset release; while in_refractory the
 * change amplifier is held in reset and no event can be emitted.
 */
struct PixelState {
  double v_ref = 0.0;
  bool in_refractory = false;
  double refractory_end = 0.0;  // absolute seconds
  double last_t = -std::numeric_limits<double>::infinity();
};

/*
 * One step of the event-generation state machine.
 *
 * While refractory and t < refractory_end nothing happens. At
 * t >= refractory_end the reset releases: v_ref snaps to the current
 * sample and the threshold test proceeds on the same call. An armed
 * pixel emits ON when sample - v_ref > theta_on and OFF when
 * v_ref - sample > theta_off; if one step crosses both thresholds the
 * polarity with the larger normalized excursion wins, ON on an exact
 * tie. Emission re-enters reset until t + tau_refr.
 *
 * t must be strictly increasing across calls; violating that is a
 * caller bug and throws.
 */
inline std::optional<Polarity> pixel_step(PixelState& state, double sample,
                                          double t, const PixelParams& params) {
  if (t <= state.last_t)
    throw std::logic_error("pixel_step: non-monotonic timestamps");
  state.last_t = t;

  if (state.in_refractory) {
    if (t < state.refractory_end) return std::nullopt;
    state.v_ref = sample;
    state.in_refractory = false;
  }

  const double dev_on = sample - state.v_ref;
  const double dev_off = state.v_ref - sample;
  const bool on = dev_on > params.theta_on;
  const bool off = dev_off > params.theta_off;
  if (!on && !off) return std::nullopt;

  Polarity polarity;
  if (on && off) {
    polarity = (dev_on / params.theta_on >= dev_off / params.theta_off)
                   ? Polarity::on
                   : Polarity::off;
  } else {
    polarity = on ? Polarity::on : Polarity::off;
  }
  state.in_refractory = true;
  state.refractory_end = t + params.tau_refr;
  return polarity;
}

/// Exports internal double-precision seconds as integer microseconds.
inline uint64_t to_micros(double t_seconds) {
  return static_cast<uint64_t>(std::floor(t_seconds * 1e6));
}

/*
 * Simulates one pixel for the given duration. The run is a pure function
 * of (params, duration, seed): the reference level is initialized to the
 * first noise sample (so startup emits no artifact event) and the noise
 * stream is derived from the seed alone.
 */
inline std::vector<DvsEvent> simulate_pixel(const PixelParams& params,
                                            double duration, uint64_t seed,
                                            uint16_t x = 0, uint16_t y = 0) {
  params.validate();
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw std::invalid_argument("simulate_pixel: duration must be > 0");
  const double steps_real = duration / params.dt;
  if (steps_real >= 9.0e15)
    throw std::invalid_argument(
        "simulate_pixel: duration/dt overflows the step counter");
  const uint64_t n_steps = static_cast<uint64_t>(steps_real);

  const OuCoeffs coeffs(params.sigma_noise, params.f3db, params.dt);
  NoiseState noise(derive_stream_seed(seed, x, y, kStreamPixelNoise));

  PixelState pixel;
  pixel.v_ref = noise_step(noise, coeffs);
  pixel.last_t = 0.0;

  std::vector<DvsEvent> events;
  for (uint64_t i = 1; i <= n_steps; ++i) {
    const double sample = noise_step(noise, coeffs);
    const double t = static_cast<double>(i) * params.dt;
    if (auto polarity = pixel_step(pixel, sample, t, params))
      events.push_back(DvsEvent{to_micros(t), x, y, *polarity});
  }
  return events;
}

}  // namespace dvsnoise
