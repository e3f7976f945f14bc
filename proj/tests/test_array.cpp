#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dvsnoise/array.hpp"

using namespace dvsnoise;

namespace {

ArrayConfig small_config() {
  ArrayConfig cfg;
  cfg.width = 8;
  cfg.height = 8;
  cfg.base.theta_on = 0.2;
  cfg.base.theta_off = 0.2;
  cfg.base.tau_refr = 1e-5;
  cfg.base.f3db = 1000.0;
  cfg.base.sigma_noise = 0.1;
  cfg.base.dt = default_dt(1000.0);
  cfg.master_seed = 21;
  return cfg;
}

}  // namespace

TEST_CASE("bias_to_thresholds evaluates the log current ratios") {
  BiasPoint bp;
  bp.i_d = 1e-9;
  bp.i_refr = 1e-9;
  bp.c_reset = 1e-14;
  bp.v_swing = 1.0;
  bp.k_thresh = 1.0;

  SUBCASE("unit log ratio") {
    bp.i_on = bp.i_d * std::exp(1.0);
    bp.i_off = bp.i_d / std::exp(1.0);
    const auto [on, off] = bias_to_thresholds(bp);
    CHECK(on == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(off == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("0.30 threshold ratio operating point") {
    bp.i_on = bp.i_d * std::exp(0.3);
    bp.i_off = bp.i_d / std::exp(1.0);
    const auto [on, off] = bias_to_thresholds(bp);
    CHECK(on == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(off == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(on / off == doctest::Approx(0.30).epsilon(1e-12));
  }

  SUBCASE("doubled currents with k = 0.5") {
    bp.i_on = 2.0 * bp.i_d;
    bp.i_off = 0.5 * bp.i_d;
    bp.k_thresh = 0.5;
    const auto [on, off] = bias_to_thresholds(bp);
    // Independent route to the same number: ln 2 via log1p.
    const double expected = 0.5 * std::log1p(1.0);
    CHECK(on == doctest::Approx(expected).epsilon(1e-12));
    CHECK(off == doctest::Approx(expected).epsilon(1e-12));
    CHECK(on == doctest::Approx(0.34657).epsilon(1e-4));
  }

  SUBCASE("current ordering violations name the offending pair") {
    bp.i_on = bp.i_d;
    bp.i_off = bp.i_d / 2;
    try {
      bias_to_thresholds(bp);
      FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("i_on > i_d") != std::string::npos);
    }
    bp.i_on = 2 * bp.i_d;
    bp.i_off = bp.i_d;
    try {
      bias_to_thresholds(bp);
      FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("i_off < i_d") != std::string::npos);
    }
  }

  SUBCASE("non-positive fields are rejected") {
    bp.i_on = 2 * bp.i_d;
    bp.i_off = bp.i_d / 2;
    bp.c_reset = 0.0;
    CHECK_THROWS_AS(bias_to_thresholds(bp), std::invalid_argument);
  }
}

TEST_CASE("bias_to_refractory follows the linear charging model") {
  BiasPoint bp;
  bp.i_on = 2e-9;
  bp.i_off = 0.5e-9;
  bp.i_d = 1e-9;
  bp.c_reset = 10e-15;
  bp.v_swing = 1.0;

  // Fig.-4-style sweep endpoints of the refractory bias current.
  bp.i_refr = 118e-12;
  CHECK(bias_to_refractory(bp) == doctest::Approx(84.7e-6).epsilon(1e-3));
  bp.i_refr = 8.7e-9;
  CHECK(bias_to_refractory(bp) == doctest::Approx(1.149e-6).epsilon(1e-3));

  // Exact inverse proportionality.
  bp.i_refr = 200e-12;
  const double tau = bias_to_refractory(bp);
  bp.i_refr = 400e-12;
  CHECK(bias_to_refractory(bp) == 0.5 * tau);
}

TEST_CASE("make_pixel_params with zero mismatch copies the base") {
  ArrayConfig cfg = small_config();
  cfg.mismatch_sigma_thresh = 0.0;
  for (uint32_t y = 0; y < cfg.height; ++y)
    for (uint32_t x = 0; x < cfg.width; ++x) {
      const PixelParams p = make_pixel_params(cfg, x, y);
      CHECK(p.theta_on == cfg.base.theta_on);
      CHECK(p.theta_off == cfg.base.theta_off);
      CHECK(p.tau_refr == cfg.base.tau_refr);
    }
}

TEST_CASE("make_pixel_params is a stable pure function of seed and position") {
  ArrayConfig cfg = small_config();
  cfg.mismatch_sigma_thresh = 0.25;
  const PixelParams a = make_pixel_params(cfg, 3, 5);
  const PixelParams b = make_pixel_params(cfg, 3, 5);
  CHECK(a.theta_on == b.theta_on);
  CHECK(a.theta_off == b.theta_off);
  const PixelParams c = make_pixel_params(cfg, 5, 3);
  CHECK(a.theta_on != c.theta_on);
  CHECK(a.theta_on > 0.0);
  CHECK(a.theta_off > 0.0);

  cfg.master_seed += 1;
  const PixelParams d = make_pixel_params(cfg, 3, 5);
  CHECK(a.theta_on != d.theta_on);
}

TEST_CASE("out-of-bounds pixel coordinates are rejected") {
  const ArrayConfig cfg = small_config();
  CHECK_THROWS_AS(make_pixel_params(cfg, cfg.width, 0), std::out_of_range);
  CHECK_THROWS_AS(make_pixel_params(cfg, 0, cfg.height), std::out_of_range);
}

TEST_CASE("mismatch realizes the configured lognormal spread") {
  ArrayConfig cfg = small_config();
  cfg.width = 64;
  cfg.height = 64;
  cfg.mismatch_sigma_thresh = 0.2;

  std::vector<double> log_on, log_off;
  for (uint32_t y = 0; y < cfg.height; ++y)
    for (uint32_t x = 0; x < cfg.width; ++x) {
      const PixelParams p = make_pixel_params(cfg, x, y);
      log_on.push_back(std::log(p.theta_on / cfg.base.theta_on));
      log_off.push_back(std::log(p.theta_off / cfg.base.theta_off));
    }

  auto moments = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, std::sqrt(ss / static_cast<double>(v.size()))};
  };
  const auto [mean_on, std_on] = moments(log_on);
  const auto [mean_off, std_off] = moments(log_off);

  // Median-1 factors: log factors centred on zero with the configured std.
  CHECK(std::fabs(mean_on) < 0.02);
  CHECK(std::fabs(mean_off) < 0.02);
  CHECK(std_on == doctest::Approx(0.2).epsilon(0.05));
  CHECK(std_off == doctest::Approx(0.2).epsilon(0.05));

  // Independence of the ON and OFF factors across the array.
  double cov = 0.0;
  for (size_t i = 0; i < log_on.size(); ++i)
    cov += (log_on[i] - mean_on) * (log_off[i] - mean_off);
  cov /= static_cast<double>(log_on.size());
  const double corr = cov / (std_on * std_off);
  CHECK(std::fabs(corr) < 3.0 / std::sqrt(static_cast<double>(log_on.size())));
}

TEST_CASE("a 1x1 array reduces to simulate_pixel") {
  ArrayConfig cfg = small_config();
  cfg.width = 1;
  cfg.height = 1;
  cfg.mismatch_sigma_thresh = 0.1;
  const auto array_events = simulate_array(cfg, 5.0);
  const auto pixel_events =
      simulate_pixel(make_pixel_params(cfg, 0, 0), 5.0, cfg.master_seed, 0, 0);
  REQUIRE_FALSE(array_events.empty());
  CHECK(array_events == pixel_events);
}

TEST_CASE("zero noise amplitude produces an empty stream for any array") {
  ArrayConfig cfg = small_config();
  cfg.base.sigma_noise = 0.0;
  CHECK(simulate_array(cfg, 2.0).empty());
}

TEST_CASE("array output is canonically ordered and scheduling-invariant") {
  ArrayConfig cfg = small_config();
  cfg.width = 32;
  cfg.height = 32;
  cfg.mismatch_sigma_thresh = 0.15;

  const auto serial = simulate_array(cfg, 1.0, kDefaultMaxEvents, 1);
  const auto parallel = simulate_array(cfg, 1.0, kDefaultMaxEvents, 4);
  const auto repeat = simulate_array(cfg, 1.0, kDefaultMaxEvents, 3);

  REQUIRE(serial.size() > 1000);
  CHECK(serial == parallel);
  CHECK(serial == repeat);

  for (size_t i = 1; i < serial.size(); ++i)
    CHECK_FALSE(canonical_less(serial[i], serial[i - 1]));
}

TEST_CASE("the event cap aborts oversized runs and reports the cap") {
  ArrayConfig cfg = small_config();
  try {
    simulate_array(cfg, 5.0, 100);
    FAIL("expected the cap to trigger");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("100") != std::string::npos);
  }
}

TEST_CASE("array configuration validation") {
  ArrayConfig cfg = small_config();
  cfg.width = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.mismatch_sigma_thresh = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.base.dt = 1.0;
  CHECK_THROWS_AS(simulate_array(cfg, 1.0), std::invalid_argument);
}
