// Demonstrates the noise event-pair statistics on one pixel: a short
// refractory period chains opposite-polarity events, a long one breaks
// the chain and cuts the rate.
#include <cstdio>
#include <vector>

#include "dvsnoise/pixel.hpp"
#include "dvsnoise/stats.hpp"

using namespace dvsnoise;

namespace {

void run_and_print(const char* label, const PixelParams& params, double duration) {
  const auto events = simulate_pixel(params, duration, 2024);
  const PairStats stats = pair_transitions(events);
  const auto isi = isi_values_by_class(events);

  std::printf("%s (tau_refr = %.0f us)\n", label, params.tau_refr * 1e6);
  std::printf("  events: %zu in %.0f s (%.1f Hz)\n", events.size(), duration,
              static_cast<double>(events.size()) / duration);
  std::printf("  consecutive-pair polarity transitions:\n");
  for (TransitionClass c : {TransitionClass::on_on, TransitionClass::on_off,
                            TransitionClass::off_on, TransitionClass::off_off}) {
    const auto values = isi[static_cast<int>(c)];
    std::printf("    %-8s %8llu pairs, median ISI %8.0f us\n",
                transition_class_name(c),
                static_cast<unsigned long long>(stats.count(c)),
                median(values));
  }
  std::printf("  opposite-polarity fraction: %.3f\n\n",
              stats.opposite_fraction());
}

}  // namespace

int main() {
  PixelParams params;
  params.sigma_noise = 0.1;
  params.theta_on = 0.3;
  params.theta_off = 0.3;
  params.f3db = 100.0;
  params.dt = default_dt(params.f3db);

  const double tau_corr = noise_correlation_time(params.f3db);
  std::printf("filtered-noise pixel, theta = 3 sigma, f3db = %.0f Hz "
              "(correlation time %.2f ms)\n\n",
              params.f3db, tau_corr * 1e3);

  params.tau_refr = 1e-5;
  run_and_print("pairing regime", params, 2000.0);

  params.tau_refr = 10.0 * tau_corr;
  run_and_print("decoupled regime", params, 2000.0);
  return 0;
}
