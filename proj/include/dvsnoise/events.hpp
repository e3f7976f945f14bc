#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace dvsnoise {

enum class Polarity : uint8_t { off = 0, on = 1 };

inline constexpr char polarity_digit(Polarity p) {
  return p == Polarity::on ? '1' : '0';
}

/// One DVS event. Timestamps are integer microseconds; coordinates fit
/// the 16-bit address range of the binary event format.
struct DvsEvent {
  uint64_t t_us = 0;
  uint16_t x = 0;
  uint16_t y = 0;
  Polarity polarity = Polarity::off;

  bool operator==(const DvsEvent&) const = default;
};

/// Canonical stream order: (t, y, x, polarity), ON before OFF on ties.
/// Array merging, statistics tie-breaking, and the permutation-safety
/// contract all use this single ordering.
inline bool canonical_less(const DvsEvent& a, const DvsEvent& b) {
  if (a.t_us != b.t_us) return a.t_us < b.t_us;
  if (a.y != b.y) return a.y < b.y;
  if (a.x != b.x) return a.x < b.x;
  return static_cast<uint8_t>(a.polarity) > static_cast<uint8_t>(b.polarity);
}

inline void canonical_sort(std::vector<DvsEvent>& events) {
  std::sort(events.begin(), events.end(), canonical_less);
}

inline bool is_timestamp_sorted(const std::vector<DvsEvent>& events) {
  for (size_t i = 1; i < events.size(); ++i)
    if (events[i].t_us < events[i - 1].t_us) return false;
  return true;
}

}  // namespace dvsnoise
