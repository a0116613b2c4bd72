#pragma once

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kjmix {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double inv_two_pi = 1.0 / two_pi;

/// Wraps any finite value into [0, 2*pi).
inline double wrap_radians(double x) {
  double v = std::fmod(x, two_pi);
  if (v < 0.0) v += two_pi;
  if (v >= two_pi) v = 0.0;  // fmod of a tiny negative can round back up to 2*pi
  return v;
}

/// An angle stored by its canonical representative in [0, 2*pi).
class Angle {
 public:
  Angle() = default;
  explicit Angle(double radians) : value_(wrap_radians(radians)) {}
  double radians() const { return value_; }
  friend bool operator==(Angle a, Angle b) { return a.value_ == b.value_; }

 private:
  double value_ = 0.0;
};

/// Signed wrapped difference a - b, in (-pi, pi].
inline double angular_difference(Angle a, Angle b) {
  double d = wrap_radians(a.radians() - b.radians());
  return d > std::numbers::pi ? d - two_pi : d;
}

/// 24h clock mapping: theta = 2*pi*t/24 for t in decimal hours.
inline Angle angle_from_hours(double hours) {
  if (!(hours >= 0.0 && hours < 24.0))
    throw std::out_of_range("hour value outside [0, 24): " + std::to_string(hours));
  return Angle(two_pi * hours / 24.0);
}

inline double hours_from_angle(Angle a) { return a.radians() * 24.0 * inv_two_pi; }

/// Renders an angle as "HH:MM" on the 24h clock, rounded to the nearest minute.
inline std::string clock_hhmm(Angle a) {
  long minutes = std::lround(a.radians() * 24.0 * 60.0 * inv_two_pi) % (24 * 60);
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02ld:%02ld", minutes / 60, minutes % 60);
  return buf;
}

}  // namespace kjmix
