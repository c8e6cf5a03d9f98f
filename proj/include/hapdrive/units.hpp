#pragma once

#include <numbers>

namespace hapdrive::units {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }
constexpr double kmh2ms(double kmh) { return kmh / 3.6; }
constexpr double ms2kmh(double ms) { return ms * 3.6; }

// Simulation timing. The vehicle runs at 50 Hz, the devices at 800 Hz.
inline constexpr int kSimRateHz = 50;
inline constexpr int kDeviceRateHz = 800;
inline constexpr int kSubTicks = kDeviceRateHz / kSimRateHz;
inline constexpr double kSimDt = 1.0 / kSimRateHz;
inline constexpr double kDeviceDt = 1.0 / kDeviceRateHz;
static_assert(kSubTicks * kSimRateHz == kDeviceRateHz);

// Speed the drivers aim for: the true speed at which the speedometer shows 60 km/h.
inline constexpr double kTargetSpeedKmh = 62.64;
inline constexpr double kTargetSpeed = kmh2ms(kTargetSpeedKmh);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double rad);

}  // namespace hapdrive::units
