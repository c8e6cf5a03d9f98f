#pragma once

#include <array>
#include <string>

#include "hapdrive/haptics.hpp"
#include "hapdrive/plant.hpp"
#include "hapdrive/track.hpp"

namespace hapdrive::guidance {

/// N: no guidance, G: learned-skill guidance, C: conventional look-ahead guidance.
enum class Method { N, G, C };

char to_char(Method m);
Method method_from_string(const std::string& s);

struct GuidanceGains {
    double K_pid = 0.60;          // N m / deg
    double I_pid = 0.12;          // N m / (deg s)
    double D_pid = 0.06;          // N m s / deg
    double stable_factor = 5.0;   // D_stable = stable_factor * D_s
    double K_pedal = 2.0;         // N m / deg, unilateral pedal assist (= K_a_max)
    double K_p = 7.65;
    double K_d = 1.00;            // deg / m
    double lookahead_time = 1.0;  // s
    double v_M_kmh = 66.0;
    /// Add the ambient self-alignment torque back on top of the guided feedback.
    bool keep_alignment = false;

    double D_stable(const haptics::HapticParams& hp) const { return stable_factor * hp.D_s; }
    /// All assist gains zero: the guided methods collapse to the ambient feedback.
    bool assist_disabled() const { return K_pid == 0.0 && I_pid == 0.0 && D_pid == 0.0 && K_pedal == 0.0; }
};

/// Zero-order hold from 50 Hz to 800 Hz followed by a 16-tap moving average.
class UpsampleFilter {
public:
    static constexpr int kTaps = 16;

    /// New 50-Hz sample. The first sample after a reset fills the whole window.
    void set(double value);
    /// Next 800-Hz output.
    double next();
    void reset() { primed_ = false; }
    bool primed() const { return primed_; }

private:
    std::array<double, kTaps> window_{};
    int head_ = 0;
    double held_ = 0.0;
    bool primed_ = false;
};

/// PID on e_s with the integral taken from the most recent zero of e_s.
/// The accumulator restarts at a tick where e_s is exactly zero or changes
/// sign, and otherwise grows by the trapezoid rule. The derivative is a
/// backward difference, zero on the first tick.
class SteeringPid {
public:
    double update(double e_s, double dt, const GuidanceGains& g);
    void reset();
    double integral() const { return integral_; }
    double derivative() const { return derivative_; }

private:
    bool started_ = false;
    double prev_ = 0.0;
    double integral_ = 0.0;
    double derivative_ = 0.0;
};

/// Assist torque magnitude K e + I int e + D de for given PID terms.
double pid_torque(double e, double integral, double derivative, const GuidanceGains& g);

/// Unilateral pedal assist: k (theta_a - theta_a_hat) at or above the desired angle, else 0.
double nn_pedal_assist(double theta_a, double theta_a_hat, double k = 2.0);

/// theta_s,d = K_p e_p + K_d e_d.
double conventional_desired_steer(double e_p, double e_d, const GuidanceGains& g = {});

/// True at or above the overspeed threshold.
bool overspeed(double v_kmh, const GuidanceGains& g = {});

/// e_a against the full-throttle endpoint below v_M and the zero-throttle endpoint at or above it.
double conventional_pedal_error(double theta_a, double v_kmh, const GuidanceGains& g = {},
                                const haptics::HapticParams& hp = {});

/// Pedal assist for the conventional method: K_pedal * max(0, e_a).
double conventional_pedal_torque(double theta_a, double v_kmh, const GuidanceGains& g = {},
                                 const haptics::HapticParams& hp = {});

struct LookaheadErrors {
    double e_p = 0.0;      // deg, CCW from the heading to the look-ahead point
    double e_d = 0.0;      // m, left of the midline positive
    double e_delta = 0.0;  // deg, heading minus midline tangent
    double s = 0.0;        // closest midline arc length
};

/// Errors of the pose against the first-lane midline; the look-ahead point lies
/// v * lookahead_time further along the midline from the closest point.
LookaheadErrors lookahead_errors(const track::TrackPath& path, const track::Pose& pose, double v,
                                 double lookahead_time = 1.0);

/// Targets published by the 50-Hz loop for the next 16 device ticks.
struct TickTargets {
    bool active = false;          // guidance law drives the feedback
    double theta_s_d = 0.0;       // desired wheel angle
    double theta_a_d = 0.0;       // desired pedal angle (G)
    bool overspeed = false;       // overspeed cue (C)
};

struct FeedbackTorques {
    plant::AxisTorques device;    // torque on each axis, direction of increasing angle
    double steering_assist = 0.0; // guidance part of device.steering
    double pedal_assist = 0.0;    // guidance part of the pedal torque, pushing up
    double pedal_up = 0.0;        // total pedal torque pushing up
};

/// Owns the 800-Hz guidance state: filters and PID.
class GuidanceController {
public:
    GuidanceController(Method m, const GuidanceGains& g = {}, const haptics::HapticParams& hp = {});

    Method method() const { return method_; }
    void set_method(Method m);
    const GuidanceGains& gains() const { return gains_; }

    /// Called once per 50-Hz tick before the device sub-ticks.
    void publish(const TickTargets& t);
    /// Feedback for one device sub-tick.
    FeedbackTorques sub_tick(const plant::DeviceState& dev, double F_fl, double F_fr, double dt);

    void reset();

private:
    Method method_;
    GuidanceGains gains_;
    haptics::HapticParams hp_;
    TickTargets targets_;
    UpsampleFilter steer_filter_;
    UpsampleFilter pedal_filter_;
    SteeringPid pid_;
};

/// Ambient feedback only, as rendered under method N.
FeedbackTorques ambient_feedback(const plant::DeviceState& dev, double F_fl, double F_fr,
                                 const haptics::HapticParams& hp = {});

}  // namespace hapdrive::guidance
