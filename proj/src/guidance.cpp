#include "hapdrive/guidance.hpp"

#include <algorithm>
#include <cmath>

#include "hapdrive/error.hpp"
#include "hapdrive/units.hpp"

namespace hapdrive::guidance {

char to_char(Method m)
{
    switch (m) {
    case Method::N: return 'N';
    case Method::G: return 'G';
    case Method::C: return 'C';
    }
    return '?';
}

Method method_from_string(const std::string& s)
{
    if (s == "N") {
        return Method::N;
    }
    if (s == "G") {
        return Method::G;
    }
    if (s == "C") {
        return Method::C;
    }
    throw ConfigInvalid("unknown method '" + s + "' (expected N, G or C)");
}

void UpsampleFilter::set(double value)
{
    held_ = value;
    if (!primed_) {
        window_.fill(value);
        head_ = 0;
        primed_ = true;
    }
}

double UpsampleFilter::next()
{
    window_[head_] = held_;
    head_ = (head_ + 1) % kTaps;
    double sum = 0.0;
    for (const double v : window_) {
        sum += v;
    }
    return sum / kTaps;
}

double SteeringPid::update(double e_s, double dt, const GuidanceGains& g)
{
    if (!started_) {
        started_ = true;
        integral_ = 0.0;
        derivative_ = 0.0;
    } else {
        derivative_ = (e_s - prev_) / dt;
        if (e_s == 0.0 || (prev_ != 0.0 && (e_s > 0.0) != (prev_ > 0.0))) {
            integral_ = 0.0;
        } else {
            integral_ += 0.5 * (e_s + prev_) * dt;
        }
    }
    prev_ = e_s;
    return pid_torque(e_s, integral_, derivative_, g);
}

void SteeringPid::reset()
{
    started_ = false;
    prev_ = 0.0;
    integral_ = 0.0;
    derivative_ = 0.0;
}

double pid_torque(double e, double integral, double derivative, const GuidanceGains& g)
{
    return g.K_pid * e + g.I_pid * integral + g.D_pid * derivative;
}

double nn_pedal_assist(double theta_a, double theta_a_hat, double k)
{
    return haptics::endpoint_torque(theta_a, theta_a_hat, k);
}

double conventional_desired_steer(double e_p, double e_d, const GuidanceGains& g)
{
    return g.K_p * e_p + g.K_d * e_d;
}

bool overspeed(double v_kmh, const GuidanceGains& g) { return v_kmh >= g.v_M_kmh; }

double conventional_pedal_error(double theta_a, double v_kmh, const GuidanceGains& g,
                                const haptics::HapticParams& hp)
{
    return overspeed(v_kmh, g) ? theta_a - hp.theta_a_min : theta_a - hp.theta_a_max;
}

double conventional_pedal_torque(double theta_a, double v_kmh, const GuidanceGains& g,
                                 const haptics::HapticParams& hp)
{
    return g.K_pedal * std::max(0.0, conventional_pedal_error(theta_a, v_kmh, g, hp));
}

LookaheadErrors lookahead_errors(const track::TrackPath& path, const track::Pose& pose, double v,
                                 double lookahead_time)
{
    const track::PathQuery q = track::closest_midline_point(path, {pose.x, pose.y});
    LookaheadErrors e;
    e.s = q.s;
    e.e_d = q.lateral;
    e.e_delta = units::rad2deg(units::wrap_angle(pose.heading - q.tangent_heading));
    const track::Point target = path.point_at(q.s + std::max(0.0, v) * lookahead_time);
    const double dx = target.x - pose.x;
    const double dy = target.y - pose.y;
    if (std::hypot(dx, dy) < 1e-9) {
        e.e_p = -e.e_delta;
    } else {
        e.e_p = units::rad2deg(units::wrap_angle(std::atan2(dy, dx) - pose.heading));
    }
    return e;
}

FeedbackTorques ambient_feedback(const plant::DeviceState& dev, double F_fl, double F_fr,
                                 const haptics::HapticParams& hp)
{
    FeedbackTorques out;
    out.device.steering = haptics::ambient_steering_torque(F_fl, F_fr, dev.steering.rate, hp);
    out.pedal_up = haptics::accelerator_torque(dev.accel.angle, dev.accel.rate, hp);
    out.device.accel = -out.pedal_up;
    out.device.brake = -haptics::brake_torque(dev.brake.angle, dev.brake.rate, hp);
    return out;
}

GuidanceController::GuidanceController(Method m, const GuidanceGains& g, const haptics::HapticParams& hp)
    : method_(m), gains_(g), hp_(hp)
{
}

void GuidanceController::set_method(Method m)
{
    if (m != method_) {
        method_ = m;
        reset();
    }
}

void GuidanceController::reset()
{
    targets_ = {};
    steer_filter_.reset();
    pedal_filter_.reset();
    pid_.reset();
}

void GuidanceController::publish(const TickTargets& t)
{
    targets_ = t;
    if (!t.active || method_ == Method::N || gains_.assist_disabled()) {
        targets_.active = false;
        steer_filter_.reset();
        pedal_filter_.reset();
        pid_.reset();
        return;
    }
    steer_filter_.set(t.theta_s_d);
    pedal_filter_.set(t.theta_a_d);
}

FeedbackTorques GuidanceController::sub_tick(const plant::DeviceState& dev, double F_fl, double F_fr, double dt)
{
    if (!targets_.active) {
        return ambient_feedback(dev, F_fl, F_fr, hp_);
    }
    FeedbackTorques out;
    const double theta_s_d = steer_filter_.next();
    const double assist = pid_.update(dev.steering.angle - theta_s_d, dt, gains_);
    out.steering_assist = -assist;
    out.device.steering = -assist - gains_.D_stable(hp_) * dev.steering.rate;
    if (gains_.keep_alignment) {
        out.device.steering += haptics::ambient_steering_torque(F_fl, F_fr, 0.0, hp_);
    }

    const double theta_a_d = pedal_filter_.next();
    const double theta_a = dev.accel.angle;
    if (method_ == Method::G) {
        out.pedal_assist = nn_pedal_assist(theta_a, theta_a_d, gains_.K_pedal);
    } else {
        const double endpoint = targets_.overspeed ? hp_.theta_a_min : hp_.theta_a_max;
        out.pedal_assist = gains_.K_pedal * std::max(0.0, theta_a - endpoint);
    }
    out.pedal_up = hp_.K_a * (theta_a - hp_.theta_a0) + out.pedal_assist + hp_.D_a * dev.accel.rate +
                   hp_.gravity(theta_a);
    out.device.accel = -out.pedal_up;
    out.device.brake = -haptics::brake_torque(dev.brake.angle, dev.brake.rate, hp_);
    return out;
}

}  // namespace hapdrive::guidance
