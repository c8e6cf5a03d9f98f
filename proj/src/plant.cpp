#include "hapdrive/plant.hpp"

#include <algorithm>
#include <cmath>

#include "hapdrive/error.hpp"
#include "hapdrive/units.hpp"

namespace hapdrive::plant {

double VehicleParams::effective_drive_ratio() const
{
    const double wheel_rpm = calibration_speed / (2.0 * units::kPi * wheel_radius) * 60.0;
    return calibration_rpm / wheel_rpm;
}

double engine_rpm(const VehicleState& state, const VehicleParams& p)
{
    const double wheel_rev_per_s = state.v / (2.0 * units::kPi * p.wheel_radius);
    return std::max(p.idle_rpm, wheel_rev_per_s * p.effective_drive_ratio() * 60.0);
}

FrontForces lateral_front_forces(const VehicleState& state, double road_wheel_angle, const VehicleParams& p)
{
    const double yaw_rate = state.v * std::tan(road_wheel_angle) / p.wheelbase;  // rad/s
    const double lateral_accel = state.v * yaw_rate;
    const double front_load = p.mass * p.front_weight_fraction * lateral_accel;
    const double slip = front_load / p.cornering_stiffness_front;
    const double axle = std::clamp(p.cornering_stiffness_front * slip, -p.tire_force_max, p.tire_force_max);
    return {0.5 * axle, 0.5 * axle};
}

double longitudinal_accel(const VehicleState& state, double throttle, double brake, const VehicleParams& p)
{
    throttle = std::clamp(throttle, 0.0, 1.0);
    brake = std::clamp(brake, 0.0, 1.0);
    const double ratio = p.effective_drive_ratio();
    const double rpm = engine_rpm(state, p);

    // Progressive pedal map: torque grows with the square of the throttle.
    double drive = throttle * throttle * p.max_engine_torque * ratio / p.wheel_radius;
    if (state.v > 0.0) {
        drive = std::min(drive, p.max_power / state.v);
    }
    const double engine_brake =
        (1.0 - throttle) * (p.engine_brake_torque + p.engine_brake_slope * (rpm - p.idle_rpm)) * ratio /
        p.wheel_radius;

    double resist = 0.5 * p.air_density * p.drag_area * state.v * state.v + brake * p.mass * p.max_brake_decel;
    if (state.v > 0.0) {
        resist += p.rolling_coefficient * p.mass * p.gravity + engine_brake;
    }
    return (drive - resist) / p.mass;
}

namespace {

void check_finite(const VehicleState& s)
{
    for (const double v : {s.x, s.y, s.heading, s.v, s.omega, s.rpm, s.force_fl, s.force_fr}) {
        if (!std::isfinite(v)) {
            throw NonFinite("vehicle state is not finite");
        }
    }
}

}  // namespace

VehicleState step_vehicle(const VehicleState& state, double throttle, double brake, double road_wheel_angle,
                          const VehicleParams& p, double dt)
{
    if (!std::isfinite(throttle) || !std::isfinite(brake) || !std::isfinite(road_wheel_angle)) {
        throw NonFinite("vehicle inputs are not finite");
    }
    VehicleState next = state;
    next.v = std::max(0.0, state.v + longitudinal_accel(state, throttle, brake, p) * dt);
    const double yaw_rate = next.v * std::tan(road_wheel_angle) / p.wheelbase;
    next.omega = units::rad2deg(yaw_rate);
    next.heading = state.heading + yaw_rate * dt;
    next.x = state.x + next.v * std::cos(next.heading) * dt;
    next.y = state.y + next.v * std::sin(next.heading) * dt;
    next.rpm = engine_rpm(next, p);
    const FrontForces f = lateral_front_forces(next, road_wheel_angle, p);
    next.force_fl = f.left;
    next.force_fr = f.right;
    check_finite(next);
    return next;
}

double end_stop_torque(const Axis& axis, const AxisParams& ap)
{
    if (axis.angle > ap.max_angle) {
        return -ap.stop_stiffness * (axis.angle - ap.max_angle) - ap.stop_damping * std::max(0.0, axis.rate);
    }
    if (axis.angle < ap.min_angle) {
        return -ap.stop_stiffness * (axis.angle - ap.min_angle) - ap.stop_damping * std::min(0.0, axis.rate);
    }
    return 0.0;
}

namespace {

Axis step_axis(const Axis& a, double feedback, double driver, const AxisParams& ap, double dt)
{
    const double fb = std::clamp(feedback, -ap.motor_limit, ap.motor_limit);
    const double torque = driver + fb + end_stop_torque(a, ap);
    Axis out;
    out.rate = a.rate + torque / ap.inertia * dt;
    out.angle = a.angle + out.rate * dt;
    if (!std::isfinite(out.rate) || !std::isfinite(out.angle)) {
        throw NonFinite("device state is not finite");
    }
    return out;
}

}  // namespace

DeviceState step_device(const DeviceState& dev, const AxisTorques& feedback, const AxisTorques& driver,
                        const DeviceParams& p, double dt)
{
    DeviceState out;
    out.steering = step_axis(dev.steering, feedback.steering, driver.steering, p.steering, dt);
    out.accel = step_axis(dev.accel, feedback.accel, driver.accel, p.accel, dt);
    out.brake = step_axis(dev.brake, feedback.brake, driver.brake, p.brake, dt);
    return out;
}

}  // namespace hapdrive::plant
