#pragma once

namespace hapdrive::plant {

/// Mid-size sedan. Geometry and steering ratio follow the reference car;
/// tire and engine values are plausible stand-ins.
struct VehicleParams {
    double mass = 1900.0;            // kg
    double wheelbase = 5.5;          // m, effective: stands in for understeer the kinematic model lacks
    double width = 1.8;              // m
    double length = 5.0;             // m
    double steering_ratio = 12.0;    // wheel angle : road-wheel angle
    double front_weight_fraction = 0.52;
    double cornering_stiffness_front = 80000.0;  // N/rad, whole axle
    double tire_force_max = 8000.0;              // N, whole axle
    double wheel_radius = 0.33;      // m
    double idle_rpm = 800.0;
    double calibration_speed = 17.4;   // m/s (62.64 km/h) ...
    double calibration_rpm = 2000.0;   // ... maps to this engine speed
    double max_engine_torque = 350.0;  // N m at full throttle
    double max_power = 200e3;          // W
    double engine_brake_torque = 15.0;         // N m at idle, closed throttle
    double engine_brake_slope = 0.01;          // N m per rpm above idle
    double rolling_coefficient = 0.012;
    double drag_area = 0.7;            // Cd * A, m^2
    double air_density = 1.2;          // kg/m^3
    double max_brake_decel = 8.0;      // m/s^2 at full brake
    double gravity = 9.81;

    /// Single overall ratio such that calibration_speed gives calibration_rpm.
    double effective_drive_ratio() const;
};

/// Vehicle pose at the rear-axle centre plus the quantities the models consume.
struct VehicleState {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;    // rad
    double v = 0.0;          // longitudinal speed, m/s
    double omega = 0.0;      // yaw rate, deg/s
    double rpm = 800.0;
    double force_fl = 0.0;   // lateral front-left tire force, N, left positive
    double force_fr = 0.0;
};

struct FrontForces {
    double left = 0.0;
    double right = 0.0;
};

double engine_rpm(const VehicleState& state, const VehicleParams& p = {});

/// Linear saturated front tires. The kinematic plant has no slip state, so
/// the slip angle is the one that carries the quasi-steady lateral load
/// of the front axle at the current speed and road-wheel angle.
FrontForces lateral_front_forces(const VehicleState& state, double road_wheel_angle,
                                 const VehicleParams& p = {});

/// One 50-Hz step of the kinematic bicycle with longitudinal dynamics.
/// throttle and brake are fractions in [0, 1]; road_wheel_angle in rad.
VehicleState step_vehicle(const VehicleState& state, double throttle, double brake,
                          double road_wheel_angle, const VehicleParams& p = {},
                          double dt = 0.02);

/// Longitudinal acceleration for the given inputs, m/s^2.
double longitudinal_accel(const VehicleState& state, double throttle, double brake,
                          const VehicleParams& p = {});

// ---- haptic devices -------------------------------------------------------

struct Axis {
    double angle = 0.0;  // deg
    double rate = 0.0;   // deg/s
};

/// Steering wheel, accelerator and brake pedal. Positive steering is CCW
/// (left); positive pedal angle is pressed deeper.
struct DeviceState {
    Axis steering;
    Axis accel{-5.0, 0.0};
    Axis brake{-5.0, 0.0};
};

struct AxisParams {
    double inertia;      // N m s^2 / deg
    double min_angle;    // deg, end stop
    double max_angle;    // deg, end stop
    double motor_limit;  // N m, |feedback| is clamped to this
    double stop_stiffness;  // N m / deg past a stop
    double stop_damping;    // N m s / deg past a stop
};

struct DeviceParams {
    AxisParams steering{1.5e-3, -459.0, 459.0, 16.58, 100.0, 0.3};
    AxisParams accel{1.0e-4, -5.0, 20.0, 27.8, 10.0, 0.01};
    AxisParams brake{1.0e-4, -5.0, 10.0, 27.8, 10.0, 0.01};
};

/// Torques acting on the three axes, each in the direction of increasing angle.
struct AxisTorques {
    double steering = 0.0;
    double accel = 0.0;
    double brake = 0.0;
};

/// One 800-Hz step: J * angle'' = driver + clamp(feedback) + end-stop torque,
/// integrated with semi-implicit Euler.
DeviceState step_device(const DeviceState& dev, const AxisTorques& feedback,
                        const AxisTorques& driver, const DeviceParams& p = {},
                        double dt = 1.0 / 800.0);

double end_stop_torque(const Axis& axis, const AxisParams& ap);

}  // namespace hapdrive::plant
