#pragma once

#include <functional>

namespace hapdrive::haptics {

/// Ambient torque-feedback constants. Angles in degrees.
///
/// Sign convention: the steering torque is returned in the direction of
/// increasing wheel angle (CCW at the rim). Pedal torques are returned as
/// the torque pushing the pedal up against the foot.
struct HapticParams {
    double G_shaft = 0.75;     // m
    double D_s = 0.002;        // N m s / deg
    double T_friction = 0.1;   // N m
    double K_a = 0.2;          // N m / deg
    double K_b = 0.2;
    double D_a = 0.001;        // N m s / deg
    double D_b = 0.001;
    double theta_a0 = -5.0;    // rest angle of the pedal springs
    double theta_b0 = -5.0;
    double theta_a_min = 0.0;  // throttle begins here
    double theta_a_max = 10.0; // virtual endpoint and full throttle
    double theta_b_min = 0.0;
    double theta_b_max = 5.0;
    /// Gravity compensation g(theta); empty means zero.
    std::function<double(double)> gravity_comp;

    /// Maps the plant's lateral tire forces (N, left positive) onto the
    /// alignment term: forces are read in kN and the moment opposes the turn.
    double align_force_scale = -1e-3;

    double K_a_max() const { return 10.0 * K_a; }
    double K_b_max() const { return 10.0 * K_b; }
    double gravity(double theta) const { return gravity_comp ? gravity_comp(theta) : 0.0; }
};

/// Self-alignment + viscous + Coulomb terms. Damping and friction oppose rotation;
/// there is no friction at zero rate.
double steering_torque(double F_fl, double F_fr, double theta_s_dot, const HapticParams& p = {});

/// Unilateral endpoint term: zero below the endpoint, k*(theta - endpoint) at or above it.
double endpoint_torque(double theta, double endpoint, double k);

/// Spring + endpoint + damping + gravity compensation.
double accelerator_torque(double theta_a, double theta_a_dot, const HapticParams& p = {});
double brake_torque(double theta_b, double theta_b_dot, const HapticParams& p = {});

/// Pedal angle to engine throttle / brake fraction in [0, 1].
double throttle_fraction(double theta_a, const HapticParams& p = {});
double brake_fraction(double theta_b, const HapticParams& p = {});

/// Ambient rim torque from the plant's tire forces (see align_force_scale).
double ambient_steering_torque(double F_fl, double F_fr, double theta_s_dot, const HapticParams& p = {});

}  // namespace hapdrive::haptics
