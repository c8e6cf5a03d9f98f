#include "hapdrive/haptics.hpp"

#include <algorithm>

namespace hapdrive::haptics {

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double steering_torque(double F_fl, double F_fr, double theta_s_dot, const HapticParams& p)
{
    const double align = p.G_shaft * 0.5 * (F_fl + F_fr);
    return align - p.D_s * theta_s_dot - p.T_friction * sign(theta_s_dot);
}

double endpoint_torque(double theta, double endpoint, double k)
{
    return theta < endpoint ? 0.0 : k * (theta - endpoint);
}

double accelerator_torque(double theta_a, double theta_a_dot, const HapticParams& p)
{
    return p.K_a * (theta_a - p.theta_a0) + endpoint_torque(theta_a, p.theta_a_max, p.K_a_max()) +
           p.D_a * theta_a_dot + p.gravity(theta_a);
}

double brake_torque(double theta_b, double theta_b_dot, const HapticParams& p)
{
    return p.K_b * (theta_b - p.theta_b0) + endpoint_torque(theta_b, p.theta_b_max, p.K_b_max()) +
           p.D_b * theta_b_dot + p.gravity(theta_b);
}

double throttle_fraction(double theta_a, const HapticParams& p)
{
    return (std::clamp(theta_a, p.theta_a_min, p.theta_a_max) - p.theta_a_min) / (p.theta_a_max - p.theta_a_min);
}

double brake_fraction(double theta_b, const HapticParams& p)
{
    return (std::clamp(theta_b, p.theta_b_min, p.theta_b_max) - p.theta_b_min) / (p.theta_b_max - p.theta_b_min);
}

double ambient_steering_torque(double F_fl, double F_fr, double theta_s_dot, const HapticParams& p)
{
    return steering_torque(p.align_force_scale * F_fl, p.align_force_scale * F_fr, theta_s_dot, p);
}

}  // namespace hapdrive::haptics
