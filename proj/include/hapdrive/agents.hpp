#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <string>

#include "hapdrive/plant.hpp"
#include "hapdrive/track.hpp"

namespace hapdrive::agents {

/// Synthetic driver. Angles in degrees, torques in N m.
struct AgentParams {
    double lookahead_time = 0.9;    // s, pure-pursuit preview
    double lookahead_min = 4.0;     // m
    double pursuit_gain = 1.0;      // scales the pure-pursuit wheel angle
    double speed_kp = 3.0;          // deg pedal per m/s of speed error
    double speed_ki = 0.5;          // deg pedal per m of integrated speed error
    double accel_feedforward = 7.0; // deg pedal intent at zero speed error
    double reaction_delay = 0.3;    // s, multiple of 0.02
    double steer_noise = 0.5;       // deg, white noise on the steering intent
    double accel_noise = 0.2;       // deg, white noise on the pedal intent
    double K_arm = 0.5;             // N m / deg
    double D_arm = 0.038;           // N m s / deg
    double K_leg = 0.5;             // N m / deg
    double D_leg = 0.01;            // N m s / deg
    double target_speed = 17.4;     // m/s
    double pedal_intent_min = -5.0;
    double pedal_intent_max = 16.0;

    /// Throws ConfigInvalid on negative values or a delay off the 20-ms grid.
    void validate() const;
    int delay_ticks() const;
    bool operator==(const AgentParams&) const = default;
};

enum class Skill { expert, novice };

std::string to_string(Skill s);
Skill skill_from_string(const std::string& s);

AgentParams preset(Skill s);

/// Individual `index` of a roster: the preset with every behavioural
/// parameter scaled by a seeded factor in [1 - spread, 1 + spread].
/// Index 0 is the preset itself.
AgentParams individual(Skill s, int index, double spread = 0.1);

struct Intent {
    double steer = 0.0;  // wheel angle, deg
    double accel = 0.0;  // pedal angle, deg
};

/// Noise-free intents for the current pose: pure pursuit toward the midline
/// point one preview distance ahead, PI speed control on the pedal.
/// `integral` is the speed-error integral, updated in place with anti-windup.
Intent raw_intent(const track::TrackPath& path, const plant::VehicleState& state, const AgentParams& p,
                  double s_closest, double& integral, double dt);

/// Arm impedance: K (theta_int - theta) - D theta_dot.
double arm_torque(double intent, const plant::Axis& axis, double K, double D);

/// Foot on the pedal: pushes down only, max(0, K (theta_int - theta) - D theta_dot).
double leg_torque(double intent, const plant::Axis& axis, double K, double D);

/// Driver torques on the devices for a given intent. The brake is never pressed.
plant::AxisTorques agent_torque(const Intent& intent, const plant::DeviceState& dev, const AgentParams& p,
                                bool hands_on_wheel = true);

/// Stateful agent: reaction delay, speed integral and motor noise.
class Agent {
public:
    Agent(const AgentParams& p, std::uint64_t seed);

    const AgentParams& params() const { return params_; }

    /// Intent issued at this tick, reacting to the state reaction_delay ago.
    Intent step(const track::TrackPath& path, const plant::VehicleState& state, double s_closest);
    void reset(std::uint64_t seed);

private:
    AgentParams params_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> unit_{0.0, 1.0};
    std::deque<Intent> pipeline_;
    double integral_ = 0.0;
};

}  // namespace hapdrive::agents
