#include "hapdrive/agents.hpp"

#include <algorithm>
#include <cmath>

#include "hapdrive/error.hpp"
#include "hapdrive/units.hpp"

namespace hapdrive::agents {

void AgentParams::validate() const
{
    for (const double v : {lookahead_time, lookahead_min, pursuit_gain, speed_kp, speed_ki, reaction_delay,
                           steer_noise, accel_noise, K_arm, D_arm, K_leg, D_leg, target_speed}) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigInvalid("agent parameters must be finite and non-negative");
        }
    }
    const double ticks = reaction_delay / units::kSimDt;
    if (std::abs(ticks - std::round(ticks)) > 1e-9) {
        throw ConfigInvalid("reaction delay must be a multiple of 0.02 s");
    }
    if (!(pedal_intent_max > pedal_intent_min)) {
        throw ConfigInvalid("pedal intent range is empty");
    }
}

int AgentParams::delay_ticks() const { return static_cast<int>(std::lround(reaction_delay / units::kSimDt)); }

std::string to_string(Skill s) { return s == Skill::expert ? "expert" : "novice"; }

Skill skill_from_string(const std::string& s)
{
    if (s == "expert") {
        return Skill::expert;
    }
    if (s == "novice") {
        return Skill::novice;
    }
    throw ConfigInvalid("unknown skill preset '" + s + "'");
}

AgentParams preset(Skill s)
{
    AgentParams p;
    if (s == Skill::novice) {
        p.lookahead_time = 1.0;
        p.reaction_delay = 0.4;
        p.steer_noise = 2.0;
        p.accel_noise = 0.8;
        p.K_arm = 0.2;
        p.D_arm = 0.021;
        p.K_leg = 0.3;
        p.D_leg = 0.006;
        p.speed_kp = 7.0;
        p.speed_ki = 1.5;
        p.accel_feedforward = 9.0;
    }
    return p;
}

AgentParams individual(Skill s, int index, double spread)
{
    AgentParams p = preset(s);
    if (index == 0) {
        return p;
    }
    std::mt19937_64 rng(0x5eedULL * 1000003ULL + static_cast<std::uint64_t>(index) * 2 +
                        (s == Skill::novice ? 1 : 0));
    std::uniform_real_distribution<double> u(1.0 - spread, 1.0 + spread);
    for (double* v : {&p.lookahead_time, &p.speed_kp, &p.speed_ki, &p.steer_noise, &p.accel_noise, &p.K_arm,
                      &p.D_arm, &p.K_leg, &p.D_leg}) {
        *v *= u(rng);
    }
    p.reaction_delay = std::round(p.reaction_delay * u(rng) / units::kSimDt) * units::kSimDt;
    return p;
}

Intent raw_intent(const track::TrackPath& path, const plant::VehicleState& state, const AgentParams& p,
                  double s_closest, double& integral, double dt)
{
    const plant::VehicleParams vp;
    const double preview = std::max(p.lookahead_min, p.lookahead_time * state.v);
    const track::Point target = path.point_at(s_closest + preview);
    const double dx = target.x - state.x;
    const double dy = target.y - state.y;
    const double dist = std::max(std::hypot(dx, dy), 1e-6);
    const double alpha = units::wrap_angle(std::atan2(dy, dx) - state.heading);
    const double delta = std::atan2(2.0 * vp.wheelbase * std::sin(alpha), dist);

    Intent out;
    out.steer = std::clamp(p.pursuit_gain * vp.steering_ratio * units::rad2deg(delta), -459.0, 459.0);

    const double e = p.target_speed - state.v;
    const double unclamped = p.accel_feedforward + p.speed_kp * e + p.speed_ki * integral;
    const bool high = unclamped >= p.pedal_intent_max && e > 0.0;
    const bool low = unclamped <= p.pedal_intent_min && e < 0.0;
    if (!high && !low) {
        integral += e * dt;
    }
    out.accel = std::clamp(p.accel_feedforward + p.speed_kp * e + p.speed_ki * integral, p.pedal_intent_min,
                           p.pedal_intent_max);
    return out;
}

double arm_torque(double intent, const plant::Axis& axis, double K, double D)
{
    return K * (intent - axis.angle) - D * axis.rate;
}

double leg_torque(double intent, const plant::Axis& axis, double K, double D)
{
    return std::max(0.0, K * (intent - axis.angle) - D * axis.rate);
}

plant::AxisTorques agent_torque(const Intent& intent, const plant::DeviceState& dev, const AgentParams& p,
                                bool hands_on_wheel)
{
    plant::AxisTorques t;
    t.steering = hands_on_wheel ? arm_torque(intent.steer, dev.steering, p.K_arm, p.D_arm) : 0.0;
    t.accel = leg_torque(intent.accel, dev.accel, p.K_leg, p.D_leg);
    t.brake = 0.0;
    return t;
}

Agent::Agent(const AgentParams& p, std::uint64_t seed) : params_(p), rng_(seed)
{
    params_.validate();
}

void Agent::reset(std::uint64_t seed)
{
    rng_.seed(seed);
    unit_.reset();
    pipeline_.clear();
    integral_ = 0.0;
}

Intent Agent::step(const track::TrackPath& path, const plant::VehicleState& state, double s_closest)
{
    const Intent now = raw_intent(path, state, params_, s_closest, integral_, units::kSimDt);
    if (pipeline_.empty()) {
        pipeline_.assign(static_cast<std::size_t>(params_.delay_ticks()), now);
    }
    pipeline_.push_back(now);
    Intent out = pipeline_.front();
    pipeline_.pop_front();
    out.steer += params_.steer_noise * unit_(rng_);
    out.accel += params_.accel_noise * unit_(rng_);
    return out;
}

}  // namespace hapdrive::agents
