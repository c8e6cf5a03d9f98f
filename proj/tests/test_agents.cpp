#include <doctest.h>

#include <cmath>

#include "hapdrive/agents.hpp"
#include "hapdrive/error.hpp"
#include "hapdrive/session.hpp"
#include "hapdrive/units.hpp"

using namespace hapdrive;
using namespace hapdrive::agents;

TEST_CASE("presets")
{
    const AgentParams e = preset(Skill::expert);
    const AgentParams n = preset(Skill::novice);
    CHECK_NOTHROW(e.validate());
    CHECK_NOTHROW(n.validate());
    CHECK(e.reaction_delay < n.reaction_delay);
    CHECK(e.steer_noise < n.steer_noise);
    CHECK(e.K_arm > n.K_arm);
    CHECK(e.delay_ticks() == 15);
    CHECK(individual(Skill::novice, 0) == n);
    for (int i = 1; i < 12; ++i) {
        const AgentParams p = individual(Skill::expert, i);
        CHECK_NOTHROW(p.validate());
        CHECK(p.K_arm >= 0.9 * e.K_arm - 1e-12);
        CHECK(p.K_arm <= 1.1 * e.K_arm + 1e-12);
        CHECK(individual(Skill::expert, i) == p);
    }
    CHECK_FALSE(individual(Skill::expert, 1) == individual(Skill::expert, 2));
    CHECK(skill_from_string("novice") == Skill::novice);
    CHECK_THROWS_AS(skill_from_string("pro"), ConfigInvalid);
}

TEST_CASE("parameter validation")
{
    AgentParams p;
    p.reaction_delay = 0.03;
    CHECK_THROWS_AS(p.validate(), ConfigInvalid);
    p = {};
    p.K_arm = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigInvalid);
    p = {};
    p.steer_noise = std::nan("");
    CHECK_THROWS_AS(p.validate(), ConfigInvalid);
}

TEST_CASE("pure-pursuit intent")
{
    const track::TrackPath flat = track::build_training_path(0.0);
    AgentParams p;
    plant::VehicleState s;
    s.x = 100.0;
    s.v = p.target_speed;
    double integral = 0.0;
    const Intent on = raw_intent(flat, s, p, 100.0, integral, 0.02);
    CHECK(on.steer == doctest::Approx(0.0));
    CHECK(on.accel == doctest::Approx(p.accel_feedforward));

    s.y = 1.0;
    integral = 0.0;
    const Intent left = raw_intent(flat, s, p, 100.0, integral, 0.02);
    CHECK(left.steer < 0.0);
    s.y = -1.0;
    CHECK(raw_intent(flat, s, p, 100.0, integral, 0.02).steer > 0.0);

    s.y = 0.0;
    s.v = p.target_speed - 0.5;
    integral = 0.0;
    CHECK(raw_intent(flat, s, p, 100.0, integral, 0.02).accel > p.accel_feedforward);
    CHECK(integral > 0.0);
}

TEST_CASE("speed integral winds up only inside the pedal range")
{
    const track::TrackPath flat = track::build_training_path(0.0);
    AgentParams p;
    plant::VehicleState s;
    s.x = 50.0;
    s.v = 0.0;
    double integral = 0.0;
    for (int i = 0; i < 500; ++i) {
        const Intent in = raw_intent(flat, s, p, 50.0, integral, 0.02);
        CHECK(in.accel <= p.pedal_intent_max);
    }
    CHECK(integral < 10.0);
}

TEST_CASE("impedance laws")
{
    const plant::Axis at{12.0, 0.0};
    CHECK(arm_torque(12.0, at, 0.5, 0.04) == 0.0);
    CHECK(arm_torque(14.0, at, 0.5, 0.04) == doctest::Approx(1.0));
    CHECK(arm_torque(12.0, {12.0, 10.0}, 0.5, 0.04) == doctest::Approx(-0.4));
    CHECK(leg_torque(10.0, at, 0.5, 0.0) == 0.0);
    CHECK(leg_torque(14.0, at, 0.5, 0.0) == doctest::Approx(1.0));

    plant::DeviceState d;
    d.steering = {5.0, 0.0};
    const plant::AxisTorques off = agent_torque({20.0, 3.0}, d, preset(Skill::expert), false);
    CHECK(off.steering == 0.0);
    CHECK(off.accel > 0.0);
    CHECK(off.brake == 0.0);
}

TEST_CASE("stiffer arm moves the equilibrium toward the intent")
{
    // Convex combination weights of the static balance.
    const double intent = -20.0;
    const double desired = 30.0;
    const double K_pid = 0.6;
    double prev = desired;
    for (const double K_arm : {0.1, 0.2, 0.5, 1.0, 2.0}) {
        const double eq = (K_arm * intent + K_pid * desired) / (K_arm + K_pid);
        CHECK(eq < prev);
        CHECK(arm_torque(intent, {eq, 0.0}, K_arm, 0.0) + K_pid * (desired - eq) == doctest::Approx(0.0).scale(1.0));
        prev = eq;
    }
}

TEST_CASE("agent delay and determinism")
{
    const track::TrackPath flat = track::build_training_path(0.0);
    AgentParams p;
    p.steer_noise = 0.0;
    p.accel_noise = 0.0;
    Agent quiet(p, 1);
    plant::VehicleState s;
    s.x = 100.0;
    s.v = p.target_speed;
    const Intent first = quiet.step(flat, s, 100.0);
    s.y = 1.0;
    for (int i = 0; i < p.delay_ticks(); ++i) {
        CHECK(quiet.step(flat, s, 100.0).steer == first.steer);
    }
    CHECK(quiet.step(flat, s, 100.0).steer < first.steer);

    Agent a(preset(Skill::novice), 9);
    Agent b(preset(Skill::novice), 9);
    for (int i = 0; i < 50; ++i) {
        const Intent x = a.step(flat, s, 100.0);
        const Intent y = b.step(flat, s, 100.0);
        CHECK(x.steer == y.steer);
        CHECK(x.accel == y.accel);
    }
    a.reset(9);
    Agent c(preset(Skill::novice), 9);
    CHECK(a.step(flat, s, 100.0).steer == c.step(flat, s, 100.0).steer);
}

TEST_CASE("expert settles on the midline at cruise")
{
    harness::SessionConfig cfg;
    cfg.path.phi_deg = 0.0;
    AgentParams p = preset(Skill::expert);
    p.steer_noise = 0.0;
    p.accel_noise = 0.0;
    cfg.driver.params = p;
    const auto r = harness::run_session(cfg);
    REQUIRE(r.completed);
    const auto& last = r.log.records[r.log.size() - 100];
    CHECK(std::abs(last.steer_intent) < 0.5);
    CHECK(std::abs(last.e_d) < 0.05);
    CHECK(std::abs(last.v - p.target_speed) < units::kmh2ms(1.0));
}

TEST_CASE("expert collection contract on every training sweep")
{
    for (const double phi : track::training_sweeps_deg()) {
        harness::SessionConfig cfg;
        cfg.path.phi_deg = phi;
        cfg.seed = 100 + static_cast<std::uint64_t>(phi + 180.0);
        const auto r = harness::run_session(cfg);
        CHECK(r.completed);
        double max_ed = 0.0;
        double max_dv = 0.0;
        for (const auto& rec : r.log.records) {
            max_ed = std::max(max_ed, std::abs(rec.e_d));
            if (rec.t > 15.0) {
                max_dv = std::max(max_dv, std::abs(units::ms2kmh(rec.v) - units::kTargetSpeedKmh));
            }
        }
        INFO("phi " << phi);
        CHECK(max_ed < 1.75);
        CHECK(max_dv < 5.0);
    }
}

TEST_CASE("expert heading error below the novice's on the 90-degree path")
{
    double e = 0.0;
    double n = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        for (const Skill skill : {Skill::expert, Skill::novice}) {
            harness::SessionConfig cfg;
            cfg.path.phi_deg = 90.0;
            cfg.seed = seed;
            cfg.driver.skill = skill;
            const auto r = harness::run_session(cfg);
            REQUIRE(r.completed);
            double ss = 0.0;
            for (const auto& rec : r.log.records) {
                ss += rec.e_delta * rec.e_delta;
            }
            (skill == Skill::expert ? e : n) += std::sqrt(ss / r.log.size()) / 10.0;
        }
    }
    CHECK(e < n);
}
