#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "hapdrive/agents.hpp"
#include "hapdrive/guidance.hpp"
#include "hapdrive/haptics.hpp"
#include "hapdrive/plant.hpp"
#include "hapdrive/runlog.hpp"
#include "hapdrive/skillnet.hpp"
#include "hapdrive/track.hpp"

namespace hapdrive::harness {

struct PathSpec {
    enum class Kind { training, random, exp1, exp2, file };
    Kind kind = Kind::training;
    double phi_deg = 0.0;       // training
    std::uint64_t seed = 0;     // random
    double length = 4000.0;     // random
    double clearance = 60.0;    // random; 0 accepts the first seed
    std::string file;           // file

    bool operator==(const PathSpec&) const = default;
};

track::TrackPath build_path(const PathSpec& spec);

/// Fixed 4-km paths of the two experiments.
inline constexpr std::uint64_t kExp1Seed = 1001;
inline constexpr std::uint64_t kExp2Seed = 2002;

/// What the driver does for the coming tick.
struct DriverInput {
    enum class Mode { intent, torque };
    Mode mode = Mode::intent;
    double steer = 0.0;  // intent: wheel angle, deg; torque: N m
    double accel = 0.0;  // intent: pedal angle, deg; torque: N m pressing down
    double brake = 0.0;  // torque mode only
    bool hands_on_wheel = true;
};

/// Read-only view handed to the driver once the tick has been sensed.
struct Sensed {
    const LogRecord& record;
    const plant::VehicleState& vehicle;
    const plant::DeviceState& device;
    const track::TrackPath& path;
};

using DriverFn = std::function<DriverInput(const Sensed&)>;

struct SessionOptions {
    guidance::GuidanceGains gains;
    haptics::HapticParams haptics;
    plant::VehicleParams vehicle;
    plant::DeviceParams devices;
    /// Impedance that turns intents into device torque.
    agents::AgentParams impedance = agents::preset(agents::Skill::expert);
    double duration_cap = 360.0;  // s
};

/// One driving trial: the 50-Hz vehicle loop with 16 device sub-ticks per tick.
class Session {
public:
    Session(track::TrackPath path, guidance::Method method, const skillnet::SkillNet* net_s,
            const skillnet::SkillNet* net_a, SessionOptions options = {});

    /// Runs one 20-ms tick and appends its record to the log.
    const LogRecord& step(const DriverFn& driver);
    /// Runs ticks until the path is completed or the duration cap is reached.
    void run(const DriverFn& driver);

    bool finished() const { return finished_; }
    bool completed() const { return completed_; }
    std::uint64_t tick() const { return tick_; }

    void set_method(guidance::Method m);
    guidance::Method method() const { return controller_.method(); }

    const track::TrackPath& path() const { return path_; }
    const plant::VehicleState& vehicle() const { return vehicle_; }
    const plant::DeviceState& device() const { return device_; }
    const RunLog& log() const { return log_; }
    RunLog take_log() { return std::move(log_); }

private:
    LogRecord sense();

    track::TrackPath path_;
    const skillnet::SkillNet* net_s_;
    const skillnet::SkillNet* net_a_;
    SessionOptions opt_;
    guidance::GuidanceController controller_;
    skillnet::PredictStream stream_;
    plant::VehicleState vehicle_;
    plant::DeviceState device_;
    RunLog log_;
    std::uint64_t tick_ = 0;
    std::uint64_t max_ticks_;
    bool finished_ = false;
    bool completed_ = false;
};

/// Driver function for a synthetic agent.
DriverFn agent_driver(agents::Agent& agent, bool hands_on_wheel = true);

struct DriverSpec {
    agents::Skill skill = agents::Skill::expert;
    int individual = 0;
    std::optional<agents::AgentParams> params;  // overrides the roster individual
    bool hands_on_wheel = true;

    agents::AgentParams resolve() const;
};

struct SessionConfig {
    PathSpec path;
    guidance::Method method = guidance::Method::N;
    DriverSpec driver;
    std::uint64_t seed = 1;
    double duration_cap = 360.0;
    guidance::GuidanceGains gains;
    std::string log_path;
    std::string net_s_path;
    std::string net_a_path;

    void validate() const;
};

struct SessionResult {
    RunLog log;
    bool completed = false;
};

/// Builds the path, the agent and the session from a config and runs it to the end.
SessionResult run_session(const SessionConfig& cfg, const skillnet::SkillNet* net_s = nullptr,
                          const skillnet::SkillNet* net_a = nullptr);

}  // namespace hapdrive::harness
