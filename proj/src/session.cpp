#include "hapdrive/session.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hapdrive/error.hpp"
#include "hapdrive/units.hpp"

namespace hapdrive::harness {

track::TrackPath build_path(const PathSpec& spec)
{
    switch (spec.kind) {
    case PathSpec::Kind::training:
        return track::build_training_path(units::deg2rad(spec.phi_deg));
    case PathSpec::Kind::random:
        if (spec.clearance > 0.0) {
            return track::pick_clear_random_path(spec.seed, spec.length, spec.clearance);
        }
        return track::generate_random_path(spec.seed, spec.length);
    case PathSpec::Kind::exp1:
        return track::pick_clear_random_path(kExp1Seed, 4000.0);
    case PathSpec::Kind::exp2:
        return track::pick_clear_random_path(kExp2Seed, 4000.0);
    case PathSpec::Kind::file: {
        std::ifstream in(spec.file, std::ios::binary);
        if (!in) {
            throw ConfigInvalid("cannot read track file " + spec.file);
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        return track::from_text(ss.str());
    }
    }
    throw ConfigInvalid("unknown path kind");
}

Session::Session(track::TrackPath path, guidance::Method method, const skillnet::SkillNet* net_s,
                 const skillnet::SkillNet* net_a, SessionOptions options)
    : path_(std::move(path)),
      net_s_(net_s),
      net_a_(net_a),
      opt_(std::move(options)),
      controller_(method, opt_.gains, opt_.haptics),
      stream_(net_s, net_a)
{
    if (!(opt_.duration_cap > 0.0)) {
        throw ConfigInvalid("duration cap must be positive");
    }
    if (method == guidance::Method::G && (net_s == nullptr || net_a == nullptr)) {
        throw ConfigInvalid("method G needs both skill networks");
    }
    max_ticks_ = static_cast<std::uint64_t>(std::llround(opt_.duration_cap * units::kSimRateHz));
    const track::Pose start = path_.start_pose();
    vehicle_.x = start.x;
    vehicle_.y = start.y;
    vehicle_.heading = start.heading;
    vehicle_.rpm = plant::engine_rpm(vehicle_, opt_.vehicle);
    device_.accel.angle = opt_.haptics.theta_a0;
    device_.brake.angle = opt_.haptics.theta_b0;
    log_.method = guidance::to_char(method);
}

void Session::set_method(guidance::Method m)
{
    if ((m == guidance::Method::G) && (net_s_ == nullptr || net_a_ == nullptr)) {
        throw ConfigInvalid("method G needs both skill networks");
    }
    controller_.set_method(m);
    log_.method = guidance::to_char(m);
}

LogRecord Session::sense()
{
    LogRecord r;
    r.t = static_cast<double>(tick_) * units::kSimDt;
    r.x = vehicle_.x;
    r.y = vehicle_.y;
    r.heading = vehicle_.heading;
    r.v = vehicle_.v;
    r.omega = vehicle_.omega;
    r.rpm = vehicle_.rpm;
    r.force_fl = vehicle_.force_fl;
    r.force_fr = vehicle_.force_fr;
    r.theta_s = device_.steering.angle;
    r.theta_s_dot = device_.steering.rate;
    r.theta_a = device_.accel.angle;
    r.theta_a_dot = device_.accel.rate;
    r.theta_b = device_.brake.angle;
    r.theta_b_dot = device_.brake.rate;
    const track::Pose pose{vehicle_.x, vehicle_.y, vehicle_.heading};
    for (int i = 0; i < 5; ++i) {
        try {
            r.d[i] = track::boundary_ray_distance(path_, pose, units::deg2rad(track::kRayOffsetsDeg[i]));
        } catch (const OutsideRoad&) {
            r.d[i] = 0.0;
        } catch (const OutOfRange&) {
            throw SimulationDiverged("vehicle left the road region at t=" + std::to_string(r.t));
        }
    }
    guidance::LookaheadErrors e;
    try {
        e = guidance::lookahead_errors(path_, pose, vehicle_.v, opt_.gains.lookahead_time);
    } catch (const OutOfRange&) {
        throw SimulationDiverged("vehicle left the road region at t=" + std::to_string(r.t));
    }
    r.s = e.s;
    r.e_d = e.e_d;
    r.e_delta = e.e_delta;
    r.e_p = e.e_p;
    return r;
}

const LogRecord& Session::step(const DriverFn& driver)
{
    if (finished_) {
        throw ConfigInvalid("session already finished");
    }
    LogRecord r = sense();

    const guidance::Method method = controller_.method();
    guidance::TickTargets targets;
    r.theta_s_hat = r.theta_s;
    r.theta_a_hat = r.theta_a;
    if (net_s_ != nullptr && net_a_ != nullptr) {
        const auto p = stream_.push(r);
        r.theta_s_hat = p.theta_s_hat;
        r.theta_a_hat = p.theta_a_hat;
        if (method == guidance::Method::G && p.warm) {
            targets.active = true;
            targets.theta_s_d = p.theta_s_hat;
            targets.theta_a_d = p.theta_a_hat;
        }
    }
    if (method == guidance::Method::C) {
        targets.active = true;
        // e_d is measured from the midline to the car; the controller wants the midline seen from the car.
        targets.theta_s_d = guidance::conventional_desired_steer(r.e_p, -r.e_d, opt_.gains);
        targets.overspeed = guidance::overspeed(units::ms2kmh(vehicle_.v), opt_.gains);
        r.theta_s_hat = targets.theta_s_d;
        r.theta_a_hat = targets.overspeed ? opt_.haptics.theta_a_min : opt_.haptics.theta_a_max;
        r.overspeed = targets.overspeed ? 1.0 : 0.0;
    }
    controller_.publish(targets);
    r.guidance_active = targets.active && method != guidance::Method::N && !opt_.gains.assist_disabled() ? 1.0 : 0.0;

    DriverInput in;
    try {
        in = driver(Sensed{r, vehicle_, device_, path_});
    } catch (const OutOfRange&) {
        throw SimulationDiverged("driver lost the path at t=" + std::to_string(r.t));
    }
    r.steer_intent = in.mode == DriverInput::Mode::intent ? in.steer : 0.0;
    r.accel_intent = in.mode == DriverInput::Mode::intent ? in.accel : 0.0;
    const agents::Intent intent{in.steer, in.accel};

    guidance::FeedbackTorques fb;
    plant::AxisTorques drv;
    try {
        for (int sub = 0; sub < units::kSubTicks; ++sub) {
            fb = controller_.sub_tick(device_, vehicle_.force_fl, vehicle_.force_fr, units::kDeviceDt);
            if (in.mode == DriverInput::Mode::intent) {
                drv = agents::agent_torque(intent, device_, opt_.impedance, in.hands_on_wheel);
            } else {
                drv = {in.hands_on_wheel ? in.steer : 0.0, in.accel, in.brake};
            }
            device_ = plant::step_device(device_, fb.device, drv, opt_.devices, units::kDeviceDt);
        }
        const double throttle = haptics::throttle_fraction(device_.accel.angle, opt_.haptics);
        const double brake = haptics::brake_fraction(device_.brake.angle, opt_.haptics);
        const double delta = units::deg2rad(device_.steering.angle / opt_.vehicle.steering_ratio);
        vehicle_ = plant::step_vehicle(vehicle_, throttle, brake, delta, opt_.vehicle, units::kSimDt);
    } catch (const NonFinite& ex) {
        throw SimulationDiverged(ex.what());
    }
    r.T_s_feedback = fb.device.steering;
    r.T_a_feedback = fb.pedal_up;
    r.T_s_guidance = fb.steering_assist;
    r.T_a_guidance = fb.pedal_assist;
    r.T_s_driver = drv.steering;
    r.T_a_driver = drv.accel;

    log_.records.push_back(r);
    ++tick_;
    if (r.s >= path_.total_length() - 1e-9) {
        completed_ = true;
        finished_ = true;
    } else if (tick_ >= max_ticks_) {
        finished_ = true;
    }
    return log_.records.back();
}

void Session::run(const DriverFn& driver)
{
    while (!finished_) {
        step(driver);
    }
}

DriverFn agent_driver(agents::Agent& agent, bool hands_on_wheel)
{
    return [&agent, hands_on_wheel](const Sensed& s) {
        const agents::Intent i = agent.step(s.path, s.vehicle, s.record.s);
        DriverInput in;
        in.steer = i.steer;
        in.accel = i.accel;
        in.hands_on_wheel = hands_on_wheel;
        return in;
    };
}

agents::AgentParams DriverSpec::resolve() const
{
    return params ? *params : agents::individual(skill, individual);
}

void SessionConfig::validate() const
{
    if (!(duration_cap > 0.0)) {
        throw ConfigInvalid("duration cap must be positive");
    }
    if (path.kind == PathSpec::Kind::training && std::abs(path.phi_deg) > 180.0) {
        throw ConfigInvalid("training sweep must lie in [-180, 180] deg");
    }
    if (path.kind == PathSpec::Kind::random && !(path.length > 0.0)) {
        throw ConfigInvalid("random path length must be positive");
    }
    driver.resolve().validate();
}

SessionResult run_session(const SessionConfig& cfg, const skillnet::SkillNet* net_s,
                          const skillnet::SkillNet* net_a)
{
    cfg.validate();
    const agents::AgentParams params = cfg.driver.resolve();
    SessionOptions opt;
    opt.gains = cfg.gains;
    opt.impedance = params;
    opt.duration_cap = cfg.duration_cap;
    Session session(build_path(cfg.path), cfg.method, net_s, net_a, opt);
    agents::Agent agent(params, cfg.seed);
    session.run(agent_driver(agent, cfg.driver.hands_on_wheel));
    SessionResult out;
    out.completed = session.completed();
    out.log = session.take_log();
    validate(out.log);
    return out;
}

}  // namespace hapdrive::harness
