#include "hapdrive/config.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <openssl/evp.h>

#include "hapdrive/error.hpp"

namespace hapdrive::config {

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* what)
{
    if (!j.is_object()) {
        throw ConfigInvalid(std::string(what) + " must be a JSON object");
    }
    for (const auto& [key, _] : j.items()) {
        bool found = false;
        for (const char* k : known) {
            found = found || key == k;
        }
        if (!found) {
            throw ConfigInvalid(std::string("unknown key '") + key + "' in " + what);
        }
    }
}

template <class T>
void read(const json& j, const char* key, T& out)
{
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigInvalid(std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

}  // namespace

json to_json(const agents::AgentParams& p)
{
    return {{"lookahead_time", p.lookahead_time}, {"lookahead_min", p.lookahead_min},
            {"pursuit_gain", p.pursuit_gain},     {"speed_kp", p.speed_kp},
            {"speed_ki", p.speed_ki},             {"accel_feedforward", p.accel_feedforward},
            {"reaction_delay", p.reaction_delay}, {"steer_noise", p.steer_noise},
            {"accel_noise", p.accel_noise},       {"K_arm", p.K_arm},
            {"D_arm", p.D_arm},                   {"K_leg", p.K_leg},
            {"D_leg", p.D_leg},                   {"target_speed", p.target_speed},
            {"pedal_intent_min", p.pedal_intent_min}, {"pedal_intent_max", p.pedal_intent_max}};
}

agents::AgentParams agent_params_from_json(const json& j, agents::AgentParams p)
{
    reject_unknown(j,
                   {"lookahead_time", "lookahead_min", "pursuit_gain", "speed_kp", "speed_ki", "accel_feedforward",
                    "reaction_delay", "steer_noise", "accel_noise", "K_arm", "D_arm", "K_leg", "D_leg",
                    "target_speed", "pedal_intent_min", "pedal_intent_max"},
                   "agent parameters");
    read(j, "lookahead_time", p.lookahead_time);
    read(j, "lookahead_min", p.lookahead_min);
    read(j, "pursuit_gain", p.pursuit_gain);
    read(j, "speed_kp", p.speed_kp);
    read(j, "speed_ki", p.speed_ki);
    read(j, "accel_feedforward", p.accel_feedforward);
    read(j, "reaction_delay", p.reaction_delay);
    read(j, "steer_noise", p.steer_noise);
    read(j, "accel_noise", p.accel_noise);
    read(j, "K_arm", p.K_arm);
    read(j, "D_arm", p.D_arm);
    read(j, "K_leg", p.K_leg);
    read(j, "D_leg", p.D_leg);
    read(j, "target_speed", p.target_speed);
    read(j, "pedal_intent_min", p.pedal_intent_min);
    read(j, "pedal_intent_max", p.pedal_intent_max);
    p.validate();
    return p;
}

json to_json(const guidance::GuidanceGains& g)
{
    return {{"K_pid", g.K_pid},         {"I_pid", g.I_pid},
            {"D_pid", g.D_pid},         {"stable_factor", g.stable_factor},
            {"K_pedal", g.K_pedal},     {"K_p", g.K_p},
            {"K_d", g.K_d},             {"lookahead_time", g.lookahead_time},
            {"v_M_kmh", g.v_M_kmh},     {"keep_alignment", g.keep_alignment}};
}

guidance::GuidanceGains gains_from_json(const json& j, guidance::GuidanceGains g)
{
    reject_unknown(j,
                   {"K_pid", "I_pid", "D_pid", "stable_factor", "K_pedal", "K_p", "K_d", "lookahead_time",
                    "v_M_kmh", "keep_alignment"},
                   "gains");
    read(j, "K_pid", g.K_pid);
    read(j, "I_pid", g.I_pid);
    read(j, "D_pid", g.D_pid);
    read(j, "stable_factor", g.stable_factor);
    read(j, "K_pedal", g.K_pedal);
    read(j, "K_p", g.K_p);
    read(j, "K_d", g.K_d);
    read(j, "lookahead_time", g.lookahead_time);
    read(j, "v_M_kmh", g.v_M_kmh);
    read(j, "keep_alignment", g.keep_alignment);
    return g;
}

json to_json(const harness::PathSpec& p)
{
    using K = harness::PathSpec::Kind;
    switch (p.kind) {
    case K::training: return {{"kind", "training"}, {"phi_deg", p.phi_deg}};
    case K::random:
        return {{"kind", "random"}, {"seed", p.seed}, {"length", p.length}, {"clearance", p.clearance}};
    case K::exp1: return {{"kind", "exp1"}};
    case K::exp2: return {{"kind", "exp2"}};
    case K::file: return {{"kind", "file"}, {"file", p.file}};
    }
    return {};
}

harness::PathSpec path_spec_from_json(const json& j)
{
    reject_unknown(j, {"kind", "phi_deg", "seed", "length", "clearance", "file"}, "path");
    harness::PathSpec p;
    std::string kind = "training";
    read(j, "kind", kind);
    if (kind == "training") {
        p.kind = harness::PathSpec::Kind::training;
    } else if (kind == "random") {
        p.kind = harness::PathSpec::Kind::random;
    } else if (kind == "exp1") {
        p.kind = harness::PathSpec::Kind::exp1;
    } else if (kind == "exp2") {
        p.kind = harness::PathSpec::Kind::exp2;
    } else if (kind == "file") {
        p.kind = harness::PathSpec::Kind::file;
    } else {
        throw ConfigInvalid("unknown path kind '" + kind + "'");
    }
    read(j, "phi_deg", p.phi_deg);
    read(j, "seed", p.seed);
    read(j, "length", p.length);
    read(j, "clearance", p.clearance);
    read(j, "file", p.file);
    return p;
}

json to_json(const harness::SessionConfig& c)
{
    json driver = {{"skill", agents::to_string(c.driver.skill)},
                   {"individual", c.driver.individual},
                   {"hands_on_wheel", c.driver.hands_on_wheel},
                   {"params", to_json(c.driver.resolve())}};
    json j = {{"path", to_json(c.path)},
              {"method", std::string(1, guidance::to_char(c.method))},
              {"driver", driver},
              {"seed", c.seed},
              {"duration_cap_s", c.duration_cap},
              {"gains", to_json(c.gains)}};
    if (!c.log_path.empty()) {
        j["log"] = c.log_path;
    }
    if (!c.net_s_path.empty() || !c.net_a_path.empty()) {
        j["nets"] = {{"steering", c.net_s_path}, {"accel", c.net_a_path}};
    }
    return j;
}

harness::SessionConfig session_config_from_json(const json& j)
{
    reject_unknown(j, {"path", "method", "driver", "seed", "duration_cap_s", "gains", "log", "nets"},
                   "session config");
    harness::SessionConfig c;
    if (j.contains("path")) {
        c.path = path_spec_from_json(j.at("path"));
    }
    std::string method = "N";
    read(j, "method", method);
    c.method = guidance::method_from_string(method);
    if (j.contains("driver")) {
        const json& d = j.at("driver");
        reject_unknown(d, {"skill", "individual", "hands_on_wheel", "params"}, "driver");
        std::string skill = "expert";
        read(d, "skill", skill);
        c.driver.skill = agents::skill_from_string(skill);
        read(d, "individual", c.driver.individual);
        read(d, "hands_on_wheel", c.driver.hands_on_wheel);
        if (d.contains("params")) {
            c.driver.params = agent_params_from_json(d.at("params"), agents::individual(c.driver.skill, c.driver.individual));
        }
    }
    read(j, "seed", c.seed);
    read(j, "duration_cap_s", c.duration_cap);
    if (j.contains("gains")) {
        c.gains = gains_from_json(j.at("gains"));
    }
    read(j, "log", c.log_path);
    if (j.contains("nets")) {
        reject_unknown(j.at("nets"), {"steering", "accel"}, "nets");
        read(j.at("nets"), "steering", c.net_s_path);
        read(j.at("nets"), "accel", c.net_a_path);
    }
    c.validate();
    return c;
}

json parse(std::string_view text)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("invalid JSON: ") + e.what());
    }
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigInvalid("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_file(const std::string& path) { return parse(read_text(path)); }

void write_file(const std::string& path, std::string_view body)
{
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigInvalid("cannot write " + path);
    }
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

std::string sha256_hex(std::string_view bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

}  // namespace hapdrive::config
