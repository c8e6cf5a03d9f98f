#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "hapdrive/agents.hpp"
#include "hapdrive/guidance.hpp"
#include "hapdrive/session.hpp"

// JSON forms of the configuration types. Missing keys keep their defaults,
// unknown keys are rejected.
namespace hapdrive::config {

using nlohmann::json;

json to_json(const agents::AgentParams& p);
agents::AgentParams agent_params_from_json(const json& j, agents::AgentParams base = {});

json to_json(const guidance::GuidanceGains& g);
guidance::GuidanceGains gains_from_json(const json& j, guidance::GuidanceGains base = {});

json to_json(const harness::PathSpec& p);
harness::PathSpec path_spec_from_json(const json& j);

json to_json(const harness::SessionConfig& c);
harness::SessionConfig session_config_from_json(const json& j);

/// Parses text and wraps parse errors in ConfigInvalid.
json parse(std::string_view text);
json read_file(const std::string& path);
void write_file(const std::string& path, std::string_view body);
std::string read_text(const std::string& path);

/// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace hapdrive::config
