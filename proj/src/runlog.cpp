#include "hapdrive/runlog.hpp"

#include <cmath>
#include <utility>

#include "hapdrive/error.hpp"
#include "hapdrive/text.hpp"
#include "hapdrive/units.hpp"

namespace hapdrive {

namespace {

using Member = double LogRecord::*;

struct Column {
    std::string_view name;
    Member member;
    int ray = -1;  // index into LogRecord::d when member is null
};

constexpr Column kColumns[] = {
    {"t", &LogRecord::t},
    {"x", &LogRecord::x},
    {"y", &LogRecord::y},
    {"heading", &LogRecord::heading},
    {"v", &LogRecord::v},
    {"omega", &LogRecord::omega},
    {"rpm", &LogRecord::rpm},
    {"force_fl", &LogRecord::force_fl},
    {"force_fr", &LogRecord::force_fr},
    {"theta_s", &LogRecord::theta_s},
    {"theta_s_dot", &LogRecord::theta_s_dot},
    {"theta_a", &LogRecord::theta_a},
    {"theta_a_dot", &LogRecord::theta_a_dot},
    {"theta_b", &LogRecord::theta_b},
    {"theta_b_dot", &LogRecord::theta_b_dot},
    {"d1", nullptr, 0},
    {"d2", nullptr, 1},
    {"d3", nullptr, 2},
    {"d4", nullptr, 3},
    {"d5", nullptr, 4},
    {"s", &LogRecord::s},
    {"e_d", &LogRecord::e_d},
    {"e_delta", &LogRecord::e_delta},
    {"e_p", &LogRecord::e_p},
    {"steer_intent", &LogRecord::steer_intent},
    {"accel_intent", &LogRecord::accel_intent},
    {"theta_s_hat", &LogRecord::theta_s_hat},
    {"theta_a_hat", &LogRecord::theta_a_hat},
    {"T_s_feedback", &LogRecord::T_s_feedback},
    {"T_a_feedback", &LogRecord::T_a_feedback},
    {"T_s_guidance", &LogRecord::T_s_guidance},
    {"T_a_guidance", &LogRecord::T_a_guidance},
    {"T_s_driver", &LogRecord::T_s_driver},
    {"T_a_driver", &LogRecord::T_a_driver},
    {"overspeed", &LogRecord::overspeed},
    {"guidance_active", &LogRecord::guidance_active},
};

constexpr auto make_names()
{
    std::array<std::string_view, std::size(kColumns)> names{};
    for (std::size_t i = 0; i < names.size(); ++i) {
        names[i] = kColumns[i].name;
    }
    return names;
}

constexpr auto kNames = make_names();

double& field(LogRecord& r, const Column& c) { return c.member ? r.*c.member : r.d[c.ray]; }
double field(const LogRecord& r, const Column& c) { return c.member ? r.*c.member : r.d[c.ray]; }

}  // namespace

std::span<const std::string_view> runlog_columns() { return kNames; }

std::vector<double> record_values(const LogRecord& r)
{
    std::vector<double> out;
    out.reserve(std::size(kColumns));
    for (const Column& c : kColumns) {
        out.push_back(field(r, c));
    }
    return out;
}

LogRecord record_from_values(std::span<const double> values)
{
    if (values.size() != std::size(kColumns)) {
        throw FormatError("record has the wrong number of values");
    }
    LogRecord r;
    for (std::size_t i = 0; i < values.size(); ++i) {
        field(r, kColumns[i]) = values[i];
    }
    return r;
}

void validate(const RunLog& log)
{
    if (log.method != 'N' && log.method != 'G' && log.method != 'C') {
        throw SchemaError("run log method must be N, G or C");
    }
    for (std::size_t k = 0; k < log.records.size(); ++k) {
        const LogRecord& r = log.records[k];
        for (const Column& c : kColumns) {
            if (!std::isfinite(field(r, c))) {
                throw SchemaError("non-finite value in column " + std::string(c.name) + " at row " +
                                  std::to_string(k));
            }
        }
        if (std::abs(r.t - static_cast<double>(k) * units::kSimDt) > 1e-9) {
            throw SchemaError("samples are not uniformly spaced at row " + std::to_string(k));
        }
    }
}

std::string to_csv(const RunLog& log)
{
    std::string out = "method";
    for (const Column& c : kColumns) {
        out += ',';
        out += c.name;
    }
    out += '\n';
    out.reserve(out.size() + log.records.size() * 400);
    for (const LogRecord& r : log.records) {
        out += log.method;
        for (const Column& c : kColumns) {
            out += ',';
            text::append_double(out, field(r, c));
        }
        out += '\n';
    }
    return out;
}

RunLog from_csv(std::string_view csv)
{
    const auto lines = text::split(csv, '\n');
    if (lines.empty()) {
        throw FormatError("empty run log");
    }
    const auto header = text::split(lines[0], ',');
    if (header.size() != std::size(kColumns) + 1 || header[0] != "method") {
        throw FormatError("run log header has the wrong column count");
    }
    for (std::size_t i = 0; i < std::size(kColumns); ++i) {
        if (header[i + 1] != kColumns[i].name) {
            throw FormatError("unexpected run log column '" + std::string(header[i + 1]) + "'");
        }
    }
    RunLog log;
    bool first = true;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) {
            continue;
        }
        const auto cells = text::split(lines[li], ',');
        if (cells.size() != header.size() || cells[0].size() != 1) {
            throw FormatError("malformed run log row " + std::to_string(li));
        }
        if (first) {
            log.method = cells[0][0];
            first = false;
        } else if (cells[0][0] != log.method) {
            throw FormatError("method tag changes within a run log");
        }
        LogRecord r;
        for (std::size_t i = 0; i < std::size(kColumns); ++i) {
            field(r, kColumns[i]) = text::parse_double(cells[i + 1]);
        }
        log.records.push_back(r);
    }
    return log;
}

}  // namespace hapdrive
