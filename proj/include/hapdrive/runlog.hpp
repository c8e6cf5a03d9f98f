#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hapdrive {

/// One 50-Hz sample of a driving trial. Angles in degrees, distances in
/// metres, speed in m/s, torques in N m.
struct LogRecord {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // rad
    double v = 0.0;
    double omega = 0.0;    // deg/s
    double rpm = 0.0;
    double force_fl = 0.0;
    double force_fr = 0.0;
    double theta_s = 0.0;
    double theta_s_dot = 0.0;
    double theta_a = 0.0;
    double theta_a_dot = 0.0;
    double theta_b = 0.0;
    double theta_b_dot = 0.0;
    std::array<double, 5> d{};  // boundary ray distances, -30..30 deg
    double s = 0.0;             // closest midline arc length
    double e_d = 0.0;           // lateral error, left of midline positive
    double e_delta = 0.0;       // heading error, deg
    double e_p = 0.0;           // look-ahead direction error, deg
    double steer_intent = 0.0;  // driver's intended wheel angle
    double accel_intent = 0.0;  // driver's intended pedal angle
    double theta_s_hat = 0.0;   // model / reference output issued at this tick
    double theta_a_hat = 0.0;
    double T_s_feedback = 0.0;  // rim torque from the simulator, last sub-tick
    double T_a_feedback = 0.0;  // pedal torque pushing up, last sub-tick
    double T_s_guidance = 0.0;  // assist part of the feedback
    double T_a_guidance = 0.0;
    double T_s_driver = 0.0;
    double T_a_driver = 0.0;
    double overspeed = 0.0;       // 1 when the overspeed cue was active
    double guidance_active = 0.0; // 1 when a guidance law produced the feedback

    bool operator==(const LogRecord&) const = default;
};

/// Time-indexed record of one trial.
struct RunLog {
    char method = 'N';
    std::vector<LogRecord> records;

    std::size_t size() const { return records.size(); }
    bool operator==(const RunLog&) const = default;
};

/// Column names in file order (after the leading `method` column).
std::span<const std::string_view> runlog_columns();

/// Values of a record in column order, and back.
std::vector<double> record_values(const LogRecord& r);
LogRecord record_from_values(std::span<const double> values);

/// Throws SchemaError unless samples are uniformly 0.02 s apart starting at 0,
/// time is monotone and every channel is finite.
void validate(const RunLog& log);

/// CSV with a fixed header; numbers use the shortest exact decimal form.
std::string to_csv(const RunLog& log);
RunLog from_csv(std::string_view csv);

}  // namespace hapdrive
