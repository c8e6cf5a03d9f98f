#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hapdrive/runlog.hpp"
#include "hapdrive/skillnet.hpp"
#include "hapdrive/track.hpp"

namespace hapdrive::metrics {

struct PredictiveErrors {
    double E_s_p = 0.0;  // percent of the steering range
    double E_a_p = 0.0;  // percent of the pedal range
    std::size_t n = 0;   // windows evaluated
};

/// e[k] = theta_hat[k] - theta[k + tau] over every complete window; RMS divided
/// by the corpus control range held in each net's normalizer.
/// Throws LogTooShort below 51 samples.
PredictiveErrors predictive_errors(const RunLog& log, const skillnet::SkillNet& net_s,
                                   const skillnet::SkillNet& net_a);

struct SteeringErrors {
    double E_d = 0.0;      // m
    double E_delta = 0.0;  // deg
};

/// RMS lateral and heading error against the first-lane midline, recomputed from the poses.
SteeringErrors steering_errors(const RunLog& log, const track::TrackPath& path);

/// RMS(v - v_d) over samples strictly after v first reaches v_d.
/// Throws NeverReachedTarget if it never does.
double velocity_error(const RunLog& log, double v_d);

/// RMS of |theta_a_dot|.
double pedaling_speed(const RunLog& log);

struct MetricsReport {
    std::string run_id;
    std::string group;
    char method = 'N';
    std::string agent;
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
    double E_s_p = 0.0;
    double E_a_p = 0.0;
    double E_d = 0.0;
    double E_delta = 0.0;
    std::optional<double> E_v;
    double Omega_a = 0.0;
    std::size_t n_pred = 0;
    std::size_t n_vel = 0;
};

/// One-pass accumulator fed sample by sample. Gives the same values as the batch functions.
class StreamingMetrics {
public:
    StreamingMetrics(const track::TrackPath* path, const skillnet::SkillNet* net_s,
                     const skillnet::SkillNet* net_a, double v_d);

    void push(const LogRecord& r);

    std::size_t samples() const { return n_; }
    /// Current values; predictive errors are zero until a window completes, E_v empty before v_d.
    MetricsReport report() const;

private:
    struct Rms {
        double sum_sq = 0.0;
        std::size_t n = 0;
        void add(double e) { sum_sq += e * e; ++n; }
        double value() const;
    };

    const track::TrackPath* path_;
    const skillnet::SkillNet* net_s_;
    const skillnet::SkillNet* net_a_;
    double v_d_;
    skillnet::PredictStream stream_;
    std::vector<double> pred_s_;  // prediction issued at each sample, NaN before warm-up
    std::vector<double> pred_a_;
    std::size_t n_ = 0;
    Rms e_s_, e_a_, e_d_, e_delta_, e_v_, omega_a_;
    bool reached_ = false;
};

MetricsReport evaluate(const RunLog& log, const track::TrackPath& path, const skillnet::SkillNet* net_s,
                       const skillnet::SkillNet* net_a, double v_d);

/// Fixed column order of the report CSV.
std::string report_header();
std::string report_row(const MetricsReport& r);
std::string reports_to_csv(const std::vector<MetricsReport>& rows);
std::vector<MetricsReport> reports_from_csv(const std::string& csv);

/// Mean of a column over rows matching group and method ('*' matches any method).
double group_mean(const std::vector<MetricsReport>& rows, const std::string& group, char method,
                  double MetricsReport::*field);

/// Plain text table for the terminal.
std::string format_table(const std::vector<MetricsReport>& rows);

}  // namespace hapdrive::metrics
