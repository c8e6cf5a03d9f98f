#include "hapdrive/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "hapdrive/error.hpp"
#include "hapdrive/text.hpp"
#include "hapdrive/units.hpp"

namespace hapdrive::metrics {

namespace {

double rms(double sum_sq, std::size_t n) { return n == 0 ? 0.0 : std::sqrt(sum_sq / static_cast<double>(n)); }

struct Geometry {
    double e_d;
    double e_delta;
};

Geometry geometry(const LogRecord& r, const track::TrackPath& path)
{
    const track::PathQuery q = track::closest_midline_point(path, {r.x, r.y});
    return {q.lateral, units::rad2deg(units::wrap_angle(r.heading - q.tangent_heading))};
}

}  // namespace

PredictiveErrors predictive_errors(const RunLog& log, const skillnet::SkillNet& net_s,
                                   const skillnet::SkillNet& net_a)
{
    if (skillnet::window_count(log.size()) == 0) {
        throw LogTooShort("log of " + std::to_string(log.size()) + " samples has no complete window");
    }
    double ss = 0.0;
    double sa = 0.0;
    std::size_t n = 0;
    for (std::size_t k = skillnet::kFirstValidIndex; k + skillnet::kTau < log.size(); ++k) {
        const auto ws = skillnet::assemble_features(log, k, skillnet::Channel::steering);
        const auto wa = skillnet::assemble_features(log, k, skillnet::Channel::accel);
        const double es = net_s.forward(ws) - ws.label;
        const double ea = net_a.forward(wa) - wa.label;
        ss += es * es;
        sa += ea * ea;
        ++n;
    }
    PredictiveErrors out;
    out.n = n;
    out.E_s_p = rms(ss, n) / net_s.normalizer().control_range() * 100.0;
    out.E_a_p = rms(sa, n) / net_a.normalizer().control_range() * 100.0;
    return out;
}

SteeringErrors steering_errors(const RunLog& log, const track::TrackPath& path)
{
    double sd = 0.0;
    double sh = 0.0;
    for (const LogRecord& r : log.records) {
        const Geometry g = geometry(r, path);
        sd += g.e_d * g.e_d;
        sh += g.e_delta * g.e_delta;
    }
    return {rms(sd, log.size()), rms(sh, log.size())};
}

double velocity_error(const RunLog& log, double v_d)
{
    double ss = 0.0;
    std::size_t n = 0;
    bool reached = false;
    for (const LogRecord& r : log.records) {
        if (reached) {
            const double e = r.v - v_d;
            ss += e * e;
            ++n;
        } else if (r.v >= v_d) {
            reached = true;
        }
    }
    if (!reached) {
        throw NeverReachedTarget("speed never reached the target");
    }
    return rms(ss, n);
}

double pedaling_speed(const RunLog& log)
{
    double ss = 0.0;
    for (const LogRecord& r : log.records) {
        ss += r.theta_a_dot * r.theta_a_dot;
    }
    return rms(ss, log.size());
}

double StreamingMetrics::Rms::value() const { return rms(sum_sq, n); }

StreamingMetrics::StreamingMetrics(const track::TrackPath* path, const skillnet::SkillNet* net_s,
                                   const skillnet::SkillNet* net_a, double v_d)
    : path_(path), net_s_(net_s), net_a_(net_a), v_d_(v_d), stream_(net_s, net_a)
{
}

void StreamingMetrics::push(const LogRecord& r)
{
    const std::size_t k = n_++;
    if (net_s_ != nullptr && net_a_ != nullptr) {
        const auto p = stream_.push(r);
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        pred_s_.push_back(p.warm ? p.theta_s_hat : nan);
        pred_a_.push_back(p.warm ? p.theta_a_hat : nan);
        if (k >= skillnet::kFirstValidIndex + skillnet::kTau) {
            e_s_.add(pred_s_[k - skillnet::kTau] - r.theta_s);
            e_a_.add(pred_a_[k - skillnet::kTau] - r.theta_a);
        }
    }
    if (path_ != nullptr) {
        const Geometry g = geometry(r, *path_);
        e_d_.add(g.e_d);
        e_delta_.add(g.e_delta);
    }
    if (reached_) {
        e_v_.add(r.v - v_d_);
    } else if (r.v >= v_d_) {
        reached_ = true;
    }
    omega_a_.add(r.theta_a_dot);
}

MetricsReport StreamingMetrics::report() const
{
    MetricsReport m;
    m.n_samples = n_;
    if (net_s_ != nullptr && net_a_ != nullptr) {
        m.E_s_p = e_s_.value() / net_s_->normalizer().control_range() * 100.0;
        m.E_a_p = e_a_.value() / net_a_->normalizer().control_range() * 100.0;
        m.n_pred = e_s_.n;
    }
    m.E_d = e_d_.value();
    m.E_delta = e_delta_.value();
    if (reached_) {
        m.E_v = e_v_.value();
    }
    m.n_vel = e_v_.n;
    m.Omega_a = omega_a_.value();
    return m;
}

MetricsReport evaluate(const RunLog& log, const track::TrackPath& path, const skillnet::SkillNet* net_s,
                       const skillnet::SkillNet* net_a, double v_d)
{
    MetricsReport m;
    m.method = log.method;
    m.n_samples = log.size();
    if (net_s != nullptr && net_a != nullptr && skillnet::window_count(log.size()) > 0) {
        const PredictiveErrors p = predictive_errors(log, *net_s, *net_a);
        m.E_s_p = p.E_s_p;
        m.E_a_p = p.E_a_p;
        m.n_pred = p.n;
    }
    const SteeringErrors s = steering_errors(log, path);
    m.E_d = s.E_d;
    m.E_delta = s.E_delta;
    try {
        m.E_v = velocity_error(log, v_d);
        std::size_t first = 0;
        while (log.records[first].v < v_d) {
            ++first;
        }
        m.n_vel = log.size() - first - 1;
    } catch (const NeverReachedTarget&) {
        m.E_v.reset();
    }
    m.Omega_a = pedaling_speed(log);
    return m;
}

// ---- report CSV -------------------------------------------------------------

std::string report_header()
{
    return "run_id,group,method,agent,seed,n_samples,E_s_p_pct,E_a_p_pct,E_d_m,E_delta_deg,E_v_ms,Omega_a_deg_s,"
           "n_pred,n_vel";
}

std::string report_row(const MetricsReport& r)
{
    std::string out = r.run_id + ',' + r.group + ',' + r.method + ',' + r.agent + ',' + std::to_string(r.seed) +
                      ',' + std::to_string(r.n_samples);
    for (const double v : {r.E_s_p, r.E_a_p, r.E_d, r.E_delta}) {
        out += ',';
        text::append_double(out, v);
    }
    out += ',';
    if (r.E_v) {
        text::append_double(out, *r.E_v);
    }
    out += ',';
    text::append_double(out, r.Omega_a);
    out += ',' + std::to_string(r.n_pred) + ',' + std::to_string(r.n_vel);
    return out;
}

std::string reports_to_csv(const std::vector<MetricsReport>& rows)
{
    std::string out = report_header() + '\n';
    for (const MetricsReport& r : rows) {
        out += report_row(r) + '\n';
    }
    return out;
}

std::vector<MetricsReport> reports_from_csv(const std::string& csv)
{
    const auto lines = text::split(csv, '\n');
    if (lines.empty() || lines[0] != report_header()) {
        throw FormatError("metrics report header does not match");
    }
    std::vector<MetricsReport> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        const auto c = text::split(lines[i], ',');
        if (c.size() != 14 || c[2].size() != 1) {
            throw FormatError("malformed metrics row " + std::to_string(i));
        }
        MetricsReport r;
        r.run_id = std::string(c[0]);
        r.group = std::string(c[1]);
        r.method = c[2][0];
        r.agent = std::string(c[3]);
        r.seed = static_cast<std::uint64_t>(text::parse_int(c[4]));
        r.n_samples = static_cast<std::size_t>(text::parse_int(c[5]));
        r.E_s_p = text::parse_double(c[6]);
        r.E_a_p = text::parse_double(c[7]);
        r.E_d = text::parse_double(c[8]);
        r.E_delta = text::parse_double(c[9]);
        if (!c[10].empty()) {
            r.E_v = text::parse_double(c[10]);
        }
        r.Omega_a = text::parse_double(c[11]);
        r.n_pred = static_cast<std::size_t>(text::parse_int(c[12]));
        r.n_vel = static_cast<std::size_t>(text::parse_int(c[13]));
        rows.push_back(std::move(r));
    }
    return rows;
}

double group_mean(const std::vector<MetricsReport>& rows, const std::string& group, char method,
                  double MetricsReport::*field)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (const MetricsReport& r : rows) {
        if (r.group == group && (method == '*' || r.method == method)) {
            sum += r.*field;
            ++n;
        }
    }
    return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

std::string format_table(const std::vector<MetricsReport>& rows)
{
    std::ostringstream os;
    os << std::left << std::setw(22) << "run" << std::setw(8) << "group" << std::setw(4) << "m" << std::right
       << std::setw(9) << "Es,p %" << std::setw(9) << "Ea,p %" << std::setw(8) << "Ed m" << std::setw(9)
       << "Edelta" << std::setw(8) << "Ev m/s" << std::setw(9) << "Omega_a" << '\n';
    os << std::fixed;
    for (const MetricsReport& r : rows) {
        os << std::left << std::setw(22) << r.run_id << std::setw(8) << r.group << std::setw(4) << r.method
           << std::right << std::setprecision(3) << std::setw(9) << r.E_s_p << std::setw(9) << r.E_a_p
           << std::setw(8) << r.E_d << std::setw(9) << r.E_delta << std::setw(8);
        if (r.E_v) {
            os << *r.E_v;
        } else {
            os << "-";
        }
        os << std::setw(9) << r.Omega_a << '\n';
    }
    return os.str();
}

}  // namespace hapdrive::metrics
