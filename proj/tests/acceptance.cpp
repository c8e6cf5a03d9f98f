// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "hapdrive/config.hpp"
#include "hapdrive/experiments.hpp"
#include "hapdrive/guidance.hpp"
#include "hapdrive/haptics.hpp"
#include "hapdrive/metrics.hpp"
#include "hapdrive/session.hpp"
#include "hapdrive/skillnet.hpp"
#include "hapdrive/track.hpp"
#include "hapdrive/units.hpp"
#include "support.hpp"

using namespace hapdrive;
using skillnet::Channel;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream note;

    void expect(bool ok, const std::string& what)
    {
        if (!ok) {
            if (pass) {
                note << "failed: ";
            } else {
                note << "; ";
            }
            note << what;
            pass = false;
        }
    }
};

int failures = 0;

void criterion(int n, const std::string& title, double budget_s, const std::function<void(Outcome&)>& body)
{
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) {
        out.expect(false, "runtime " + std::to_string(secs) + " s over the " + std::to_string(budget_s) + " s budget");
    }
    failures += out.pass ? 0 : 1;
    std::printf("criterion %2d %s  %-44s %7.2f s  %s\n", n, out.pass ? "PASS" : "FAIL", title.c_str(), secs,
                out.note.str().c_str());
    std::fflush(stdout);
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// ---- criterion 8 oracles ----------------------------------------------------------

// Closest midline point by a 0.5-m scan refined on a 1-mm grid offset from round arc lengths.
double oracle_closest_s(const track::TrackPath& path, double x, double y)
{
    auto d2 = [&](double s) {
        const track::Point p = path.point_at(s);
        return (p.x - x) * (p.x - x) + (p.y - y) * (p.y - y);
    };
    double best = 0.0;
    for (double s = 0.0; s <= path.total_length(); s += 0.5) {
        if (d2(s) < d2(best)) {
            best = s;
        }
    }
    const double lo = std::max(0.0, best - 1.0);
    const double hi = std::min(path.total_length(), best + 1.0);
    double fine = lo;
    for (double s = lo + 0.000371; s <= hi; s += 0.001) {
        if (d2(s) < d2(fine)) {
            fine = s;
        }
    }
    return fine;
}

// Window inputs rebuilt from the documented layout, independent of assemble_features.
skillnet::FeatureWindow oracle_window(const RunLog& log, std::size_t k, Channel c)
{
    skillnet::FeatureWindow w;
    int i = 0;
    auto control = [c](const LogRecord& r) { return c == Channel::steering ? r.theta_s : r.theta_a; };
    for (int j = 0; j < 5; ++j) {
        w.inputs[i++] = control(log.records[k - 10 * j]);
    }
    for (int j = 0; j < 5; ++j) {
        const LogRecord& r = log.records[k - 10 * j];
        w.inputs[i++] = r.v;
        w.inputs[i++] = r.omega;
        w.inputs[i++] = r.rpm;
    }
    for (int j = 0; j < 5; ++j) {
        for (const double d : log.records[k - 10 * j].d) {
            w.inputs[i++] = 1.0 / (1.0 + d);
        }
    }
    w.label = control(log.records[k + 10]);
    return w;
}

struct Oracle {
    double E_s_p, E_a_p, E_d, E_delta, Omega_a;
    std::optional<double> E_v;
};

Oracle brute_force(const RunLog& log, const track::TrackPath& path, const skillnet::SkillNet& ns,
                   const skillnet::SkillNet& na, double v_d)
{
    Oracle o{};
    double ss = 0.0, sa = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 40; k + 10 < log.size(); ++k) {
        const auto ws = oracle_window(log, k, Channel::steering);
        const auto wa = oracle_window(log, k, Channel::accel);
        ss += std::pow(ns.forward(ws) - ws.label, 2);
        sa += std::pow(na.forward(wa) - wa.label, 2);
        ++n;
    }
    o.E_s_p = std::sqrt(ss / n) / (ns.normalizer().hi()[0] - ns.normalizer().lo()[0]) * 100.0;
    o.E_a_p = std::sqrt(sa / n) / (na.normalizer().hi()[0] - na.normalizer().lo()[0]) * 100.0;

    double sd = 0.0, sh = 0.0, so = 0.0, sv = 0.0;
    std::size_t nv = 0;
    bool reached = false;
    for (const LogRecord& r : log.records) {
        const double s = oracle_closest_s(path, r.x, r.y);
        const track::Point p = path.point_at(s);
        const double h = path.heading_at(s);
        const double lateral = -(r.x - p.x) * std::sin(h) + (r.y - p.y) * std::cos(h);
        sd += lateral * lateral;
        const double dh = units::rad2deg(std::remainder(r.heading - h, 2.0 * units::kPi));
        sh += dh * dh;
        so += r.theta_a_dot * r.theta_a_dot;
        if (reached) {
            sv += (r.v - v_d) * (r.v - v_d);
            ++nv;
        } else if (r.v >= v_d) {
            reached = true;
        }
    }
    const double m = static_cast<double>(log.size());
    o.E_d = std::sqrt(sd / m);
    o.E_delta = std::sqrt(sh / m);
    o.Omega_a = std::sqrt(so / m);
    if (reached) {
        o.E_v = nv == 0 ? 0.0 : std::sqrt(sv / nv);
    }
    return o;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

int main()
{
    std::printf("hapdrive acceptance\n");

    criterion(1, "torque laws", 1.0, [](Outcome& o) {
        using namespace haptics;
        o.expect(near(steering_torque(0, 0, 0), 0.0, 1e-9), "steering zero");
        o.expect(near(steering_torque(4, 4, 0), 3.0, 1e-9), "alignment 3.0");
        o.expect(near(steering_torque(0, 0, 100), -0.3, 1e-9), "damping+friction -0.3");
        o.expect(near(accelerator_torque(0, 0), 1.0, 1e-9), "theta_a=0 -> 1.0");
        o.expect(near(accelerator_torque(10, 0), 3.0, 1e-9), "theta_a=10 -> 3.0");
        o.expect(near(accelerator_torque(12, 0), 7.4, 1e-9), "theta_a=12 -> 7.4");
        o.expect(near(brake_torque(0, 0), 1.0, 1e-9), "theta_b=0 -> 1.0");
        o.expect(near(brake_torque(5, 0), 2.0, 1e-9), "theta_b=5 -> 2.0");
        o.expect(near(brake_torque(6, 0), 4.2, 1e-9), "theta_b=6 -> 4.2");
        const HapticParams p;
        for (const double end : {p.theta_a_max, p.theta_b_max}) {
            const double below = std::nextafter(end, -1e9);
            o.expect(endpoint_torque(end, end, 2.0) == 0.0, "endpoint zero at the boundary");
            o.expect(std::abs(endpoint_torque(below, end, 2.0) - endpoint_torque(end, end, 2.0)) <= 1e-12,
                     "endpoint continuity");
        }
        o.expect(std::abs(accelerator_torque(std::nextafter(10.0, 0.0), 0) - accelerator_torque(10.0, 0)) <= 1e-12,
                 "accelerator continuity");
        o.expect(std::abs(brake_torque(std::nextafter(5.0, 0.0), 0) - brake_torque(5.0, 0)) <= 1e-12,
                 "brake continuity");
    });

    criterion(2, "guidance laws", 1.0, [](Outcome& o) {
        using namespace guidance;
        const GuidanceGains g;
        SteeringPid pid;
        double T = 0.0;
        for (int i = 0; i <= 800; ++i) {
            T = pid.update(2.0, 1.0 / 800.0, g);
        }
        o.expect(near(T, 1.44, 1e-9), "PID 2 deg for 1 s -> 1.44, got " + std::to_string(T));
        o.expect(near(nn_pedal_assist(7.0, 5.0), 4.0, 1e-9), "pedal 7 vs 5 -> 4.0");
        o.expect(nn_pedal_assist(3.0, 5.0) == 0.0, "pedal below desired -> 0");
        o.expect(near(conventional_desired_steer(2.0, 0.5), 15.8, 1e-9), "desired steer 15.8");
        o.expect(conventional_pedal_torque(4.0, 60.0) == 0.0, "60 km/h no assist");
        o.expect(near(conventional_pedal_torque(4.0, 66.1), 8.0, 1e-9), "66.1 km/h -> 8.0");
        o.expect(near(conventional_pedal_torque(4.0, 66.0), 8.0, 1e-9), "66.0 km/h switches");
        o.expect(conventional_pedal_torque(4.0, std::nextafter(66.0, 0.0)) == 0.0, "just below 66.0 does not");
    });

    criterion(3, "backprop vs finite differences", 30.0, [](Outcome& o) {
        const auto norm = testsupport::wide_normalizer();
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto data = skillnet::make_dataset(testsupport::random_windows(20, 100 + seed), norm);
            const auto net = skillnet::SkillNet::initialize(Channel::steering, norm, seed);
            const Eigen::VectorXd bp = skillnet::backprop_gradient(net, data).flatten();
            const Eigen::VectorXd fd = testsupport::fd_gradient(net, data);
            Eigen::Index off = 0;
            for (const auto& l : net.layers()) {
                const Eigen::Index n = l.W.size() + l.b.size();
                const double rel = (bp.segment(off, n) - fd.segment(off, n)).norm() / fd.segment(off, n).norm();
                worst = std::max(worst, rel);
                off += n;
            }
        }
        o.expect(worst <= 1e-4, "worst layer relative error " + std::to_string(worst));
        o.note << "worst layer relative error " << worst;
    });

    std::optional<harness::Corpus> corpus;
    std::optional<skillnet::SkillNet> net_s;
    std::optional<skillnet::SkillNet> net_a;
    constexpr std::size_t kStride = 40;

    criterion(4, "training convergence (s then a)", 1200.0, [&](Outcome& o) {
        harness::ExperimentSpec spec;
        corpus = harness::run_collect(spec);
        const std::size_t windows = harness::corpus_windows(*corpus, Channel::steering, kStride).size();
        o.expect(windows >= 10000, "corpus has only " + std::to_string(windows) + " windows");
        for (const Channel c : {Channel::steering, Channel::accel}) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto cfg = skillnet::TrainConfig::for_channel(c);
            try {
                auto net = harness::train_channel(*corpus, c, cfg, kStride);
                (c == Channel::steering ? net_s : net_a) = net;
            } catch (const skillnet::DidNotConverge& e) {
                (c == Channel::steering ? net_s : net_a) = e.net();
            }
            const auto& net = c == Channel::steering ? *net_s : *net_a;
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            o.expect(net.costs.validation < cfg.target_cost_pct,
                     skillnet::to_string(c) + " validation " + fmt(net.costs.validation) + "%");
            o.expect(secs < 600.0, skillnet::to_string(c) + " took " + fmt(secs) + " s");
            o.note << skillnet::to_string(c) << " val " << fmt(net.costs.validation) << "% (" << net.costs.epochs
                   << " epochs) ";
        }
        o.note << windows << " windows";
    });

    const bool have_nets = net_s && net_a;

    criterion(5, "hands-off G and C", 120.0, [&](Outcome& o) {
        o.expect(have_nets, "no networks");
        if (!have_nets) {
            return;
        }
        double worst = 0.0;
        for (const auto m : {guidance::Method::G, guidance::Method::C}) {
            for (const double phi : {-90.0, 0.0, 90.0}) {
                for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                    harness::SessionConfig cfg;
                    cfg.path.phi_deg = phi;
                    cfg.method = m;
                    cfg.seed = seed;
                    cfg.driver.hands_on_wheel = false;
                    const auto r = harness::run_session(cfg, &*net_s, &*net_a);
                    double max_ed = 0.0;
                    for (const auto& rec : r.log.records) {
                        max_ed = std::max(max_ed, std::abs(rec.e_d));
                        if (rec.T_s_driver != 0.0) {
                            o.expect(false, "driver steering torque present");
                        }
                    }
                    worst = std::max(worst, max_ed);
                    const std::string tag = std::string(1, guidance::to_char(m)) + " phi " + fmt(phi) + " seed " +
                                            std::to_string(seed);
                    o.expect(r.completed, tag + " did not complete");
                    o.expect(max_ed < 1.75, tag + " max |e_d| " + fmt(max_ed));
                }
            }
        }
        o.note << "worst max |e_d| " << fmt(worst) << " m";
    });

    criterion(6, "exp1 ordering expert < novice", 600.0, [&](Outcome& o) {
        o.expect(have_nets, "no networks");
        if (!have_nets) {
            return;
        }
        harness::ExperimentSpec spec;
        spec.experiment = "exp1";
        spec.experts = 5;
        spec.novices = 5;
        spec.trials = 2;
        const auto r = harness::run_exp1(spec, *net_s, *net_a);
        o.expect(r.rows.size() == 20, "row count");
        using M = metrics::MetricsReport;
        for (const auto& [name, field] : {std::pair<const char*, double M::*>{"Es,p", &M::E_s_p},
                                          {"Ea,p", &M::E_a_p},
                                          {"Edelta", &M::E_delta},
                                          {"Omega_a", &M::Omega_a}}) {
            const double e = metrics::group_mean(r.rows, "expert", 'N', field);
            const double n = metrics::group_mean(r.rows, "novice", 'N', field);
            o.expect(e < n, std::string(name) + " expert " + fmt(e) + " !< novice " + fmt(n));
            o.note << name << " " << fmt(e) << "<" << fmt(n) << " ";
        }
    });

    criterion(7, "exp2 ordering G,C < N", 600.0, [&](Outcome& o) {
        o.expect(have_nets, "no networks");
        if (!have_nets) {
            return;
        }
        harness::ExperimentSpec spec;
        spec.experiment = "exp2";
        spec.novices = 6;
        const auto r = harness::run_exp2(spec, *net_s, *net_a);
        const double n = metrics::group_mean(r.rows, "novice", 'N', &metrics::MetricsReport::E_s_p);
        const double g = metrics::group_mean(r.rows, "novice", 'G', &metrics::MetricsReport::E_s_p);
        const double c = metrics::group_mean(r.rows, "novice", 'C', &metrics::MetricsReport::E_s_p);
        o.expect(g < n, "G " + fmt(g) + " !< N " + fmt(n));
        o.expect(c < n, "C " + fmt(c) + " !< N " + fmt(n));
        o.note << "Es,p N " << fmt(n) << " G " << fmt(g) << " C " << fmt(c);
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            if (r.rows[i].method != 'C') {
                continue;
            }
            bool fast = false;
            bool cue = false;
            for (const auto& rec : r.logs[i].records) {
                fast |= units::ms2kmh(rec.v) >= 66.0;
                cue |= rec.overspeed == 1.0;
            }
            o.expect(fast == cue, "overspeed cue mismatch in " + r.rows[i].run_id);
        }
    });

    criterion(8, "streaming metrics vs brute force", 60.0, [&](Outcome& o) {
        o.expect(have_nets, "no networks");
        if (!have_nets) {
            return;
        }
        double worst_exact = 0.0;
        double worst_ed = 0.0;
        double worst_delta = 0.0;
        for (std::uint64_t i = 0; i < 20; ++i) {
            const double phi = -180.0 + 18.0 * static_cast<double>(i);
            const track::TrackPath path = track::build_training_path(units::deg2rad(phi));
            const RunLog log = testsupport::random_log(1900 + 10 * i, 500 + i, &path);
            const double v_d = 14.0;
            metrics::StreamingMetrics s(&path, &*net_s, &*net_a, v_d);
            for (const auto& r : log.records) {
                s.push(r);
            }
            const metrics::MetricsReport m = s.report();
            const metrics::MetricsReport b = metrics::evaluate(log, path, &*net_s, &*net_a, v_d);
            const Oracle x = brute_force(log, path, *net_s, *net_a, v_d);
            for (const double d : {m.E_s_p - x.E_s_p, m.E_a_p - x.E_a_p, m.Omega_a - x.Omega_a, m.E_s_p - b.E_s_p,
                                   m.E_a_p - b.E_a_p, m.E_d - b.E_d, m.E_delta - b.E_delta, m.Omega_a - b.Omega_a}) {
                worst_exact = std::max(worst_exact, std::abs(d));
            }
            o.expect(m.E_v.has_value() == x.E_v.has_value() && b.E_v.has_value() == x.E_v.has_value(),
                     "E_v presence differs");
            if (m.E_v && x.E_v && b.E_v) {
                worst_exact = std::max({worst_exact, std::abs(*m.E_v - *x.E_v), std::abs(*m.E_v - *b.E_v)});
            }
            worst_ed = std::max(worst_ed, std::abs(m.E_d - x.E_d));
            worst_delta = std::max(worst_delta, std::abs(m.E_delta - x.E_delta));
        }
        o.expect(worst_exact <= 1e-9, "exact metrics differ by " + std::to_string(worst_exact));
        o.expect(worst_ed <= 1e-3, "E_d differs by " + std::to_string(worst_ed));
        o.expect(worst_delta <= 1e-2, "E_delta differs from the geometry oracle by " + std::to_string(worst_delta));
        char buf[160];
        std::snprintf(buf, sizeof buf, "max diff %.1e (exact), E_d %.1e m, E_delta %.1e deg", worst_exact, worst_ed,
                      worst_delta);
        o.note << buf;
    });

    criterion(9, "path generator statistics", 60.0, [](Outcome& o) {
        const track::RandomPathRules rules;
        std::size_t curve_next = 0;
        std::size_t curve_to_straight = 0;
        std::size_t violations = 0;
        std::size_t same_dir = 0;
        for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
            const track::TrackPath p = track::generate_random_path(seed, 4000.0);
            const auto& segs = p.segments();
            if (std::abs(p.total_length() - 4000.0) > 1e-6 || segs.front().kind != track::SegmentKind::straight) {
                ++violations;
            }
            for (std::size_t i = 0; i < segs.size(); ++i) {
                const auto& s = segs[i];
                const bool last = i + 1 == segs.size();
                constexpr double eps = 1e-9;
                if (s.kind == track::SegmentKind::straight) {
                    if (s.length > rules.max_length + eps || (!last && s.length < rules.min_length - eps) ||
                        s.length <= 0.0) {
                        ++violations;
                    }
                } else {
                    const double sweep = std::abs(s.sweep_deg);
                    if (s.radius < rules.min_radius - eps || s.radius > rules.max_radius + eps ||
                        sweep > rules.max_sweep_deg + eps || (!last && sweep < rules.min_sweep_deg - eps) ||
                        sweep <= 0.0) {
                        ++violations;
                    }
                }
                if (!last && s.kind == track::SegmentKind::arc) {
                    ++curve_next;
                    const auto& n = segs[i + 1];
                    if (n.kind == track::SegmentKind::straight) {
                        ++curve_to_straight;
                    } else if ((n.sweep_deg > 0) == (s.sweep_deg > 0)) {
                        ++same_dir;
                    }
                }
            }
        }
        const double freq = static_cast<double>(curve_to_straight) / static_cast<double>(curve_next);
        o.expect(violations == 0, std::to_string(violations) + " bound violations");
        o.expect(same_dir == 0, std::to_string(same_dir) + " same-direction arc pairs");
        o.expect(std::abs(freq - 0.40) <= 0.05, "curve->straight frequency " + fmt(freq));
        o.note << "curve->straight " << fmt(freq) << " over " << curve_next << " transitions";
    });

    criterion(10, "end-to-end determinism", 300.0, [&](Outcome& o) {
        std::vector<harness::SessionConfig> cfgs(3);
        cfgs[0].path.phi_deg = 30.0;
        cfgs[0].seed = 11;
        cfgs[1].path.kind = harness::PathSpec::Kind::exp2;
        cfgs[1].method = guidance::Method::C;
        cfgs[1].driver.skill = agents::Skill::novice;
        cfgs[1].seed = 12;
        cfgs[2].path.phi_deg = -135.0;
        cfgs[2].method = have_nets ? guidance::Method::G : guidance::Method::N;
        cfgs[2].driver.skill = agents::Skill::novice;
        cfgs[2].driver.individual = 3;
        cfgs[2].seed = 13;
        for (const auto& cfg : cfgs) {
            std::string log_bytes[2];
            std::string report_bytes[2];
            for (int k = 0; k < 2; ++k) {
                const auto r = harness::run_session(cfg, have_nets ? &*net_s : nullptr, have_nets ? &*net_a : nullptr);
                log_bytes[k] = to_csv(r.log);
                auto m = metrics::evaluate(r.log, harness::build_path(cfg.path), have_nets ? &*net_s : nullptr,
                                           have_nets ? &*net_a : nullptr, units::kTargetSpeed);
                report_bytes[k] = metrics::reports_to_csv({m});
            }
            o.expect(log_bytes[0] == log_bytes[1], "log bytes differ");
            o.expect(report_bytes[0] == report_bytes[1], "report bytes differ");
        }
        if (corpus) {
            const auto cfg = skillnet::TrainConfig::for_channel(Channel::accel);
            const auto a = harness::train_channel(*corpus, Channel::accel, cfg, kStride);
            o.expect(skillnet::to_json(a) == skillnet::to_json(*net_a), "retrained accel model differs");
        }
        o.note << "3 configs x 2 runs, accel model retrained";
    });

    std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
