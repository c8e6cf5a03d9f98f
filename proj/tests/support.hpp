#pragma once

#include <cmath>
#include <random>

#include "hapdrive/runlog.hpp"
#include "hapdrive/skillnet.hpp"
#include "hapdrive/track.hpp"

namespace testsupport {

using hapdrive::LogRecord;
using hapdrive::RunLog;

/// Log of n samples whose channels wander randomly inside plausible ranges.
/// With a path, the poses follow its midline with a random lateral wobble.
inline RunLog random_log(std::size_t n, std::uint64_t seed, const hapdrive::track::TrackPath* path = nullptr)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RunLog log;
    double th_s = 0.0, th_a = 2.0, v = 10.0 + 8.0 * u(rng), lat = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        LogRecord r;
        r.t = static_cast<double>(k) * 0.02;
        const double prev_a = th_a;
        th_s = std::clamp(th_s + 3.0 * g(rng), -200.0, 200.0);
        th_a = std::clamp(th_a + 0.5 * g(rng), -5.0, 15.0);
        v = std::clamp(v + 0.2 * g(rng), 0.0, 25.0);
        lat = std::clamp(lat + 0.05 * g(rng), -1.5, 1.5);
        r.theta_s = th_s;
        r.theta_a = th_a;
        r.theta_a_dot = (th_a - prev_a) / 0.02;
        r.v = v;
        r.omega = 5.0 * g(rng);
        r.rpm = 800.0 + 70.0 * v;
        for (double& d : r.d) {
            d = 60.0 * u(rng);
        }
        if (path != nullptr) {
            const double s = std::min(path->total_length(), 0.3 * static_cast<double>(k));
            const hapdrive::track::Point p = path->offset_point(s, lat);
            r.x = p.x;
            r.y = p.y;
            r.heading = path->heading_at(s) + 0.02 * g(rng);
        } else {
            r.x = static_cast<double>(k);
        }
        log.records.push_back(r);
    }
    return log;
}

/// Network with every weight zero and the output bias set to `y` (normalized units).
inline hapdrive::skillnet::SkillNet constant_net(hapdrive::skillnet::Channel c,
                                                 const hapdrive::skillnet::Normalizer& norm, double y)
{
    auto net = hapdrive::skillnet::SkillNet::initialize(c, norm, 1);
    for (auto& l : net.layers()) {
        l.W.setZero();
        l.b.setZero();
    }
    net.layers().back().b[0] = y;
    return net;
}

inline hapdrive::skillnet::Normalizer wide_normalizer()
{
    std::array<double, hapdrive::skillnet::kChannels> lo{-300.0, 0.0, -50.0, 700.0, 0, 0, 0, 0, 0};
    std::array<double, hapdrive::skillnet::kChannels> hi{300.0, 30.0, 50.0, 3000.0, 1, 1, 1, 1, 1};
    return {lo, hi};
}

/// Central finite differences of the normalized cost over every parameter.
inline Eigen::VectorXd fd_gradient(const hapdrive::skillnet::SkillNet& net,
                                   const hapdrive::skillnet::Dataset& data, double h = 1e-6)
{
    hapdrive::skillnet::SkillNet probe = net;
    const Eigen::VectorXd p0 = net.parameters();
    Eigen::VectorXd g(p0.size());
    for (Eigen::Index i = 0; i < p0.size(); ++i) {
        Eigen::VectorXd p = p0;
        p[i] = p0[i] + h;
        probe.set_parameters(p);
        const double up = hapdrive::skillnet::cost(probe, data);
        p[i] = p0[i] - h;
        probe.set_parameters(p);
        const double down = hapdrive::skillnet::cost(probe, data);
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

/// Random windows with inputs spread over the wide normalizer's ranges.
inline std::vector<hapdrive::skillnet::FeatureWindow> random_windows(std::size_t n, std::uint64_t seed)
{
    using namespace hapdrive::skillnet;
    const Normalizer norm = wide_normalizer();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<FeatureWindow> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (int i = 0; i < kInputDim; ++i) {
            out[j].inputs[i] = norm.denormalize(input_channel(i), 0.95 * u(rng));
        }
        out[j].label = norm.denormalize(0, 0.9 * u(rng));
        out[j].trial = static_cast<std::uint32_t>(j % 7);
    }
    return out;
}

}  // namespace testsupport
