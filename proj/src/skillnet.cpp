#include "hapdrive/skillnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

namespace hapdrive::skillnet {

std::string to_string(Channel c) { return c == Channel::steering ? "steering" : "accel"; }

Channel channel_from_string(const std::string& s)
{
    if (s == "steering" || s == "s") {
        return Channel::steering;
    }
    if (s == "accel" || s == "a") {
        return Channel::accel;
    }
    throw ConfigInvalid("unknown channel '" + s + "' (expected steering|accel or s|a)");
}

std::array<double, kEnvDim> compute_env_features(const std::array<double, kEnvDim>& d)
{
    std::array<double, kEnvDim> z{};
    for (int i = 0; i < kEnvDim; ++i) {
        z[i] = 1.0 / (1.0 + d[i]);
    }
    return z;
}

TickChannels tick_channels(const LogRecord& r, Channel c)
{
    TickChannels out{};
    out[0] = c == Channel::steering ? r.theta_s : r.theta_a;
    out[1] = r.v;
    out[2] = r.omega;
    out[3] = r.rpm;
    const auto z = compute_env_features(r.d);
    std::copy(z.begin(), z.end(), out.begin() + 1 + kStateDim);
    return out;
}

FeatureWindow window_from_taps(const std::array<TickChannels, kDepth>& taps)
{
    FeatureWindow w;
    for (int j = 0; j < kDepth; ++j) {
        w.inputs[j] = taps[j][0];
        for (int m = 0; m < kStateDim; ++m) {
            w.inputs[kDepth + kStateDim * j + m] = taps[j][1 + m];
        }
        for (int m = 0; m < kEnvDim; ++m) {
            w.inputs[kDepth * (1 + kStateDim) + kEnvDim * j + m] = taps[j][1 + kStateDim + m];
        }
    }
    return w;
}

int input_channel(int i)
{
    if (i < kDepth) {
        return 0;
    }
    if (i < kDepth * (1 + kStateDim)) {
        return 1 + (i - kDepth) % kStateDim;
    }
    return 1 + kStateDim + (i - kDepth * (1 + kStateDim)) % kEnvDim;
}

FeatureWindow assemble_features(const RunLog& log, std::size_t k, Channel c)
{
    if (k < kFirstValidIndex || k + kTau >= log.size()) {
        throw IndexOutOfRange("window at sample " + std::to_string(k) + " does not fit a log of " +
                              std::to_string(log.size()) + " samples");
    }
    std::array<TickChannels, kDepth> taps{};
    for (int j = 0; j < kDepth; ++j) {
        taps[j] = tick_channels(log.records[k - static_cast<std::size_t>(j * kTau)], c);
    }
    FeatureWindow w = window_from_taps(taps);
    w.label = tick_channels(log.records[k + kTau], c)[0];
    return w;
}

std::size_t window_count(std::size_t n)
{
    const std::size_t need = kFirstValidIndex + kTau + 1;
    return n >= need ? n - need + 1 : 0;
}

std::vector<FeatureWindow> log_windows(const RunLog& log, Channel c, std::size_t stride, std::uint32_t trial)
{
    std::vector<FeatureWindow> out;
    if (window_count(log.size()) == 0) {
        return out;
    }
    stride = std::max<std::size_t>(stride, 1);
    for (std::size_t k = kFirstValidIndex; k + kTau < log.size(); k += stride) {
        out.push_back(assemble_features(log, k, c));
        out.back().trial = trial;
    }
    return out;
}

// ---- Normalizer -------------------------------------------------------------

Normalizer::Normalizer()
{
    lo_.fill(-1.0);
    hi_.fill(1.0);
}

Normalizer::Normalizer(const std::array<double, kChannels>& lo, const std::array<double, kChannels>& hi)
    : lo_(lo), hi_(hi)
{
    for (int i = 0; i < kChannels; ++i) {
        if (!(hi_[i] > lo_[i])) {
            throw ConfigInvalid("normalizer needs max > min on every channel");
        }
    }
}

Normalizer Normalizer::fit(const std::vector<const RunLog*>& logs, Channel c)
{
    std::array<double, kChannels> lo;
    std::array<double, kChannels> hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (const RunLog* log : logs) {
        for (const LogRecord& r : log->records) {
            const TickChannels ch = tick_channels(r, c);
            for (int i = 0; i < kChannels; ++i) {
                lo[i] = std::min(lo[i], ch[i]);
                hi[i] = std::max(hi[i], ch[i]);
            }
        }
    }
    for (int i = 0; i < kChannels; ++i) {
        if (!std::isfinite(lo[i])) {
            throw TooSmall("cannot fit a normalizer to an empty corpus");
        }
        // A channel that never moves still needs a finite scale.
        if (hi[i] - lo[i] < 1e-9) {
            lo[i] -= 0.5;
            hi[i] += 0.5;
        }
    }
    return Normalizer(lo, hi);
}

double Normalizer::normalize(int ch, double x) const { return 2.0 * (x - lo_[ch]) / (hi_[ch] - lo_[ch]) - 1.0; }

double Normalizer::denormalize(int ch, double y) const { return lo_[ch] + 0.5 * (y + 1.0) * (hi_[ch] - lo_[ch]); }

Eigen::VectorXd Normalizer::normalize_inputs(const FeatureWindow& w) const
{
    Eigen::VectorXd x(kInputDim);
    for (int i = 0; i < kInputDim; ++i) {
        x[i] = normalize(input_channel(i), w.inputs[i]);
    }
    return x;
}

// ---- network ----------------------------------------------------------------

TrainConfig TrainConfig::for_channel(Channel c)
{
    TrainConfig cfg;
    cfg.target_cost_pct = c == Channel::steering ? 1.0 : 4.5;
    return cfg;
}

void TrainConfig::validate() const
{
    if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9 || train_fraction <= 0.0 ||
        val_fraction <= 0.0 || test_fraction <= 0.0) {
        throw ConfigInvalid("split fractions must be positive and sum to 1");
    }
    if (!(initial_learning_rate > 0.0) || !(lr_increase >= 1.0) || !(lr_decrease > 0.0 && lr_decrease < 1.0) ||
        !(max_cost_increase >= 1.0) || momentum < 0.0 || momentum >= 1.0 || max_epochs <= 0 ||
        !(target_cost_pct > 0.0)) {
        throw ConfigInvalid("invalid training configuration");
    }
}

SkillNet SkillNet::initialize(Channel c, const Normalizer& norm, std::uint64_t seed, const std::vector<int>& sizes)
{
    if (sizes.size() < 2 || sizes.front() != kInputDim || sizes.back() != 1) {
        throw ConfigInvalid("network must map 45 inputs to 1 output");
    }
    SkillNet net;
    net.channel_ = c;
    net.sizes_ = sizes;
    net.norm_ = norm;
    net.config = TrainConfig::for_channel(c);
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const int in = sizes[l];
        const int out = sizes[l + 1];
        const double a = 1.0 / std::sqrt(static_cast<double>(in));
        std::uniform_real_distribution<double> u(-a, a);
        Layer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
        for (int r = 0; r < out; ++r) {
            for (int k = 0; k < in; ++k) {
                layer.W(r, k) = u(rng);
            }
        }
        for (int r = 0; r < out; ++r) {
            layer.b[r] = u(rng);
        }
        net.layers_.push_back(std::move(layer));
    }
    return net;
}

double SkillNet::forward_normalized(const Eigen::VectorXd& x) const
{
    Eigen::VectorXd a = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        Eigen::VectorXd z = layers_[l].W * a + layers_[l].b;
        a = l + 1 < layers_.size() ? Eigen::VectorXd(z.array().tanh()) : z;
    }
    return a[0];
}

double SkillNet::forward(const FeatureWindow& w) const
{
    return norm_.denormalize_output(forward_normalized(norm_.normalize_inputs(w)));
}

Eigen::RowVectorXd SkillNet::forward_batch(const Eigen::MatrixXd& X) const
{
    Eigen::MatrixXd a = X;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        Eigen::MatrixXd z = layers_[l].W * a;
        z.colwise() += layers_[l].b;
        if (l + 1 < layers_.size()) {
            a = z.array().tanh();
        } else {
            a = std::move(z);
        }
    }
    return a.row(0);
}

std::size_t SkillNet::parameter_count() const
{
    std::size_t n = 0;
    for (const Layer& l : layers_) {
        n += static_cast<std::size_t>(l.W.size() + l.b.size());
    }
    return n;
}

namespace {

Eigen::VectorXd flatten_layers(const std::vector<Layer>& layers)
{
    std::size_t n = 0;
    for (const Layer& l : layers) {
        n += static_cast<std::size_t>(l.W.size() + l.b.size());
    }
    Eigen::VectorXd p(static_cast<Eigen::Index>(n));
    Eigen::Index i = 0;
    for (const Layer& l : layers) {
        for (Eigen::Index r = 0; r < l.W.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.W.cols(); ++c) {
                p[i++] = l.W(r, c);
            }
        }
        for (Eigen::Index r = 0; r < l.b.size(); ++r) {
            p[i++] = l.b[r];
        }
    }
    return p;
}

}  // namespace

Eigen::VectorXd SkillNet::parameters() const { return flatten_layers(layers_); }

void SkillNet::set_parameters(const Eigen::VectorXd& p)
{
    if (static_cast<std::size_t>(p.size()) != parameter_count()) {
        throw ConfigInvalid("parameter vector has the wrong length");
    }
    Eigen::Index i = 0;
    for (Layer& l : layers_) {
        for (Eigen::Index r = 0; r < l.W.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.W.cols(); ++c) {
                l.W(r, c) = p[i++];
            }
        }
        for (Eigen::Index r = 0; r < l.b.size(); ++r) {
            l.b[r] = p[i++];
        }
    }
}

bool SkillNet::operator==(const SkillNet& o) const
{
    if (channel_ != o.channel_ || sizes_ != o.sizes_ || !(norm_ == o.norm_) || layers_.size() != o.layers_.size()) {
        return false;
    }
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        if (layers_[l].W != o.layers_[l].W || layers_[l].b != o.layers_[l].b) {
            return false;
        }
    }
    const auto& h = history;
    const auto& oh = o.history;
    return h.train_cost == oh.train_cost && h.val_cost == oh.val_cost && h.learning_rate == oh.learning_rate &&
           h.accepted == oh.accepted && costs.train == o.costs.train && costs.validation == o.costs.validation &&
           costs.test == o.costs.test && costs.epochs == o.costs.epochs && costs.converged == o.costs.converged;
}

Eigen::VectorXd Gradient::flatten() const { return flatten_layers(layers); }

Dataset make_dataset(const std::vector<FeatureWindow>& windows, const Normalizer& norm)
{
    Dataset d;
    const auto n = static_cast<Eigen::Index>(windows.size());
    d.X.resize(kInputDim, n);
    d.y.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        d.X.col(j) = norm.normalize_inputs(windows[static_cast<std::size_t>(j)]);
        d.y[j] = norm.normalize_label(windows[static_cast<std::size_t>(j)].label);
    }
    return d;
}

double cost(const SkillNet& net, const Dataset& data)
{
    if (data.size() == 0) {
        throw TooSmall("cost of an empty dataset");
    }
    const Eigen::RowVectorXd diff = net.forward_batch(data.X) - data.y;
    return std::sqrt(diff.squaredNorm() / static_cast<double>(data.size()));
}

double cost_percent(const SkillNet& net, const Dataset& data) { return normalized_to_percent(cost(net, data)); }

Gradient backprop_gradient(const SkillNet& net, const Dataset& data)
{
    if (data.size() == 0) {
        throw TooSmall("gradient of an empty batch");
    }
    const auto& layers = net.layers();
    const std::size_t L = layers.size();
    std::vector<Eigen::MatrixXd> acts;
    acts.reserve(L + 1);
    acts.push_back(data.X);
    for (std::size_t l = 0; l < L; ++l) {
        Eigen::MatrixXd z = layers[l].W * acts.back();
        z.colwise() += layers[l].b;
        if (l + 1 < L) {
            acts.emplace_back(z.array().tanh());
        } else {
            acts.push_back(std::move(z));
        }
    }
    const double n = static_cast<double>(data.size());
    const Eigen::RowVectorXd diff = acts.back().row(0) - data.y;
    Gradient g;
    g.cost = std::sqrt(diff.squaredNorm() / n);
    g.layers.resize(L);
    if (g.cost == 0.0) {
        for (std::size_t l = 0; l < L; ++l) {
            g.layers[l].W = Eigen::MatrixXd::Zero(layers[l].W.rows(), layers[l].W.cols());
            g.layers[l].b = Eigen::VectorXd::Zero(layers[l].b.size());
        }
        return g;
    }
    // dC/dy_hat = (y_hat - y) / (n C)
    Eigen::MatrixXd delta = diff / (n * g.cost);
    for (std::size_t l = L; l-- > 0;) {
        g.layers[l].W = delta * acts[l].transpose();
        g.layers[l].b = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd back = layers[l].W.transpose() * delta;
            delta = back.array() * (1.0 - acts[l].array().square());
        }
    }
    return g;
}

Split split_dataset(const std::vector<FeatureWindow>& windows, double f_train, double f_val, std::uint64_t seed,
                    bool by_trial)
{
    const std::size_t n = windows.size();
    if (n < 3) {
        throw TooSmall("need at least three windows to split");
    }
    std::mt19937_64 rng(seed);
    Split out;
    if (!by_trial) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto n_train = static_cast<std::size_t>(std::llround(f_train * static_cast<double>(n)));
        const auto n_val = static_cast<std::size_t>(std::llround(f_val * static_cast<double>(n)));
        if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
            throw TooSmall("a split partition would be empty");
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto& dst = i < n_train ? out.train : (i < n_train + n_val ? out.validation : out.test);
            dst.push_back(windows[idx[i]]);
        }
        return out;
    }
    std::map<std::uint32_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        groups[windows[i].trial].push_back(i);
    }
    std::vector<std::uint32_t> trials;
    for (const auto& [t, _] : groups) {
        trials.push_back(t);
    }
    std::shuffle(trials.begin(), trials.end(), rng);
    const double want_train = f_train * static_cast<double>(n);
    const double want_val = (f_train + f_val) * static_cast<double>(n);
    std::size_t taken = 0;
    for (const auto t : trials) {
        auto& dst = static_cast<double>(taken) < want_train ? out.train
                    : static_cast<double>(taken) < want_val ? out.validation
                                                            : out.test;
        for (const auto i : groups[t]) {
            dst.push_back(windows[i]);
        }
        taken += groups[t].size();
    }
    if (out.train.empty() || out.validation.empty() || out.test.empty()) {
        throw TooSmall("too few trials for a by-trial split");
    }
    return out;
}

SkillNet train(Channel c, const std::vector<FeatureWindow>& windows, const Normalizer& norm, const TrainConfig& cfg)
{
    cfg.validate();
    const Split parts = split_dataset(windows, cfg.train_fraction, cfg.val_fraction, cfg.seed, cfg.split_by_trial);
    const Dataset tr = make_dataset(parts.train, norm);
    const Dataset va = make_dataset(parts.validation, norm);
    const Dataset te = make_dataset(parts.test, norm);

    SkillNet net = SkillNet::initialize(c, norm, cfg.seed, SkillNet::default_sizes());
    net.config = cfg;

    Eigen::VectorXd params = net.parameters();
    Eigen::VectorXd velocity = Eigen::VectorXd::Zero(params.size());
    Gradient grad = backprop_gradient(net, tr);
    double current = grad.cost;
    double lr = cfg.initial_learning_rate;

    SkillNet best = net;
    double best_val = cost_percent(net, va);
    double last_val = best_val;
    bool converged = best_val < cfg.target_cost_pct;
    int epoch = 0;
    TrainHistory hist;

    SkillNet trial = net;
    while (!converged && epoch < cfg.max_epochs) {
        ++epoch;
        const Eigen::VectorXd step = cfg.momentum * velocity - (1.0 - cfg.momentum) * lr * grad.flatten();
        trial.set_parameters(params + step);
        Gradient next = backprop_gradient(trial, tr);
        const bool accept = next.cost <= current * cfg.max_cost_increase;
        if (!accept) {
            lr *= cfg.lr_decrease;
            velocity.setZero();
        } else {
            if (next.cost < current) {
                lr *= cfg.lr_increase;
            }
            params += step;
            velocity = step;
            net.set_parameters(params);
            current = next.cost;
            grad = std::move(next);
            last_val = cost_percent(net, va);
            if (last_val < best_val) {
                best_val = last_val;
                best = net;
            }
            converged = last_val < cfg.target_cost_pct;
        }
        hist.train_cost.push_back(normalized_to_percent(current));
        hist.val_cost.push_back(last_val);
        hist.learning_rate.push_back(lr);
        hist.accepted.push_back(accept ? 1 : 0);
    }

    best.config = cfg;
    best.history = std::move(hist);
    best.costs.train = cost_percent(best, tr);
    best.costs.validation = best_val;
    best.costs.test = cost_percent(best, te);
    best.costs.epochs = epoch;
    best.costs.converged = converged;
    if (!converged) {
        std::ostringstream msg;
        msg << to_string(c) << " network stopped after " << epoch << " epochs at validation cost " << best_val
            << "% (target " << cfg.target_cost_pct << "%)";
        throw DidNotConverge(std::move(best), msg.str());
    }
    return best;
}

// ---- streaming prediction -----------------------------------------------------

PredictStream::PredictStream(const SkillNet* steering, const SkillNet* accel) : steering_(steering), accel_(accel) {}

double PredictStream::predict(const SkillNet& net, Channel c) const
{
    std::array<TickChannels, kDepth> taps{};
    const std::size_t k = history_.size() - 1;
    for (int j = 0; j < kDepth; ++j) {
        taps[j] = tick_channels(history_[k - static_cast<std::size_t>(j * kTau)], c);
    }
    return net.forward(window_from_taps(taps));
}

PredictStream::Prediction PredictStream::push(const LogRecord& r)
{
    history_.push_back(r);
    while (history_.size() > kFirstValidIndex + 1) {
        history_.pop_front();
    }
    Prediction p{r.theta_s, r.theta_a, warm()};
    if (p.warm) {
        if (steering_ != nullptr) {
            p.theta_s_hat = predict(*steering_, Channel::steering);
        }
        if (accel_ != nullptr) {
            p.theta_a_hat = predict(*accel_, Channel::accel);
        }
    }
    return p;
}

// ---- model file -----------------------------------------------------------------

namespace {

using nlohmann::json;

constexpr const char* kFormat = "hapdrive.skillnet";
constexpr int kVersion = 1;

json config_to_json(const TrainConfig& c)
{
    return {{"initial_learning_rate", c.initial_learning_rate},
            {"lr_increase", c.lr_increase},
            {"lr_decrease", c.lr_decrease},
            {"max_cost_increase", c.max_cost_increase},
            {"momentum", c.momentum},
            {"target_cost_pct", c.target_cost_pct},
            {"max_epochs", c.max_epochs},
            {"train_fraction", c.train_fraction},
            {"val_fraction", c.val_fraction},
            {"test_fraction", c.test_fraction},
            {"split_by_trial", c.split_by_trial},
            {"seed", c.seed}};
}

TrainConfig config_from_json(const json& j)
{
    TrainConfig c;
    c.initial_learning_rate = j.at("initial_learning_rate").get<double>();
    c.lr_increase = j.at("lr_increase").get<double>();
    c.lr_decrease = j.at("lr_decrease").get<double>();
    c.max_cost_increase = j.at("max_cost_increase").get<double>();
    c.momentum = j.at("momentum").get<double>();
    c.target_cost_pct = j.at("target_cost_pct").get<double>();
    c.max_epochs = j.at("max_epochs").get<int>();
    c.train_fraction = j.at("train_fraction").get<double>();
    c.val_fraction = j.at("val_fraction").get<double>();
    c.test_fraction = j.at("test_fraction").get<double>();
    c.split_by_trial = j.at("split_by_trial").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

}  // namespace

std::string to_json(const SkillNet& net)
{
    json layers = json::array();
    for (const Layer& l : net.layers()) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < l.W.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < l.W.cols(); ++c) {
                row.push_back(l.W(r, c));
            }
            rows.push_back(std::move(row));
        }
        json b = json::array();
        for (Eigen::Index r = 0; r < l.b.size(); ++r) {
            b.push_back(l.b[r]);
        }
        layers.push_back({{"W", std::move(rows)}, {"b", std::move(b)}});
    }
    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["channel"] = to_string(net.channel());
    j["sizes"] = net.sizes();
    j["activation"] = "tanh";
    j["layers"] = std::move(layers);
    j["normalizer"] = {{"lo", net.normalizer().lo()}, {"hi", net.normalizer().hi()}};
    j["train_config"] = config_to_json(net.config);
    j["costs"] = {{"train_pct", net.costs.train},
                  {"validation_pct", net.costs.validation},
                  {"test_pct", net.costs.test},
                  {"epochs", net.costs.epochs},
                  {"converged", net.costs.converged}};
    j["history"] = {{"train_cost_pct", net.history.train_cost},
                    {"val_cost_pct", net.history.val_cost},
                    {"learning_rate", net.history.learning_rate},
                    {"accepted", net.history.accepted}};
    return j.dump(1);
}

SkillNet from_json(const std::string& body)
{
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw FormatError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kFormat || j.at("version").get<int>() != kVersion) {
            throw FormatError("unsupported model file format or version");
        }
        const Channel c = channel_from_string(j.at("channel").get<std::string>());
        const auto sizes = j.at("sizes").get<std::vector<int>>();
        const Normalizer norm(j.at("normalizer").at("lo").get<std::array<double, kChannels>>(),
                              j.at("normalizer").at("hi").get<std::array<double, kChannels>>());
        SkillNet net = SkillNet::initialize(c, norm, 0, sizes);
        const json& layers = j.at("layers");
        if (layers.size() != net.layers().size()) {
            throw FormatError("layer count does not match sizes");
        }
        for (std::size_t l = 0; l < layers.size(); ++l) {
            Layer& dst = net.layers()[l];
            const json& rows = layers[l].at("W");
            const json& b = layers[l].at("b");
            if (rows.size() != static_cast<std::size_t>(dst.W.rows()) ||
                b.size() != static_cast<std::size_t>(dst.b.size())) {
                throw FormatError("layer shape does not match sizes");
            }
            for (Eigen::Index r = 0; r < dst.W.rows(); ++r) {
                const json& row = rows[static_cast<std::size_t>(r)];
                if (row.size() != static_cast<std::size_t>(dst.W.cols())) {
                    throw FormatError("weight row has the wrong length");
                }
                for (Eigen::Index k = 0; k < dst.W.cols(); ++k) {
                    dst.W(r, k) = row[static_cast<std::size_t>(k)].get<double>();
                }
                dst.b[r] = b[static_cast<std::size_t>(r)].get<double>();
            }
        }
        net.config = config_from_json(j.at("train_config"));
        const json& costs = j.at("costs");
        net.costs.train = costs.at("train_pct").get<double>();
        net.costs.validation = costs.at("validation_pct").get<double>();
        net.costs.test = costs.at("test_pct").get<double>();
        net.costs.epochs = costs.at("epochs").get<int>();
        net.costs.converged = costs.at("converged").get<bool>();
        const json& h = j.at("history");
        net.history.train_cost = h.at("train_cost_pct").get<std::vector<double>>();
        net.history.val_cost = h.at("val_cost_pct").get<std::vector<double>>();
        net.history.learning_rate = h.at("learning_rate").get<std::vector<double>>();
        net.history.accepted = h.at("accepted").get<std::vector<std::uint8_t>>();
        return net;
    } catch (const json::exception& e) {
        throw FormatError(std::string("model file is missing fields: ") + e.what());
    }
}

void save(const SkillNet& net, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigInvalid("cannot write model file " + path);
    }
    out << to_json(net);
}

SkillNet load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigInvalid("cannot read model file " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

}  // namespace hapdrive::skillnet
