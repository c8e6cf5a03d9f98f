#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hapdrive/error.hpp"
#include "hapdrive/runlog.hpp"

namespace hapdrive::skillnet {

/// Which control the network predicts.
enum class Channel { steering, accel };

std::string to_string(Channel c);
Channel channel_from_string(const std::string& s);

// Tapped-delay layout: D taps spaced tau samples apart, predicting tau ahead.
inline constexpr int kTau = 10;
inline constexpr int kDepth = 5;
inline constexpr int kStateDim = 3;  // v, omega, rpm
inline constexpr int kEnvDim = 5;    // z_1..z_5
inline constexpr int kChannels = 1 + kStateDim + kEnvDim;
inline constexpr int kInputDim = kChannels * kDepth;  // 45
inline constexpr std::size_t kFirstValidIndex = (kDepth - 1) * kTau;  // 40

/// z_i = 1 / (1 + d_i): hazard of collision along each ray.
std::array<double, kEnvDim> compute_env_features(const std::array<double, kEnvDim>& d);

/// The nine per-tick channels a window is built from, in raw units:
/// control, v, omega, rpm, z_1..z_5.
using TickChannels = std::array<double, kChannels>;
TickChannels tick_channels(const LogRecord& r, Channel c);

/// Input vector and label in raw units.
/// inputs = [u(k), u(k-tau) .. u(k-4tau) | (v,omega,rpm) per tap | (z_1..z_5) per tap]
struct FeatureWindow {
    std::array<double, kInputDim> inputs{};
    double label = 0.0;     // control at k + tau
    std::uint32_t trial = 0;
};

/// Builds the window from taps[0] = sample k, taps[1] = k - tau, ...
FeatureWindow window_from_taps(const std::array<TickChannels, kDepth>& taps);

/// Window at sample k of a log. Requires 40 <= k and k + 10 < log.size().
FeatureWindow assemble_features(const RunLog& log, std::size_t k, Channel c);

/// Number of complete windows in a log of n samples.
std::size_t window_count(std::size_t n);

/// All windows of a log, every `stride`-th valid index.
std::vector<FeatureWindow> log_windows(const RunLog& log, Channel c, std::size_t stride = 1,
                                       std::uint32_t trial = 0);

/// Per-channel min-max scaling to [-1, 1].
class Normalizer {
public:
    Normalizer();
    Normalizer(const std::array<double, kChannels>& lo, const std::array<double, kChannels>& hi);

    /// Extrema over every sample of the given logs.
    static Normalizer fit(const std::vector<const RunLog*>& logs, Channel c);

    const std::array<double, kChannels>& lo() const { return lo_; }
    const std::array<double, kChannels>& hi() const { return hi_; }

    double normalize(int channel, double x) const;
    double denormalize(int channel, double y) const;
    /// Control range (theta_M - theta_m) used by the normalized errors.
    double control_range() const { return hi_[0] - lo_[0]; }

    Eigen::VectorXd normalize_inputs(const FeatureWindow& w) const;
    double normalize_label(double label) const { return normalize(0, label); }
    double denormalize_output(double y) const { return denormalize(0, y); }

    bool operator==(const Normalizer&) const = default;

private:
    std::array<double, kChannels> lo_{};
    std::array<double, kChannels> hi_{};
};

/// Channel index feeding input i of the flattened window.
int input_channel(int i);

struct Layer {
    Eigen::MatrixXd W;  // out x in
    Eigen::VectorXd b;
};

struct TrainConfig {
    double initial_learning_rate = 0.5;
    double lr_increase = 1.05;
    double lr_decrease = 0.7;
    double max_cost_increase = 1.04;  // reject a step that raises the cost by more than this
    double momentum = 0.9;            // 0 gives plain adaptive-rate descent
    double target_cost_pct = 1.0;     // delta; 1.0 for steering, 4.5 for the accelerator
    int max_epochs = 5000;
    double train_fraction = 0.70;
    double val_fraction = 0.15;
    double test_fraction = 0.15;
    bool split_by_trial = false;
    std::uint64_t seed = 1;

    static TrainConfig for_channel(Channel c);
    void validate() const;
};

struct TrainHistory {
    std::vector<double> train_cost;  // percent, per attempted epoch
    std::vector<double> val_cost;    // percent, per attempted epoch (last accepted value)
    std::vector<double> learning_rate;
    std::vector<std::uint8_t> accepted;
};

struct FinalCosts {
    double train = 0.0;
    double validation = 0.0;
    double test = 0.0;
    int epochs = 0;
    bool converged = false;
};

/// Shallow tanh MLP with a linear output, plus its normalizer and training record.
class SkillNet {
public:
    static std::vector<int> default_sizes() { return {kInputDim, 32, 24, 16, 8, 1}; }

    SkillNet() = default;
    /// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
    static SkillNet initialize(Channel c, const Normalizer& norm, std::uint64_t seed,
                               const std::vector<int>& sizes = default_sizes());

    Channel channel() const { return channel_; }
    const std::vector<int>& sizes() const { return sizes_; }
    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }
    const Normalizer& normalizer() const { return norm_; }

    /// Prediction in raw units for one window.
    double forward(const FeatureWindow& w) const;
    /// Output in normalized units for a normalized input column.
    double forward_normalized(const Eigen::VectorXd& x) const;
    /// Batch forward; columns are samples.
    Eigen::RowVectorXd forward_batch(const Eigen::MatrixXd& X) const;

    std::size_t parameter_count() const;
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& p);

    TrainConfig config;
    TrainHistory history;
    FinalCosts costs;

    bool operator==(const SkillNet& other) const;

private:
    Channel channel_ = Channel::steering;
    std::vector<int> sizes_;
    std::vector<Layer> layers_;
    Normalizer norm_;
};

/// Normalized design matrix (inputs x samples) and labels.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::RowVectorXd y;
    std::size_t size() const { return static_cast<std::size_t>(X.cols()); }
};

Dataset make_dataset(const std::vector<FeatureWindow>& windows, const Normalizer& norm);

/// C = RMS(prediction - label) on the normalized scale.
double cost(const SkillNet& net, const Dataset& data);
/// The same cost as a percentage of the control range.
double cost_percent(const SkillNet& net, const Dataset& data);
inline double normalized_to_percent(double c) { return 50.0 * c; }

struct Gradient {
    std::vector<Layer> layers;
    double cost = 0.0;
    Eigen::VectorXd flatten() const;
};

/// Exact gradient of the normalized RMS cost over the whole batch.
/// At zero cost the gradient is defined as zero.
Gradient backprop_gradient(const SkillNet& net, const Dataset& data);

struct Split {
    std::vector<FeatureWindow> train;
    std::vector<FeatureWindow> validation;
    std::vector<FeatureWindow> test;
};

/// Random disjoint split; sizes round(n*f_train), round(n*f_val) and the rest.
/// With by_trial the windows of one trial stay together.
Split split_dataset(const std::vector<FeatureWindow>& windows, double f_train, double f_val,
                    std::uint64_t seed, bool by_trial = false);

/// Raised when training stops at max_epochs above the target. Carries the
/// best-validation network and its history.
class DidNotConverge : public Error {
public:
    DidNotConverge(SkillNet net, const std::string& what) : Error(what), net_(std::move(net)) {}
    const SkillNet& net() const { return net_; }

private:
    SkillNet net_;
};

/// Full-batch gradient descent with an adaptive learning rate. Stops once the
/// validation cost drops below target_cost_pct and returns the best-validation weights.
SkillNet train(Channel c, const std::vector<FeatureWindow>& windows, const Normalizer& norm,
               const TrainConfig& config);

/// Online predictor over the live tap buffers. Until 40 samples precede the
/// current one it returns the measured angle.
class PredictStream {
public:
    PredictStream(const SkillNet* steering, const SkillNet* accel);

    struct Prediction {
        double theta_s_hat = 0.0;
        double theta_a_hat = 0.0;
        bool warm = false;
    };

    Prediction push(const LogRecord& r);
    bool warm() const { return history_.size() > kFirstValidIndex; }
    void reset() { history_.clear(); }

private:
    double predict(const SkillNet& net, Channel c) const;

    const SkillNet* steering_;
    const SkillNet* accel_;
    std::deque<LogRecord> history_;
};

/// Versioned JSON model file; doubles round-trip exactly.
std::string to_json(const SkillNet& net);
SkillNet from_json(const std::string& text);
void save(const SkillNet& net, const std::string& path);
SkillNet load(const std::string& path);

}  // namespace hapdrive::skillnet
