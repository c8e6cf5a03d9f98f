#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hapdrive/config.hpp"
#include "hapdrive/guidance.hpp"
#include "hapdrive/metrics.hpp"
#include "hapdrive/runlog.hpp"
#include "hapdrive/session.hpp"
#include "hapdrive/skillnet.hpp"

namespace hapdrive::harness {

struct ExperimentSpec {
    std::string experiment = "collect";  // collect | exp1 | exp2
    int trials = 2;                      // per cell
    int experts = 5;
    int novices = 6;
    std::vector<double> phis_deg = track::training_sweeps_deg();
    std::uint64_t seed = 1;
    double duration_cap = 360.0;
    guidance::GuidanceGains gains;
    std::string output;                  // directory; empty keeps everything in memory

    void validate() const;
    static ExperimentSpec from_json(const config::json& j);
    config::json to_json() const;
};

/// Seed for one run, mixed from the experiment seed and the run's coordinates.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                          std::uint64_t d = 0);

struct CorpusEntry {
    std::string id;
    double phi_deg = 0.0;
    int agent = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    bool completed = false;
    std::size_t samples = 0;
    std::size_t windows = 0;
    std::string sha256;  // of the CSV bytes
    RunLog log;
};

struct Corpus {
    std::vector<CorpusEntry> entries;
    std::size_t total_windows() const;
    std::vector<const RunLog*> logs() const;
};

/// Expert roster over every training sweep. Writes logs, sidecars and
/// manifest.json when spec.output is set.
Corpus run_collect(const ExperimentSpec& spec);
std::string corpus_manifest(const Corpus& corpus, const ExperimentSpec& spec);
/// Reads a corpus directory, checking every checksum and validating every log.
Corpus load_corpus(const std::string& dir);

/// Windows of every log, every `stride`-th index, tagged with the log's position as trial id.
std::vector<skillnet::FeatureWindow> corpus_windows(const Corpus& corpus, skillnet::Channel c,
                                                    std::size_t stride);

/// Normalizer over the whole corpus, then training on its windows.
skillnet::SkillNet train_channel(const Corpus& corpus, skillnet::Channel c, const skillnet::TrainConfig& cfg,
                                 std::size_t stride);

struct ExperimentResult {
    std::vector<metrics::MetricsReport> rows;
    std::vector<RunLog> logs;
    std::vector<SessionConfig> configs;
};

/// Experts then novices drive the exp1 path under method N.
ExperimentResult run_exp1(const ExperimentSpec& spec, const skillnet::SkillNet& net_s,
                          const skillnet::SkillNet& net_a);

/// The six orders of N, G, C; novice i follows order i mod 6.
std::array<std::array<guidance::Method, 3>, 6> method_permutations();

/// Every novice drives the exp2 path once with each method in its order.
ExperimentResult run_exp2(const ExperimentSpec& spec, const skillnet::SkillNet& net_s,
                          const skillnet::SkillNet& net_a);

/// Writes logs, sidecars and reports.csv under spec.output.
void write_result(const ExperimentResult& r, const ExperimentSpec& spec);

}  // namespace hapdrive::harness
