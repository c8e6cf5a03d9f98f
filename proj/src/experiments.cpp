#include "hapdrive/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "hapdrive/error.hpp"
#include "hapdrive/units.hpp"

namespace hapdrive::harness {

namespace fs = std::filesystem;
using config::json;

void ExperimentSpec::validate() const
{
    if (experiment != "collect" && experiment != "exp1" && experiment != "exp2") {
        throw ConfigInvalid("experiment must be collect, exp1 or exp2");
    }
    if (trials <= 0 || experts < 0 || novices < 0) {
        throw ConfigInvalid("trial and roster counts must be positive");
    }
    if (!(duration_cap > 0.0)) {
        throw ConfigInvalid("duration cap must be positive");
    }
    for (const double phi : phis_deg) {
        if (std::abs(phi) > 180.0) {
            throw ConfigInvalid("training sweeps must lie in [-180, 180] deg");
        }
    }
}

ExperimentSpec ExperimentSpec::from_json(const json& j)
{
    if (!j.is_object()) {
        throw ConfigInvalid("experiment spec must be a JSON object");
    }
    ExperimentSpec s;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "experiment") {
                s.experiment = value.get<std::string>();
            } else if (key == "trials") {
                s.trials = value.get<int>();
            } else if (key == "experts") {
                s.experts = value.get<int>();
            } else if (key == "novices") {
                s.novices = value.get<int>();
            } else if (key == "phis_deg") {
                s.phis_deg = value.get<std::vector<double>>();
            } else if (key == "seed") {
                s.seed = value.get<std::uint64_t>();
            } else if (key == "duration_cap_s") {
                s.duration_cap = value.get<double>();
            } else if (key == "gains") {
                s.gains = config::gains_from_json(value);
            } else if (key == "output") {
                s.output = value.get<std::string>();
            } else {
                throw ConfigInvalid("unknown key '" + key + "' in experiment spec");
            }
        } catch (const json::exception& e) {
            throw ConfigInvalid("bad value for '" + key + "': " + e.what());
        }
    }
    s.validate();
    return s;
}

json ExperimentSpec::to_json() const
{
    return {{"experiment", experiment}, {"trials", trials},
            {"experts", experts},       {"novices", novices},
            {"phis_deg", phis_deg},     {"seed", seed},
            {"duration_cap_s", duration_cap}, {"gains", config::to_json(gains)},
            {"output", output}};
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d)
{
    // splitmix64 over the coordinates
    std::uint64_t x = base;
    for (const std::uint64_t v : {a, b, c, d}) {
        x += 0x9e3779b97f4a7c15ULL + v;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        x = z ^ (z >> 31);
    }
    return x;
}

std::size_t Corpus::total_windows() const
{
    std::size_t n = 0;
    for (const CorpusEntry& e : entries) {
        n += e.windows;
    }
    return n;
}

std::vector<const RunLog*> Corpus::logs() const
{
    std::vector<const RunLog*> out;
    for (const CorpusEntry& e : entries) {
        out.push_back(&e.log);
    }
    return out;
}

namespace {

std::string sweep_tag(double phi)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+04d", static_cast<int>(std::lround(phi)));
    return buf;
}

void write_run(const std::string& dir, const std::string& id, const RunLog& log, const SessionConfig& cfg,
               const std::string& csv)
{
    config::write_file((fs::path(dir) / "logs" / (id + ".csv")).string(), csv);
    json side = {{"id", id},
                 {"config", config::to_json(cfg)},
                 {"samples", log.size()},
                 {"sha256", config::sha256_hex(csv)}};
    config::write_file((fs::path(dir) / "logs" / (id + ".json")).string(), side.dump(1) + "\n");
}

SessionConfig base_config(const ExperimentSpec& spec)
{
    SessionConfig cfg;
    cfg.duration_cap = spec.duration_cap;
    cfg.gains = spec.gains;
    return cfg;
}

}  // namespace

Corpus run_collect(const ExperimentSpec& spec)
{
    spec.validate();
    Corpus corpus;
    for (int a = 0; a < spec.experts; ++a) {
        for (std::size_t p = 0; p < spec.phis_deg.size(); ++p) {
            for (int t = 0; t < spec.trials; ++t) {
                SessionConfig cfg = base_config(spec);
                cfg.path.kind = PathSpec::Kind::training;
                cfg.path.phi_deg = spec.phis_deg[p];
                cfg.method = guidance::Method::N;
                cfg.driver.skill = agents::Skill::expert;
                cfg.driver.individual = a;
                cfg.seed = derive_seed(spec.seed, 1, static_cast<std::uint64_t>(a), p, static_cast<std::uint64_t>(t));

                CorpusEntry e;
                e.id = "expert" + std::to_string(a) + "_phi" + sweep_tag(spec.phis_deg[p]) + "_t" + std::to_string(t);
                e.phi_deg = spec.phis_deg[p];
                e.agent = a;
                e.trial = t;
                e.seed = cfg.seed;
                SessionResult r = run_session(cfg);
                e.completed = r.completed;
                e.log = std::move(r.log);
                e.samples = e.log.size();
                e.windows = skillnet::window_count(e.samples);
                const std::string csv = to_csv(e.log);
                e.sha256 = config::sha256_hex(csv);
                if (!spec.output.empty()) {
                    write_run(spec.output, e.id, e.log, cfg, csv);
                }
                corpus.entries.push_back(std::move(e));
            }
        }
    }
    if (!spec.output.empty()) {
        config::write_file((fs::path(spec.output) / "manifest.json").string(), corpus_manifest(corpus, spec));
    }
    return corpus;
}

std::string corpus_manifest(const Corpus& corpus, const ExperimentSpec& spec)
{
    json runs = json::array();
    for (const CorpusEntry& e : corpus.entries) {
        runs.push_back({{"id", e.id},
                        {"file", "logs/" + e.id + ".csv"},
                        {"phi_deg", e.phi_deg},
                        {"agent", e.agent},
                        {"trial", e.trial},
                        {"seed", e.seed},
                        {"completed", e.completed},
                        {"samples", e.samples},
                        {"windows", e.windows},
                        {"sha256", e.sha256}});
    }
    json j = {{"format", "hapdrive.corpus"},
              {"version", 1},
              {"spec", spec.to_json()},
              {"runs", runs},
              {"total_windows", corpus.total_windows()}};
    return j.dump(1) + "\n";
}

Corpus load_corpus(const std::string& dir)
{
    const json m = config::read_file((fs::path(dir) / "manifest.json").string());
    Corpus corpus;
    try {
        if (m.at("format").get<std::string>() != "hapdrive.corpus") {
            throw FormatError("not a corpus manifest");
        }
        for (const json& r : m.at("runs")) {
            CorpusEntry e;
            e.id = r.at("id").get<std::string>();
            e.phi_deg = r.at("phi_deg").get<double>();
            e.agent = r.at("agent").get<int>();
            e.trial = r.at("trial").get<int>();
            e.seed = r.at("seed").get<std::uint64_t>();
            e.completed = r.at("completed").get<bool>();
            e.sha256 = r.at("sha256").get<std::string>();
            const std::string csv = config::read_text((fs::path(dir) / r.at("file").get<std::string>()).string());
            if (config::sha256_hex(csv) != e.sha256) {
                throw FormatError("checksum mismatch for " + e.id);
            }
            e.log = from_csv(csv);
            validate(e.log);
            e.samples = e.log.size();
            e.windows = skillnet::window_count(e.samples);
            corpus.entries.push_back(std::move(e));
        }
    } catch (const json::exception& ex) {
        throw FormatError(std::string("malformed corpus manifest: ") + ex.what());
    }
    return corpus;
}

std::vector<skillnet::FeatureWindow> corpus_windows(const Corpus& corpus, skillnet::Channel c, std::size_t stride)
{
    std::vector<skillnet::FeatureWindow> out;
    for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
        auto w = skillnet::log_windows(corpus.entries[i].log, c, stride, static_cast<std::uint32_t>(i));
        out.insert(out.end(), w.begin(), w.end());
    }
    return out;
}

skillnet::SkillNet train_channel(const Corpus& corpus, skillnet::Channel c, const skillnet::TrainConfig& cfg,
                                 std::size_t stride)
{
    const skillnet::Normalizer norm = skillnet::Normalizer::fit(corpus.logs(), c);
    return skillnet::train(c, corpus_windows(corpus, c, stride), norm, cfg);
}

namespace {

void add_run(ExperimentResult& out, const SessionConfig& cfg, const std::string& id, const std::string& group,
             const std::string& agent, const skillnet::SkillNet& net_s, const skillnet::SkillNet& net_a)
{
    SessionResult r = run_session(cfg, &net_s, &net_a);
    const track::TrackPath path = build_path(cfg.path);
    metrics::MetricsReport m = metrics::evaluate(r.log, path, &net_s, &net_a, units::kTargetSpeed);
    m.run_id = id;
    m.group = group;
    m.agent = agent;
    m.seed = cfg.seed;
    out.rows.push_back(std::move(m));
    out.logs.push_back(std::move(r.log));
    out.configs.push_back(cfg);
}

}  // namespace

ExperimentResult run_exp1(const ExperimentSpec& spec, const skillnet::SkillNet& net_s,
                          const skillnet::SkillNet& net_a)
{
    spec.validate();
    ExperimentResult out;
    for (const agents::Skill skill : {agents::Skill::expert, agents::Skill::novice}) {
        const int roster = skill == agents::Skill::expert ? spec.experts : spec.novices;
        const std::string group = agents::to_string(skill);
        for (int a = 0; a < roster; ++a) {
            for (int t = 0; t < spec.trials; ++t) {
                SessionConfig cfg = base_config(spec);
                cfg.path.kind = PathSpec::Kind::exp1;
                cfg.method = guidance::Method::N;
                cfg.driver.skill = skill;
                cfg.driver.individual = a;
                cfg.seed = derive_seed(spec.seed, 2, skill == agents::Skill::expert ? 0 : 1,
                                       static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(t));
                const std::string agent = group + std::to_string(a);
                add_run(out, cfg, "exp1_" + agent + "_t" + std::to_string(t), group, agent, net_s, net_a);
            }
        }
    }
    return out;
}

std::array<std::array<guidance::Method, 3>, 6> method_permutations()
{
    using guidance::Method;
    return {{{Method::N, Method::G, Method::C},
             {Method::N, Method::C, Method::G},
             {Method::G, Method::N, Method::C},
             {Method::G, Method::C, Method::N},
             {Method::C, Method::N, Method::G},
             {Method::C, Method::G, Method::N}}};
}

ExperimentResult run_exp2(const ExperimentSpec& spec, const skillnet::SkillNet& net_s,
                          const skillnet::SkillNet& net_a)
{
    spec.validate();
    const auto perms = method_permutations();
    ExperimentResult out;
    for (int a = 0; a < spec.novices; ++a) {
        const auto& order = perms[static_cast<std::size_t>(a) % perms.size()];
        for (int t = 0; t < spec.trials; ++t) {
            for (std::size_t pos = 0; pos < order.size(); ++pos) {
                SessionConfig cfg = base_config(spec);
                cfg.path.kind = PathSpec::Kind::exp2;
                cfg.method = order[pos];
                cfg.driver.skill = agents::Skill::novice;
                cfg.driver.individual = a;
                cfg.seed = derive_seed(spec.seed, 3, static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(t),
                                       pos);
                const std::string agent = "novice" + std::to_string(a);
                const std::string id = "exp2_" + agent + "_t" + std::to_string(t) + "_p" + std::to_string(pos) + "_" +
                                       guidance::to_char(order[pos]);
                add_run(out, cfg, id, "novice", agent, net_s, net_a);
            }
        }
    }
    return out;
}

void write_result(const ExperimentResult& r, const ExperimentSpec& spec)
{
    if (spec.output.empty()) {
        return;
    }
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        write_run(spec.output, r.rows[i].run_id, r.logs[i], r.configs[i], to_csv(r.logs[i]));
    }
    config::write_file((fs::path(spec.output) / "reports.csv").string(), metrics::reports_to_csv(r.rows));
    config::write_file((fs::path(spec.output) / "spec.json").string(), spec.to_json().dump(1) + "\n");
}

}  // namespace hapdrive::harness
