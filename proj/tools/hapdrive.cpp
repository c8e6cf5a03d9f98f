// Command-line front end: tracks, data collection, training, experiments, live service.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hapdrive/config.hpp"
#include "hapdrive/error.hpp"
#include "hapdrive/experiments.hpp"
#include "hapdrive/metrics.hpp"
#include "hapdrive/service.hpp"
#include "hapdrive/session.hpp"
#include "hapdrive/skillnet.hpp"
#include "hapdrive/track.hpp"
#include "hapdrive/units.hpp"

namespace fs = std::filesystem;
using namespace hapdrive;

namespace {

struct Nets {
    skillnet::SkillNet s;
    skillnet::SkillNet a;
};

Nets load_nets(const std::string& dir)
{
    return {skillnet::load((fs::path(dir) / "f_s.json").string()), skillnet::load((fs::path(dir) / "f_a.json").string())};
}

harness::ExperimentSpec load_spec(const std::string& path, const std::string& experiment)
{
    harness::ExperimentSpec spec;
    if (!path.empty()) {
        spec = harness::ExperimentSpec::from_json(config::read_file(path));
    }
    spec.experiment = experiment;
    return spec;
}

void print_group_means(const std::vector<metrics::MetricsReport>& rows)
{
    std::vector<std::pair<std::string, char>> cells;
    for (const auto& r : rows) {
        const std::pair<std::string, char> key{r.group, r.method};
        if (std::find(cells.begin(), cells.end(), key) == cells.end()) {
            cells.push_back(key);
        }
    }
    std::cout << "\ngroup    method  Es,p %   Ea,p %   Ed m     Edelta   Omega_a\n";
    for (const auto& [group, method] : cells) {
        std::printf("%-8s %-7c %-8.3f %-8.3f %-8.3f %-8.3f %-8.3f\n", group.c_str(), method,
                    metrics::group_mean(rows, group, method, &metrics::MetricsReport::E_s_p),
                    metrics::group_mean(rows, group, method, &metrics::MetricsReport::E_a_p),
                    metrics::group_mean(rows, group, method, &metrics::MetricsReport::E_d),
                    metrics::group_mean(rows, group, method, &metrics::MetricsReport::E_delta),
                    metrics::group_mean(rows, group, method, &metrics::MetricsReport::Omega_a));
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hapdrive: haptic driving guidance simulator"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate-track", "Write a random path in the track text format");
    std::uint64_t gen_seed = 1;
    double gen_length = 4000.0;
    double gen_clearance = 0.0;
    std::string gen_out;
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--length", gen_length, "Total length, m");
    gen->add_option("--clearance", gen_clearance, "Reject self-approaching paths closer than this, m (0 disables)");
    gen->add_option("--out", gen_out, "Output file (stdout if omitted)");

    auto* run = app.add_subcommand("run", "Run one session from a session config");
    std::string run_config;
    std::string run_nets;
    run->add_option("--config", run_config, "Session config JSON")->required();
    run->add_option("--nets", run_nets, "Directory with f_s.json and f_a.json");

    auto* collect = app.add_subcommand("collect", "Drive the expert roster over the training paths");
    std::string collect_config;
    std::string collect_out;
    collect->add_option("--config", collect_config, "Experiment spec JSON");
    collect->add_option("--out", collect_out, "Corpus directory (overrides the experiment spec)");

    auto* train = app.add_subcommand("train", "Train one skill network on a corpus");
    std::string train_corpus;
    std::string train_channel = "s";
    std::string train_out;
    std::size_t train_stride = 40;
    skillnet::TrainConfig tc;
    int train_epochs = tc.max_epochs;
    double train_momentum = tc.momentum;
    std::uint64_t train_seed = tc.seed;
    bool by_trial = false;
    train->add_option("--corpus", train_corpus, "Corpus directory")->required();
    train->add_option("--channel", train_channel, "s (steering) or a (accelerator)");
    train->add_option("--out", train_out, "Model file")->required();
    train->add_option("--stride", train_stride, "Use every n-th window");
    train->add_option("--max-epochs", train_epochs, "Epoch limit");
    train->add_option("--momentum", train_momentum, "Momentum coefficient");
    train->add_option("--seed", train_seed, "Initialisation and split seed");
    train->add_flag("--split-by-trial", by_trial, "Keep the windows of one trial in one partition");

    auto* exp1 = app.add_subcommand("exp1", "Experts and novices on the exp1 path under method N");
    auto* exp2 = app.add_subcommand("exp2", "Novices on the exp2 path under N, G and C");
    std::string exp_nets;
    std::string exp_out;
    std::string exp_config;
    for (auto* sub : {exp1, exp2}) {
        sub->add_option("--nets", exp_nets, "Directory with f_s.json and f_a.json")->required();
        sub->add_option("--out", exp_out, "Output directory");
        sub->add_option("--config", exp_config, "Experiment spec JSON");
    }

    auto* serve = app.add_subcommand("serve", "Live-drive WebSocket service");
    std::string bind = "127.0.0.1:8765";
    std::string serve_nets;
    serve->add_option("--bind", bind, "address:port");
    serve->add_option("--nets", serve_nets, "Directory with f_s.json and f_a.json (enables method G)");

    auto* report = app.add_subcommand("report", "Print a metrics report and its group means");
    std::string report_runs;
    report->add_option("--runs", report_runs, "reports.csv")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const track::TrackPath path = gen_clearance > 0.0
                                              ? track::pick_clear_random_path(gen_seed, gen_length, gen_clearance)
                                              : track::generate_random_path(gen_seed, gen_length);
            const std::string text = track::to_text(path);
            if (gen_out.empty()) {
                std::cout << text;
            } else {
                config::write_file(gen_out, text);
            }
        } else if (*run) {
            const harness::SessionConfig cfg = config::session_config_from_json(config::read_file(run_config));
            std::optional<Nets> nets;
            if (!run_nets.empty()) {
                nets = load_nets(run_nets);
            } else if (!cfg.net_s_path.empty()) {
                nets = Nets{skillnet::load(cfg.net_s_path), skillnet::load(cfg.net_a_path)};
            }
            const harness::SessionResult r =
                harness::run_session(cfg, nets ? &nets->s : nullptr, nets ? &nets->a : nullptr);
            if (!cfg.log_path.empty()) {
                config::write_file(cfg.log_path, to_csv(r.log));
            }
            metrics::MetricsReport m = metrics::evaluate(r.log, harness::build_path(cfg.path), nets ? &nets->s : nullptr,
                                                         nets ? &nets->a : nullptr, units::kTargetSpeed);
            m.run_id = "run";
            m.group = agents::to_string(cfg.driver.skill);
            std::cout << (r.completed ? "completed" : "stopped at the duration cap") << " after "
                      << r.log.size() << " samples\n"
                      << metrics::format_table({m});
        } else if (*collect) {
            harness::ExperimentSpec spec = load_spec(collect_config, "collect");
            if (!collect_out.empty()) {
                spec.output = collect_out;
            }
            if (spec.output.empty()) {
                throw ConfigInvalid("collect needs an output directory (--out or spec.output)");
            }
            const harness::Corpus corpus = harness::run_collect(spec);
            std::size_t completed = 0;
            for (const auto& e : corpus.entries) {
                completed += e.completed ? 1 : 0;
            }
            std::cout << corpus.entries.size() << " runs (" << completed << " completed), "
                      << corpus.total_windows() << " windows, manifest in " << spec.output << "\n";
        } else if (*train) {
            const harness::Corpus corpus = harness::load_corpus(train_corpus);
            const skillnet::Channel ch = skillnet::channel_from_string(train_channel);
            skillnet::TrainConfig cfg = skillnet::TrainConfig::for_channel(ch);
            cfg.max_epochs = train_epochs;
            cfg.momentum = train_momentum;
            cfg.seed = train_seed;
            cfg.split_by_trial = by_trial;
            int status = 0;
            skillnet::SkillNet net;
            try {
                net = harness::train_channel(corpus, ch, cfg, train_stride);
            } catch (const skillnet::DidNotConverge& e) {
                std::cerr << e.what() << "\n";
                net = e.net();
                status = 2;
            }
            skillnet::save(net, train_out);
            std::cout << skillnet::to_string(ch) << ": " << net.costs.epochs << " epochs, C% train "
                      << net.costs.train << " validation " << net.costs.validation << " test " << net.costs.test
                      << (net.costs.converged ? " (converged)" : " (not converged)") << "\n";
            return status;
        } else if (*exp1 || *exp2) {
            harness::ExperimentSpec spec = load_spec(exp_config, *exp1 ? "exp1" : "exp2");
            if (!exp_out.empty()) {
                spec.output = exp_out;
            }
            const Nets nets = load_nets(exp_nets);
            const harness::ExperimentResult r =
                *exp1 ? harness::run_exp1(spec, nets.s, nets.a) : harness::run_exp2(spec, nets.s, nets.a);
            harness::write_result(r, spec);
            std::cout << metrics::format_table(r.rows);
            print_group_means(r.rows);
        } else if (*serve) {
            const auto colon = bind.rfind(':');
            if (colon == std::string::npos) {
                throw ConfigInvalid("--bind must be address:port");
            }
            std::optional<Nets> nets;
            if (!serve_nets.empty()) {
                nets = load_nets(serve_nets);
            }
            service::ServiceOptions opt;
            if (nets) {
                opt.net_s = &nets->s;
                opt.net_a = &nets->a;
            }
            service::Server server(bind.substr(0, colon),
                                   static_cast<std::uint16_t>(std::stoi(bind.substr(colon + 1))), opt);
            std::cout << "listening on " << bind.substr(0, colon) << ":" << server.port() << std::endl;
            server.run();
        } else if (*report) {
            const auto rows = metrics::reports_from_csv(config::read_text(report_runs));
            std::cout << metrics::format_table(rows);
            print_group_means(rows);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
