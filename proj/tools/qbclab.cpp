// Command-line front end: rate-region sweeps, finite-blocklength simulation,
// tau-net discretization of convex channel families, and operator-sampling
// concentration checks. All outputs are deterministic functions of the input
// files and the seed, so repeated runs are byte-identical.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qbclab/channels.hpp"
#include "qbclab/codesim.hpp"
#include "qbclab/errors.hpp"
#include "qbclab/regions.hpp"
#include "qbclab/serialization.hpp"

namespace {

using nlohmann::json;

std::filesystem::path ensure_out_dir(const std::string& out) {
    std::filesystem::path dir(out);
    std::filesystem::create_directories(dir);
    return dir;
}

json corner_to_json(const qbclab::RegionCorner& c) {
    return json{{"r_pub", c.r_pub},           {"r_c", c.r_c},
                {"r_c_raw", c.r_c_raw},       {"member_pub", c.member_pub},
                {"member_bob", c.member_bob}, {"member_eve", c.member_eve},
                {"slack", c.slack}};
}

struct RegionArgs {
    std::string channels;
    std::string input_dist;
    std::string out;
    std::uint64_t seed = 1;
    std::vector<double> weights;
    int restarts = 6;
    int sweeps = 60;
    int l = 1;
    std::size_t size_u = 0;
    std::size_t size_y = 0;
};

void add_region_command(CLI::App& app, const std::string& name, qbclab::Scenario scenario,
                        const std::string& description) {
    auto args = std::make_shared<RegionArgs>();
    CLI::App* cmd = app.add_subcommand(name, description);
    cmd->add_option("--channels", args->channels, "compound-set JSON file")->required();
    cmd->add_option("--out", args->out, "output directory")->required();
    cmd->add_option("--input-dist", args->input_dist,
                    "factorized-input JSON file; evaluate it instead of optimizing");
    cmd->add_option("--seed", args->seed, "optimizer seed");
    cmd->add_option("--weights", args->weights, "scalarization weights")->delimiter(',');
    cmd->add_option("--restarts", args->restarts, "optimizer restarts per weight");
    cmd->add_option("--sweeps", args->sweeps, "coordinate-ascent sweep limit");
    cmd->add_option("--l", args->l, "block length of the last input stage");
    cmd->add_option("--size-u", args->size_u, "outer alphabet size (0 = channel alphabet)");
    cmd->add_option("--size-y", args->size_y, "inner alphabet size (0 = channel alphabet)");

    cmd->callback([args, scenario, name]() {
        const qbclab::CompoundSet set = qbclab::load_compound(args->channels);
        const std::filesystem::path dir = ensure_out_dir(args->out);
        qbclab::CsvWriter csv({"weight", "r_pub", "r_c", "r_c_raw", "member_pub", "member_bob",
                               "member_eve", "slack"});
        json report;
        report["command"] = name;
        report["channels"] = args->channels;
        report["members"] = set.size();

        const auto emit = [&csv](double weight, const qbclab::RegionCorner& c) {
            csv.num(weight)
                .num(c.r_pub)
                .num(c.r_c)
                .num(c.r_c_raw)
                .integer(c.member_pub)
                .integer(c.member_bob)
                .integer(c.member_eve)
                .num(c.slack);
            csv.end_row();
        };

        if (!args->input_dist.empty()) {
            const qbclab::FactorizedInput input = qbclab::load_input(args->input_dist);
            const qbclab::RegionCorner corner = scenario == qbclab::Scenario::Bcc
                                                    ? qbclab::evaluate_bcc_corner(set, input)
                                                    : qbclab::evaluate_tpc_corner(set, input);
            emit(-1.0, corner);
            report["mode"] = "evaluate";
            report["corner"] = corner_to_json(corner);
        } else {
            qbclab::OptimizerConfig config;
            config.scenario = scenario;
            config.seed = args->seed;
            config.weights = args->weights;
            config.restarts = args->restarts;
            config.max_sweeps = args->sweeps;
            config.l = args->l;
            config.size_u = args->size_u;
            config.size_y = args->size_y;
            const qbclab::RateRegion region = qbclab::optimize_region(set, config);
            json corners = json::array();
            for (const auto& wc : region.corners) {
                emit(wc.weight, wc.corner);
                corners.push_back(json{{"weight", wc.weight},
                                       {"corner", corner_to_json(wc.corner)},
                                       {"input", qbclab::input_to_json(wc.input)}});
            }
            json frontier = json::array();
            for (const auto& c : region.frontier) frontier.push_back(corner_to_json(c));
            report["mode"] = "optimize";
            report["seed"] = args->seed;
            report["corners"] = std::move(corners);
            report["frontier"] = std::move(frontier);
        }
        csv.write((dir / "region.csv").string());
        qbclab::write_text((dir / "report.json").string(), qbclab::canonical_dump(report));
    });
}

struct SimulateArgs {
    std::string channels;
    std::string input_dist;
    std::string out;
    std::vector<int> n_grid{4, 6, 8};
    std::size_t seeds = 1;
    std::uint64_t seed = 1;
    double margin = 0.15;
    double delta = 0.5;
    std::string method = "pgm";
    double threshold = 1.0;
    std::vector<std::size_t> layout;
    std::vector<double> rates;
    bool no_leakage = false;
};

void add_simulate_command(CLI::App& app) {
    auto args = std::make_shared<SimulateArgs>();
    CLI::App* cmd = app.add_subcommand(
        "simulate", "finite-blocklength universal-code experiment over a compound set");
    cmd->add_option("--channels", args->channels, "compound-set JSON file")->required();
    cmd->add_option("--input-dist", args->input_dist, "factorized-input JSON file (l = 1)")
        ->required();
    cmd->add_option("--out", args->out, "output directory")->required();
    cmd->add_option("--n-grid", args->n_grid, "block lengths")->delimiter(',');
    cmd->add_option("--seeds", args->seeds, "codebooks per block length");
    cmd->add_option("--seed", args->seed, "master seed");
    cmd->add_option("--margin", args->margin, "entropic layout margin");
    cmd->add_option("--delta", args->delta, "typicality parameter for codebook sampling");
    cmd->add_option("--method", args->method, "decoder construction")
        ->check(CLI::IsMember({"pgm", "hn"}));
    cmd->add_option("--threshold", args->threshold, "hn decoder threshold");
    cmd->add_option("--layout", args->layout, "explicit layout m0,j,l_rand")->delimiter(',');
    cmd->add_option("--rates", args->rates, "layout from rates r_pub,r_conf,r_rand bits/use")
        ->delimiter(',');
    cmd->add_flag("--no-leakage", args->no_leakage, "skip leakage evaluation");

    cmd->callback([args]() {
        const qbclab::CompoundSet set = qbclab::load_compound(args->channels);
        const qbclab::FactorizedInput input = qbclab::load_input(args->input_dist);
        const std::filesystem::path dir = ensure_out_dir(args->out);

        qbclab::LayoutPolicy policy;
        policy.margin = args->margin;
        if (!args->layout.empty()) {
            if (args->layout.size() != 3)
                throw qbclab::validation_error("--layout expects m0,j,l_rand");
            policy.mode = qbclab::LayoutPolicy::Mode::Explicit;
            policy.layout = {args->layout[0], args->layout[1], args->layout[2]};
        } else if (!args->rates.empty()) {
            if (args->rates.size() != 3)
                throw qbclab::validation_error("--rates expects r_pub,r_conf,r_rand");
            policy.mode = qbclab::LayoutPolicy::Mode::Rates;
            policy.rate_pub = args->rates[0];
            policy.rate_conf = args->rates[1];
            policy.rate_rand = args->rates[2];
        } else {
            policy.mode = qbclab::LayoutPolicy::Mode::Entropic;
        }

        qbclab::ExperimentConfig config;
        config.n_grid = args->n_grid;
        config.seeds = args->seeds;
        config.master_seed = args->seed;
        config.delta = args->delta;
        config.method = args->method == "pgm" ? qbclab::DecoderMethod::Pgm
                                              : qbclab::DecoderMethod::HayashiNagaoka;
        config.hn_threshold = args->threshold;
        config.compute_leakage = !args->no_leakage;

        const qbclab::ExperimentReport result =
            qbclab::run_universal_experiment(set, input, policy, config);

        qbclab::CsvWriter csv({"n", "seed", "member", "m0", "j", "l_rand", "error_bob",
                               "error_eve", "leakage", "deviation"});
        json runs = json::array();
        for (const auto& run : result.runs) {
            for (const auto& mo : run.members) {
                csv.integer(run.n)
                    .text(std::to_string(run.seed))
                    .integer(static_cast<std::int64_t>(mo.member))
                    .integer(static_cast<std::int64_t>(run.layout.m0))
                    .integer(static_cast<std::int64_t>(run.layout.j))
                    .integer(static_cast<std::int64_t>(run.layout.l_rand))
                    .num(mo.error_bob)
                    .num(mo.error_eve)
                    .num(mo.leakage)
                    .num(mo.deviation);
                csv.end_row();
            }
            runs.push_back(json{{"n", run.n},
                                {"seed", run.seed},
                                {"layout", json{{"m0", run.layout.m0},
                                                {"j", run.layout.j},
                                                {"l_rand", run.layout.l_rand}}},
                                {"max_error_bob", run.max_error_bob},
                                {"max_error_eve", run.max_error_eve},
                                {"max_leakage", run.max_leakage},
                                {"max_deviation", run.max_deviation}});
        }
        json report;
        report["command"] = "simulate";
        report["channels"] = args->channels;
        report["input_dist"] = args->input_dist;
        report["seed"] = args->seed;
        report["delta"] = args->delta;
        report["method"] = args->method;
        report["runs"] = std::move(runs);
        csv.write((dir / "simulation.csv").string());
        qbclab::write_text((dir / "report.json").string(), qbclab::canonical_dump(report));
    });
}

struct NetArgs {
    std::string channels;
    std::string out;
    double tau = 0.1;
    std::uint64_t seed = 1;
    std::size_t budget = 4096;
    std::size_t build_samples = 2048;
    std::size_t samples = 10000;
};

void add_net_command(CLI::App& app) {
    auto args = std::make_shared<NetArgs>();
    CLI::App* cmd = app.add_subcommand(
        "net", "tau-net discretization of the convex hull of the listed channels");
    cmd->add_option("--channels", args->channels, "generator compound-set JSON file")
        ->required();
    cmd->add_option("--out", args->out, "output directory")->required();
    cmd->add_option("--tau", args->tau, "net radius, in (0, 1/e)")->required();
    cmd->add_option("--seed", args->seed, "family sampling seed");
    cmd->add_option("--budget", args->budget, "maximum net cardinality");
    cmd->add_option("--build-samples", args->build_samples, "greedy construction samples");
    cmd->add_option("--samples", args->samples, "fresh verification samples");

    cmd->callback([args]() {
        const qbclab::CompoundSet generators = qbclab::load_compound(args->channels);
        const std::filesystem::path dir = ensure_out_dir(args->out);
        const qbclab::ChannelFamily family =
            qbclab::convex_mixture_family(generators, args->seed);

        qbclab::NetBuildConfig build;
        build.build_samples = args->build_samples;
        qbclab::CompoundSet net = qbclab::build_net(family, args->tau, args->budget, build);
        net.net = qbclab::NetProvenance{args->tau, args->seed};
        const qbclab::NetReport verify =
            qbclab::verify_net(net, family, args->tau, args->samples);

        json report;
        report["command"] = "net";
        report["channels"] = args->channels;
        report["tau"] = args->tau;
        report["seed"] = args->seed;
        report["size"] = net.size();
        report["max_distance"] = verify.max_distance;
        report["radius_ok"] = verify.radius_ok;
        report["samples"] = verify.samples;
        json letters = json::array();
        for (const auto& c : verify.n_letter)
            letters.push_back(json{{"n", c.n},
                                   {"max_distance", c.max_distance},
                                   {"bound", c.bound},
                                   {"ok", c.ok}});
        report["n_letter"] = std::move(letters);
        report["log2_size"] = verify.log2_size;
        report["log2_size_bound"] = verify.log2_size_bound;
        report["size_ok"] = verify.size_ok;
        report["pass"] = verify.pass;

        qbclab::save_compound(net, (dir / "compound.json").string());
        qbclab::write_text((dir / "report.json").string(), qbclab::canonical_dump(report));
    });
}

struct CoveringArgs {
    std::string out;
    std::size_t dim = 2;
    double p = 0.5;
    double eps = 0.2;
    double mu = 1.0;
    std::vector<std::size_t> l_grid{10, 100, 1000};
    std::size_t trials = 2000;
    std::uint64_t seed = 1;
};

void add_covering_command(CLI::App& app) {
    auto args = std::make_shared<CoveringArgs>();
    CLI::App* cmd = app.add_subcommand(
        "covering", "operator-sampling concentration check on a Bernoulli diagonal ensemble");
    cmd->add_option("--out", args->out, "output directory")->required();
    cmd->add_option("--dim", args->dim, "operator dimension");
    cmd->add_option("--p", args->p, "Bernoulli parameter (mean is p*I)");
    cmd->add_option("--eps", args->eps, "deviation threshold, in (0, 1/2)");
    cmd->add_option("--mu", args->mu, "per-sample operator cap X <= mu*I");
    cmd->add_option("--L-grid", args->l_grid, "numbers of averaged draws")->delimiter(',');
    cmd->add_option("--trials", args->trials, "trials per grid point");
    cmd->add_option("--seed", args->seed, "sampler seed");

    cmd->callback([args]() {
        const std::filesystem::path dir = ensure_out_dir(args->out);
        qbclab::CoveringSampler sampler =
            qbclab::bernoulli_diag_sampler(args->dim, args->p, args->eps, args->seed);
        sampler.mu = args->mu;
        const qbclab::CoveringReport result =
            qbclab::covering_check(sampler, args->l_grid, args->trials);

        qbclab::CsvWriter csv({"L", "empirical", "bound", "slack3", "ok"});
        json points = json::array();
        for (const auto& pt : result.points) {
            csv.integer(static_cast<std::int64_t>(pt.l))
                .num(pt.empirical)
                .num(pt.bound)
                .num(pt.slack3)
                .integer(pt.ok ? 1 : 0);
            csv.end_row();
            points.push_back(json{{"L", pt.l},
                                  {"empirical", pt.empirical},
                                  {"bound", pt.bound},
                                  {"slack3", pt.slack3},
                                  {"ok", pt.ok}});
        }
        json report;
        report["command"] = "covering";
        report["dim"] = args->dim;
        report["p"] = args->p;
        report["eps"] = args->eps;
        report["mu"] = args->mu;
        report["trials"] = args->trials;
        report["seed"] = args->seed;
        report["mean_min_eig"] = result.mean_min_eig;
        report["hypotheses_ok"] = result.hypotheses_ok;
        report["points"] = std::move(points);
        report["decreasing"] = result.decreasing;
        report["pass"] = result.pass;
        csv.write((dir / "covering.csv").string());
        qbclab::write_text((dir / "report.json").string(), qbclab::canonical_dump(report));
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compound cq broadcast-channel laboratory"};
    app.require_subcommand(1);

    add_region_command(app, "region-bcc", qbclab::Scenario::Bcc,
                       "common + confidential rate region over a compound set");
    add_region_command(app, "region-tpc", qbclab::Scenario::Tpc,
                       "public + confidential rate region over a compound set");
    add_simulate_command(app);
    add_net_command(app);
    add_covering_command(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
