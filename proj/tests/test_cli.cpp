// End-to-end tests of the qbclab command-line tool. Each case runs the real
// binary as a subprocess against fixture files written through the library's
// own serialization layer, then checks exit codes, the on-disk CSV/JSON
// artifacts, and byte-level determinism under a fixed seed. The binary path
// is injected at compile time via QBCLAB_CLI_PATH.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "qbclab/channels.hpp"
#include "qbclab/regions.hpp"
#include "qbclab/serialization.hpp"
#include "support.hpp"

using namespace qbclab;
using json = nlohmann::json;

namespace {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        std::string name =
            (std::filesystem::temp_directory_path() / "qbclab_cli_XXXXXX").string();
        char* made = mkdtemp(name.data());
        REQUIRE(made != nullptr);
        path = made;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string sub(const std::string& name) const { return (path / name).string(); }
};

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + QBCLAB_CLI_PATH + "\" " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buffer[4096];
    while (std::size_t got = std::fread(buffer, 1, sizeof buffer, pipe))
        result.output.append(buffer, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string slurp(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> fields;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) fields.push_back(cell);
        rows.push_back(std::move(fields));
    }
    return rows;
}

// Bob and Eve both receive the input bit unchanged.
CqqBroadcastChannel transparent_bit() {
    std::vector<DensityOperator> outs;
    for (std::size_t x = 0; x < 2; ++x)
        outs.push_back(tensor(support::pure_ket(2, x), support::pure_ket(2, x)));
    return CqqBroadcastChannel::validated(2, 2, std::move(outs));
}

// Bob receives the bit (optionally relabeled), Eve a fixed state.
CqqBroadcastChannel blind_eve_bit(bool relabel) {
    std::vector<DensityOperator> outs;
    for (std::size_t x = 0; x < 2; ++x) {
        const std::size_t b = relabel ? 1 - x : x;
        outs.push_back(tensor(support::pure_ket(2, b), support::pure_ket(2, 0)));
    }
    return CqqBroadcastChannel::validated(2, 2, std::move(outs));
}

// Bob receives the bit, Eve a classical flip of it with probability q.
CqqBroadcastChannel noisy_eve_bit(double q) {
    std::vector<DensityOperator> outs;
    for (std::size_t x = 0; x < 2; ++x) {
        const DensityOperator eve = support::diag_state(
            x == 0 ? std::vector<double>{1.0 - q, q} : std::vector<double>{q, 1.0 - q});
        outs.push_back(DensityOperator::trusted(tensor(support::pure_ket(2, x), eve).mat));
    }
    return CqqBroadcastChannel::validated(2, 2, std::move(outs));
}

std::string write_compound(const TempDir& dir, const std::string& name,
                           std::vector<CqqBroadcastChannel> members) {
    CompoundSet set;
    set.members = std::move(members);
    const std::string file = dir.sub(name);
    save_compound(set, file);
    return file;
}

// U = Y = the channel bit: q uniform, r and t identities.
std::string write_bit_input(const TempDir& dir) {
    Eigen::VectorXd q(2);
    q << 0.5, 0.5;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    const std::string file = dir.sub("bit_input.json");
    save_input(FactorizedInput::validated(1, 2, q, id, id), file);
    return file;
}

// Trivial outer layer: |U| = 1, Y uniform over the channel bit.
std::string write_trivial_input(const TempDir& dir) {
    Eigen::VectorXd q(1);
    q << 1.0;
    Eigen::MatrixXd r(1, 2);
    r << 0.5, 0.5;
    const std::string file = dir.sub("trivial_input.json");
    save_input(FactorizedInput::validated(1, 2, q, r, Eigen::MatrixXd::Identity(2, 2)), file);
    return file;
}

}  // namespace

TEST_CASE("help lists every subcommand and exits cleanly") {
    const RunResult r = run_cli("--help");
    CHECK(r.exit_code == 0);
    for (const char* name : {"region-bcc", "region-tpc", "simulate", "net", "covering"})
        CHECK(r.output.find(name) != std::string::npos);
}

TEST_CASE("region evaluate mode reproduces hand-checkable corners") {
    TempDir dir;
    const std::string transparent =
        write_compound(dir, "transparent.json", {transparent_bit()});
    const std::string blind = write_compound(
        dir, "blind_pair.json", {blind_eve_bit(false), blind_eve_bit(true)});
    const std::string bit_input = write_bit_input(dir);
    const std::string trivial_input = write_trivial_input(dir);

    // Transparent channel, bit carried by U: one common bit, nothing confidential.
    const std::string out_bcc = dir.sub("bcc");
    const RunResult bcc = run_cli("region-bcc --channels \"" + transparent +
                                  "\" --input-dist \"" + bit_input + "\" --out \"" + out_bcc +
                                  "\"");
    CHECK(bcc.exit_code == 0);
    const auto rows = parse_csv(slurp(out_bcc + "/region.csv"));
    REQUIRE(rows.size() == 2);
    const std::vector<std::string> header = {"weight",     "r_pub",      "r_c",
                                             "r_c_raw",    "member_pub", "member_bob",
                                             "member_eve", "slack"};
    CHECK(rows[0] == header);
    REQUIRE(rows[1].size() == 8);
    CHECK(rows[1][0] == "-1");  // evaluate mode marker
    CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::stod(rows[1][2]) == 0.0);

    const json report = json::parse(slurp(out_bcc + "/report.json"));
    CHECK(report.at("command") == "region-bcc");
    CHECK(report.at("mode") == "evaluate");
    CHECK(report.at("members") == 1);
    CHECK(report.at("corner").at("r_pub").get<double>() ==
          doctest::Approx(1.0).epsilon(1e-9));

    // Blind-Eve pair, trivial U: no public rate, one confidential bit, and the
    // relabeled member must not change either value.
    const std::string out_tpc = dir.sub("tpc");
    const RunResult tpc = run_cli("region-tpc --channels \"" + blind + "\" --input-dist \"" +
                                  trivial_input + "\" --out \"" + out_tpc + "\"");
    CHECK(tpc.exit_code == 0);
    const auto tpc_rows = parse_csv(slurp(out_tpc + "/region.csv"));
    REQUIRE(tpc_rows.size() == 2);
    CHECK(std::abs(std::stod(tpc_rows[1][1])) < 1e-9);
    CHECK(std::stod(tpc_rows[1][2]) == doctest::Approx(1.0).epsilon(1e-9));
    const json tpc_report = json::parse(slurp(out_tpc + "/report.json"));
    CHECK(tpc_report.at("mode") == "evaluate");
    CHECK(tpc_report.at("members") == 2);
}

TEST_CASE("region optimize mode is seed deterministic and seed sensitive") {
    TempDir dir;
    const std::string channels = write_compound(dir, "noisy.json", {noisy_eve_bit(0.15)});
    const std::string base = "region-bcc --channels \"" + channels +
                             "\" --weights 0,1 --restarts 2 --sweeps 12 --size-u 2 "
                             "--size-y 2 --out \"";

    const RunResult first = run_cli(base + dir.sub("o1") + "\" --seed 3");
    const RunResult second = run_cli(base + dir.sub("o2") + "\" --seed 3");
    const RunResult shifted = run_cli(base + dir.sub("o3") + "\" --seed 4");
    CHECK(first.exit_code == 0);
    CHECK(second.exit_code == 0);
    CHECK(shifted.exit_code == 0);

    CHECK(slurp(dir.sub("o1") + "/region.csv") == slurp(dir.sub("o2") + "/region.csv"));
    CHECK(slurp(dir.sub("o1") + "/report.json") == slurp(dir.sub("o2") + "/report.json"));
    // The optimizer's restart points depend on the seed, and the report echoes
    // the winning input distribution, so a different seed must leave a trace.
    CHECK(slurp(dir.sub("o1") + "/report.json") != slurp(dir.sub("o3") + "/report.json"));

    const auto rows = parse_csv(slurp(dir.sub("o1") + "/region.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == "0");
    CHECK(rows[2][0] == "1");

    const json report = json::parse(slurp(dir.sub("o1") + "/report.json"));
    CHECK(report.at("mode") == "optimize");
    CHECK(report.at("seed") == 3);
    REQUIRE(report.at("corners").size() == 2);
    CHECK(report.at("corners")[0].contains("input"));
    CHECK(report.at("frontier").is_array());
}

TEST_CASE("simulate writes one deterministic row per run and member") {
    TempDir dir;
    const std::string channels = write_compound(
        dir, "blind_pair.json", {blind_eve_bit(false), blind_eve_bit(true)});
    const std::string input = write_trivial_input(dir);
    const std::string args = "simulate --channels \"" + channels + "\" --input-dist \"" +
                             input + "\" --layout 1,2,2 --n-grid 4 --seeds 2 --seed 5 --out \"";

    const RunResult first = run_cli(args + dir.sub("s1") + "\"");
    const RunResult second = run_cli(args + dir.sub("s2") + "\"");
    CHECK(first.exit_code == 0);
    CHECK(second.exit_code == 0);
    CHECK(slurp(dir.sub("s1") + "/simulation.csv") == slurp(dir.sub("s2") + "/simulation.csv"));
    CHECK(slurp(dir.sub("s1") + "/report.json") == slurp(dir.sub("s2") + "/report.json"));

    const auto rows = parse_csv(slurp(dir.sub("s1") + "/simulation.csv"));
    REQUIRE(rows.size() == 5);  // header + (1 block length) x (2 seeds) x (2 members)
    const std::vector<std::string> header = {"n",     "seed",      "member",    "m0",
                                             "j",     "l_rand",    "error_bob", "error_eve",
                                             "leakage", "deviation"};
    CHECK(rows[0] == header);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 10);
        CHECK(rows[i][0] == "4");
        CHECK(rows[i][3] == "1");
        CHECK(rows[i][4] == "2");
        CHECK(rows[i][5] == "2");
        const double error_bob = std::stod(rows[i][6]);
        CHECK(error_bob >= -1e-12);  // exact decodes land an epsilon below zero
        CHECK(error_bob <= 1.0);
        // A single outer message means no public layer for Eve to decode, and
        // a blind Eve sees the same state whatever is sent.
        CHECK(std::stod(rows[i][7]) == 0.0);
        CHECK(std::abs(std::stod(rows[i][8])) < 1e-8);
        CHECK(std::abs(std::stod(rows[i][9])) < 1e-8);
    }

    const json report = json::parse(slurp(dir.sub("s1") + "/report.json"));
    CHECK(report.at("command") == "simulate");
    REQUIRE(report.at("runs").size() == 2);
    for (const json& run : report.at("runs")) {
        CHECK(run.at("layout").at("m0") == 1);
        CHECK(run.at("layout").at("j") == 2);
        CHECK(run.at("layout").at("l_rand") == 2);
        CHECK(run.at("max_error_eve").get<double>() == 0.0);
    }
}

TEST_CASE("net subcommand writes a loadable discretization with provenance") {
    TempDir dir;
    const std::string channels = write_compound(
        dir, "blind_pair.json", {blind_eve_bit(false), blind_eve_bit(true)});
    const std::string args = "net --channels \"" + channels +
                             "\" --tau 0.2 --seed 9 --budget 64 --build-samples 256 "
                             "--samples 500 --out \"";

    const RunResult first = run_cli(args + dir.sub("n1") + "\"");
    const RunResult second = run_cli(args + dir.sub("n2") + "\"");
    CHECK(first.exit_code == 0);
    CHECK(second.exit_code == 0);
    CHECK(slurp(dir.sub("n1") + "/compound.json") == slurp(dir.sub("n2") + "/compound.json"));
    CHECK(slurp(dir.sub("n1") + "/report.json") == slurp(dir.sub("n2") + "/report.json"));

    const CompoundSet net = load_compound(dir.sub("n1") + "/compound.json");
    CHECK(net.size() >= 2);
    CHECK(net.size() <= 64);
    REQUIRE(net.net.has_value());
    CHECK(net.net->tau == 0.2);
    CHECK(net.net->seed == 9);

    const json report = json::parse(slurp(dir.sub("n1") + "/report.json"));
    CHECK(report.at("command") == "net");
    CHECK(report.at("size") == net.size());
    CHECK(report.at("radius_ok") == true);
    CHECK(report.at("size_ok") == true);
    CHECK(report.at("pass") == true);
    REQUIRE(report.at("n_letter").size() == 3);
    for (const json& entry : report.at("n_letter")) CHECK(entry.at("ok") == true);
}

TEST_CASE("covering subcommand writes the concentration table") {
    TempDir dir;
    const std::string args =
        "covering --dim 2 --p 0.5 --eps 0.2 --L-grid 10,50 --trials 200 --seed 3 --out \"";
    const RunResult first = run_cli(args + dir.sub("c1") + "\"");
    const RunResult second = run_cli(args + dir.sub("c2") + "\"");
    CHECK(first.exit_code == 0);
    CHECK(second.exit_code == 0);
    CHECK(slurp(dir.sub("c1") + "/covering.csv") == slurp(dir.sub("c2") + "/covering.csv"));
    CHECK(slurp(dir.sub("c1") + "/report.json") == slurp(dir.sub("c2") + "/report.json"));

    const auto rows = parse_csv(slurp(dir.sub("c1") + "/covering.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"L", "empirical", "bound", "slack3", "ok"});
    CHECK(rows[1][0] == "10");
    CHECK(rows[2][0] == "50");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double empirical = std::stod(rows[i][1]);
        CHECK(empirical >= 0.0);
        CHECK(empirical <= 1.0);
        CHECK(std::stod(rows[i][2]) > 0.0);
        CHECK(rows[i][4] == "1");
    }

    const json report = json::parse(slurp(dir.sub("c1") + "/report.json"));
    CHECK(report.at("command") == "covering");
    CHECK(report.at("hypotheses_ok") == true);
    CHECK(report.at("decreasing") == true);
    CHECK(report.at("pass") == true);
}

TEST_CASE("failure modes exit nonzero with a diagnostic") {
    TempDir dir;
    const std::string channels = write_compound(
        dir, "blind_pair.json", {blind_eve_bit(false), blind_eve_bit(true)});
    const std::string input = write_trivial_input(dir);

    const RunResult bare = run_cli("");
    CHECK(bare.exit_code != 0);
    CHECK(bare.output.find("subcommand") != std::string::npos);

    const RunResult missing_option = run_cli("region-bcc --out \"" + dir.sub("x") + "\"");
    CHECK(missing_option.exit_code != 0);
    CHECK(missing_option.output.find("--channels") != std::string::npos);

    const std::string ghost = dir.sub("no_such_file.json");
    const RunResult missing_file =
        run_cli("region-bcc --channels \"" + ghost + "\" --out \"" + dir.sub("x") + "\"");
    CHECK(missing_file.exit_code == 1);
    CHECK(missing_file.output.find("error:") != std::string::npos);
    CHECK(missing_file.output.find(ghost) != std::string::npos);

    const RunResult bad_layout =
        run_cli("simulate --channels \"" + channels + "\" --input-dist \"" + input +
                "\" --layout 1,2 --out \"" + dir.sub("x") + "\"");
    CHECK(bad_layout.exit_code == 1);
    CHECK(bad_layout.output.find("error:") != std::string::npos);
    CHECK(bad_layout.output.find("--layout") != std::string::npos);

    const RunResult bad_eps =
        run_cli("covering --eps 0.6 --trials 10 --L-grid 5 --out \"" + dir.sub("x") + "\"");
    CHECK(bad_eps.exit_code == 1);
    CHECK(bad_eps.output.find("error:") != std::string::npos);

    const RunResult bad_tau = run_cli("net --channels \"" + channels + "\" --tau 0.5 --out \"" +
                                      dir.sub("x") + "\"");
    CHECK(bad_tau.exit_code == 1);
    CHECK(bad_tau.output.find("error:") != std::string::npos);
}
