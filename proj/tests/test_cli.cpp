#include <catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string output;
};

const fs::path& workdir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("cdscale-cli-" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

struct Cleanup {
    ~Cleanup() { fs::remove_all(workdir()); }
} cleanup;

Run cli(const std::string& args) {
    const std::string command = "cd '" + workdir().string() + "' && '" CDSCALE_CLI_PATH "' " + args + " 2>&1";
    Run run;
    FILE* pipe = ::popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    while (std::fgets(buffer, sizeof buffer, pipe)) run.output += buffer;
    const int status = ::pclose(pipe);
    run.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return run;
}

json read_json(const fs::path& path) {
    std::ifstream in(workdir() / path);
    REQUIRE(in.good());
    return json::parse(in);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(workdir() / path);
    REQUIRE(in.good());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    FAIL("missing column " << name);
    return 0;
}

}  // namespace

TEST_CASE("design writes the protocol files", "[cli][design]") {
    const auto r = cli("design --omega0 1 --gammaF 2 --tF 5 --samples 1001 --seed-dir design-ok");
    INFO(r.output);
    REQUIRE(r.code == 0);
    const auto rows = read_csv("design-ok/protocol.csv");
    CHECK(rows.size() == 1002);
    CHECK(rows[0].size() == 12);
    CHECK(read_json("design-ok/protocol.json").at("units") == "hbar=m=1");
    CHECK(read_json("design-ok/config.json").at("tF") == 5.0);
}

TEST_CASE("invalid parameters exit 2 and name the constraint", "[cli][errors]") {
    const auto r = cli("design --tF -1 --seed-dir design-bad");
    CHECK(r.code == 2);
    CHECK(r.output.find("tF") != std::string::npos);
    CHECK_FALSE(fs::exists(workdir() / "design-bad" / "protocol.csv"));

    const auto grid = cli("simulate --grid-points 1000 --seed-dir sim-grid");
    CHECK(grid.code == 2);
    CHECK(grid.output.find("power of two") != std::string::npos);

    const auto both = cli("design --gammaF 2 --omegaF 0.25 --seed-dir design-both");
    CHECK(both.code == 2);

    CHECK(cli("simulate --regime quantum --seed-dir sim-regime").code == 2);
    CHECK(cli("piston --b 1.5 --seed-dir piston-bad").code == 2);
    CHECK(cli("nonsense").code == 2);
    CHECK(cli("").code == 2);
}

TEST_CASE("D = 2 protocols have Omega2_TF equal to Omega2", "[cli][design]") {
    REQUIRE(cli("design --dim 2 --tF 1 --samples 201 --seed-dir design-d2").code == 0);
    const auto rows = read_csv("design-d2/protocol.csv");
    const auto a = column(rows[0], "Omega2");
    const auto b = column(rows[0], "Omega2_TF");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double x = std::stod(rows[i][a]);
        const double y = std::stod(rows[i][b]);
        CHECK(std::abs(x - y) <= 1e-13 * std::max(1.0, std::abs(x)));
    }
}

TEST_CASE("outputs are not overwritten without --force", "[cli][output]") {
    REQUIRE(cli("design --tF 1 --seed-dir twice").code == 0);
    const auto again = cli("design --tF 2 --seed-dir twice");
    CHECK(again.code == 4);
    CHECK(again.output.find("--force") != std::string::npos);
    CHECK(read_json("twice/config.json").at("tF") == 1.0);
    CHECK(cli("design --tF 2 --seed-dir twice --force").code == 0);
    CHECK(read_json("twice/config.json").at("tF") == 2.0);
}

TEST_CASE("simulate CD and bare", "[cli][simulate]") {
    const auto cd = cli("simulate --tF 1 --box-length 40 --seed-dir sim-cd");
    INFO(cd.output);
    REQUIRE(cd.code == 0);
    const auto report = read_json("sim-cd/report.json");
    CHECK(report.at("status") == "ok");
    CHECK(report.at("fid_target").get<double>() >= 0.999);
    CHECK(report.at("max_oracle_l2").get<double>() <= 1e-3);
    for (const char* f : {"config.json", "protocol.csv", "protocol.json", "observables.csv", "snapshots/initial.csv",
                          "snapshots/final.json", "snapshots/target.csv"}) {
        CHECK(fs::exists(workdir() / "sim-cd" / f));
    }
    const auto obs = read_csv("sim-cd/observables.csv");
    CHECK(obs[0] == std::vector<std::string>{"t", "norm", "x2", "energy", "fid_target", "fid_oracle",
                                             "gamma_measured"});
    CHECK(obs.size() >= 51);

    REQUIRE(cli("simulate --tF 1 --box-length 40 --drive bare --no-snapshots --seed-dir sim-bare").code == 0);
    CHECK(read_json("sim-bare/report.json").at("fid_target").get<double>() < 0.95);
    CHECK_FALSE(fs::exists(workdir() / "sim-bare" / "snapshots"));
}

TEST_CASE("simulate from a design protocol", "[cli][simulate]") {
    REQUIRE(cli("design --tF 1 --seed-dir proto").code == 0);
    const auto r = cli("simulate --protocol proto/protocol.json --box-length 40 --no-snapshots --seed-dir sim-proto");
    INFO(r.output);
    REQUIRE(r.code == 0);
    CHECK(read_json("sim-proto/report.json").at("fid_target").get<double>() >= 0.999);
    CHECK(read_json("sim-proto/config.json").at("tF") == 1.0);
}

TEST_CASE("numerical failure exits 3 with diagnostics", "[cli][simulate][errors]") {
    const auto r = cli("simulate --tF 1 --box-length 10 --seed-dir sim-edge");
    CHECK(r.code == 3);
    const auto report = read_json("sim-edge/report.json");
    CHECK(report.at("status") == "failed");
    CHECK(report.at("error").at("kind") == "support");
    CHECK(report.at("inputs").at("box-length") == 10.0);
}

TEST_CASE("config files sit between defaults and flags", "[cli][config]") {
    {
        std::ofstream cfg(workdir() / "run.json");
        cfg << R"({"tF": 1.0, "drive": "bare", "box-length": 40, "units": "hbar=m=1"})";
    }
    REQUIRE(cli("simulate --config run.json --no-snapshots --seed-dir cfg-a").code == 0);
    auto config = read_json("cfg-a/config.json");
    CHECK(config.at("tF") == 1.0);
    CHECK(config.at("drive") == "bare");
    CHECK(config.at("dt") == 0.001);

    REQUIRE(cli("simulate --config run.json --drive cd --tF 2 --no-snapshots --seed-dir cfg-b").code == 0);
    config = read_json("cfg-b/config.json");
    CHECK(config.at("tF") == 2.0);
    CHECK(config.at("drive") == "cd");
    CHECK(config.at("box-length") == 40.0);

    REQUIRE(cli("design --tF 3 --gammaF 3 --seed-dir cfg-src").code == 0);
    REQUIRE(cli("design --config cfg-src/config.json --gammaF 1.5 --seed-dir cfg-c").code == 0);
    config = read_json("cfg-c/config.json");
    CHECK(config.at("tF") == 3.0);
    CHECK(config.at("gamma_final") == 1.5);

    CHECK(cli("design --config missing.json --seed-dir cfg-d").code == 2);
}

TEST_CASE("figure1 flags the inverted curve", "[cli][figure1]") {
    REQUIRE(cli("figure1 --seed-dir fig").code == 0);
    const auto summary = read_json("fig/figure1.json");
    REQUIRE(summary.at("curves").size() == 3);
    for (const auto& curve : summary.at("curves")) {
        CHECK(fs::exists(workdir() / "fig" / curve.at("file").get<std::string>()));
        CHECK(curve.at("inverts_trap") == (curve.at("tF") == 1.0));
    }
    CHECK(read_csv("fig/figure1_tF1.csv")[0] == std::vector<std::string>{"t", "omega_rel", "omega2_rel", "Omega2_rel"});
}

TEST_CASE("sweep reports a monotone bare column", "[cli][sweep]") {
    const auto r = cli("sweep --regime linear --jobs 3 --seed-dir sweep");
    INFO(r.output);
    REQUIRE(r.code == 0);
    const auto rows = read_csv("sweep/sweep.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"tF", "fid_cd", "fid_bare", "max_oracle_dev"});
    for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][2]) >= std::stod(rows[i - 1][2]));
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) >= std::stod(rows[i][2]));
    const auto report = read_json("sweep/report.json");
    CHECK(report.at("bare_monotone") == true);
    CHECK(report.at("cd_dominates") == true);
}

TEST_CASE("piston demo", "[cli][piston]") {
    const auto r = cli("piston --b 4 --seed-dir piston");
    INFO(r.output);
    REQUIRE(r.code == 0);
    CHECK(read_json("piston/report.json").at("fid_target").get<double>() >= 0.995);
    const auto rows = read_csv("piston/protocol.csv");
    CHECK(column(rows[0], "aux_scaled") < rows[0].size());
    CHECK(std::stod(rows[1][column(rows[0], "aux_scaled")]) == 0.0);
    CHECK(read_json("piston/config.json").at("b") == 4.0);
}

TEST_CASE("validate --quick", "[cli][validate]") {
    const auto r = cli("validate --quick --seed-dir val");
    INFO(r.output);
    CHECK(r.code == 0);
    CHECK(r.output.find("all passed") != std::string::npos);
    const auto summary = read_json("val/validation.json");
    CHECK(summary.at("all_passed") == true);
    for (const auto& check : summary.at("checks")) CHECK(check.at("seconds").get<double>() < 60.0);
}

TEST_CASE("help lists every flag with units", "[cli][help]") {
    const std::regex unit(R"(\[(time|1/time|length|energy|energy \* length|count|dimensionless|path|switch|choice)[\],])");
    const std::vector<std::pair<std::string, std::vector<std::string>>> expected = {
        {"design", {"--omega0", "--gammaF", "--omegaF", "--tF", "--samples", "--dim", "--alpha"}},
        {"simulate",
         {"--omega0", "--gammaF", "--omegaF", "--tF", "--samples", "--dim", "--alpha", "--g0", "--regime", "--drive",
          "--grid-points", "--box-length", "--dt", "--output-stride"}},
        {"figure1", {"--omega0", "--gammaF", "--omegaF", "--tF", "--samples"}},
        {"sweep", {"--tF", "--regime", "--jobs", "--grid-points", "--box-length", "--dt", "--output-stride"}},
        {"piston", {"--b", "--expansion", "--tF", "--amplitude", "--dt", "--grid-points", "--box-length"}},
        {"validate", {"--quick"}},
    };
    for (const auto& [sub, flags] : expected) {
        const auto r = cli(sub + " --help");
        INFO(sub << "\n" << r.output);
        CHECK(r.code == 0);
        for (const auto& flag : flags) CHECK(r.output.find("  " + flag + " ") != std::string::npos);
        for (const char* common : {"--seed-dir", "--force", "--config"}) {
            CHECK(r.output.find(common) != std::string::npos);
        }

        // one entry per option: the flag line plus its indented continuation
        std::vector<std::string> entries;
        std::stringstream ss(r.output);
        std::string line;
        bool in_options = false;
        while (std::getline(ss, line)) {
            if (line.rfind("Options:", 0) == 0) {
                in_options = true;
                continue;
            }
            if (!in_options || line.empty()) continue;
            if (line.rfind("  -", 0) == 0) {
                entries.push_back(line);
            } else if (!entries.empty()) {
                entries.back() += line;
            }
        }
        CHECK(entries.size() > flags.size());
        for (const auto& entry : entries) {
            if (entry.find("--help") != std::string::npos) continue;
            INFO(entry);
            CHECK(std::regex_search(entry, unit));
        }
    }
}
