#include <catch_amalgamated.hpp>

#include "cdscale/error.hpp"
#include "cdscale/io.hpp"
#include "cdscale/qstate.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace cdscale;
namespace fs = std::filesystem;
using Catch::Matchers::WithinAbs;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("cdscale-io-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

}  // namespace

TEST_CASE("number formatting", "[io]") {
    CHECK(io::format_number(0.0) == "0");
    CHECK(io::format_number(-0.0) == "0");
    CHECK(io::format_number(NAN) == "nan");
    CHECK(io::format_number(-INFINITY) == "-inf");
    const double x = 0.1234567890123456789;
    CHECK(std::stod(io::format_number(x)) == x);
}

TEST_CASE("protocol CSV", "[io][protocol]") {
    const auto p = protocol::synthesize(protocol::ramp_for_expansion(1.0, 2.0, 5.0), 1, 2.0, 101);
    std::stringstream out;
    io::write_protocol_csv(p, out);
    std::string line;
    std::getline(out, line);
    CHECK(line == "t,omega,omega_dot,omega_ddot,gamma,gamma_dot,gamma_ddot,tau,Omega2,Omega2_TF,epsilon,g_ratio");
    std::size_t rows = 0;
    while (std::getline(out, line)) {
        const auto cells = split(line);
        REQUIRE(cells.size() == 12);
        CHECK(std::stod(cells[0]) == p.t[rows]);
        CHECK(std::stod(cells[8]) == p.Omega2[rows]);
        CHECK(std::stod(cells[7]) == p.scaling.tau[rows]);
        ++rows;
    }
    CHECK(rows == 101);
}

TEST_CASE("protocol envelope round trip", "[io][protocol]") {
    const auto p = protocol::synthesize(protocol::polynomial_ramp(1.5, 0.3, 7.0), 3, 1.5, 77);
    const auto j = io::protocol_envelope(p);
    CHECK(j.at("units") == "hbar=m=1");
    const auto e = io::parse_protocol_envelope(nlohmann::json::parse(j.dump()));
    CHECK(e.omega0 == 1.5);
    CHECK(e.omegaF == 0.3);
    CHECK(e.tF == 7.0);
    CHECK(e.dim == 3);
    CHECK(e.alpha == 1.5);
    CHECK(e.n_samples == 77);
    const auto q = e.synthesize();
    CHECK(q.Omega2_TF == p.Omega2_TF);
    CHECK(q.interaction.epsilon == p.interaction.epsilon);

    auto foreign = j;
    foreign["units"] = "SI";
    CHECK_THROWS_AS(io::parse_protocol_envelope(foreign), InvalidParameter);
    auto missing = j;
    missing.erase("dim");
    CHECK_THROWS_AS(io::parse_protocol_envelope(missing), InvalidParameter);
}

TEST_CASE("observables CSV", "[io][observables]") {
    propagator::ObservableSeries s;
    s.times = {0.0, 0.5};
    s.norms = {1.0, 1.0};
    s.x2 = {0.5, 0.75};
    s.energies = {0.5, 0.6};
    s.fidelity_vs_target = {0.9, 1.0};
    s.fidelity_vs_oracle = {NAN, NAN};
    s.oracle_l2 = {NAN, NAN};
    s.gamma_measured = {1.0, std::sqrt(1.5)};
    std::stringstream out;
    io::write_observables_csv(s, out);
    std::string line;
    std::getline(out, line);
    CHECK(line == "t,norm,x2,energy,fid_target,fid_oracle,gamma_measured");
    std::getline(out, line);
    CHECK(line == "0,1,0.5,0.5,0.90000000000000002,nan,1");
}

TEST_CASE("report JSON", "[io][report]") {
    propagator::ExpansionReport r;
    r.fid_target = 0.9995;
    r.fid_oracle = NAN;
    r.tf_density_error = 0.01;
    const auto j = io::report_json(r);
    CHECK(j.at("fid_target") == 0.9995);
    CHECK(j.at("fid_oracle").is_null());
    CHECK(j.at("tf_density_error") == 0.01);
    CHECK(j.at("inputs").at("regime") == "linear");
    CHECK(j.at("inputs").at("drive") == "cd");
    for (const char* key : {"n_steps", "n_probes", "max_oracle_l2", "max_norm_drift", "runtime_seconds", "units"}) {
        CHECK(j.contains(key));
    }
}

TEST_CASE("snapshot round trip", "[io][snapshot]") {
    TempDir tmp;
    const Grid1D grid(256, 16.0);
    auto psi = qstate::apply_berry_phase(qstate::harmonic_eigenstate(grid, 1, 1.0), 1.0, 0.4);
    psi.set_time(2.5);
    io::write_snapshot(psi, tmp.path / "state");
    CHECK(fs::exists(tmp.path / "state.csv"));
    const auto meta = io::read_json(tmp.path / "state.json");
    CHECK(meta.at("units") == "hbar=m=1");
    CHECK(meta.at("grid").at("n_points") == 256);
    const auto back = io::read_snapshot(tmp.path / "state");
    CHECK(back.grid() == grid);
    CHECK(back.time() == 2.5);
    CHECK(l2_distance(back, psi) == 0.0);
    CHECK_THROWS_AS(io::read_snapshot(tmp.path / "missing"), IoError);
}

TEST_CASE("output directories", "[io][filesystem]") {
    TempDir tmp;
    const fs::path dir = tmp.path / "run";
    io::prepare_output_dir(dir, false);
    CHECK(fs::is_directory(dir));
    io::prepare_output_dir(dir, false);
    io::write_text(dir / "a.txt", "x");
    CHECK_THROWS_AS(io::prepare_output_dir(dir, false), IoError);
    CHECK_NOTHROW(io::prepare_output_dir(dir, true));
    CHECK_THROWS_AS(io::prepare_output_dir(dir / "a.txt", true), IoError);

    io::write_json(dir / "b.json", nlohmann::json{{"k", 1}});
    CHECK(io::read_json(dir / "b.json").at("k") == 1);
    std::ofstream(dir / "bad.json") << "{not json";
    CHECK_THROWS_AS(io::read_json(dir / "bad.json"), IoError);
}
