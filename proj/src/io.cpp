#include "cdscale/io.hpp"

#include "cdscale/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cdscale::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) return "0";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void write_protocol_csv(const protocol::DrivingProtocol& p, std::ostream& out) {
    out << kProtocolHeader << '\n';
    for (std::size_t i = 0; i < p.n_samples(); ++i) {
        const double row[] = {p.t[i],
                              p.omega[i],
                              p.omega_dot[i],
                              p.omega_ddot[i],
                              p.scaling.gamma[i],
                              p.scaling.gamma_dot[i],
                              p.scaling.gamma_ddot[i],
                              p.scaling.tau[i],
                              p.Omega2[i],
                              p.Omega2_TF[i],
                              p.interaction.epsilon[i],
                              p.g_ratio[i]};
        for (std::size_t c = 0; c < std::size(row); ++c) {
            if (c) out << ',';
            out << format_number(row[c]);
        }
        out << '\n';
    }
}

json protocol_envelope(const protocol::DrivingProtocol& p) {
    return json{
        {"ramp",
         {{"kind", "quintic"},
          {"omega0", p.ramp.omega0()},
          {"omegaF", p.ramp.omegaF()},
          {"tF", p.ramp.tF()}}},
        {"dim", p.dim},
        {"alpha", p.alpha},
        {"n_samples", p.n_samples()},
        {"units", kUnitConvention},
    };
}

protocol::DrivingProtocol ProtocolEnvelope::synthesize() const {
    return protocol::synthesize(protocol::polynomial_ramp(omega0, omegaF, tF), dim, alpha, n_samples);
}

ProtocolEnvelope parse_protocol_envelope(const json& envelope) {
    try {
        if (envelope.at("units").get<std::string>() != kUnitConvention) {
            throw InvalidParameter("protocol envelope uses unit convention '" +
                                   envelope.at("units").get<std::string>() + "', expected " +
                                   kUnitConvention);
        }
        const json& ramp = envelope.at("ramp");
        if (ramp.value("kind", "quintic") != "quintic") {
            throw InvalidParameter("only quintic ramps are supported");
        }
        ProtocolEnvelope e;
        e.omega0 = ramp.at("omega0").get<double>();
        e.omegaF = ramp.at("omegaF").get<double>();
        e.tF = ramp.at("tF").get<double>();
        e.dim = envelope.at("dim").get<int>();
        e.alpha = envelope.at("alpha").get<double>();
        e.n_samples = envelope.at("n_samples").get<std::size_t>();
        return e;
    } catch (const json::exception& err) {
        throw InvalidParameter(std::string("malformed protocol envelope: ") + err.what());
    }
}

void write_observables_csv(const propagator::ObservableSeries& s, std::ostream& out) {
    out << kObservablesHeader << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << format_number(s.times[i]) << ',' << format_number(s.norms[i]) << ','
            << format_number(s.x2[i]) << ',' << format_number(s.energies[i]) << ','
            << format_number(s.fidelity_vs_target[i]) << ',' << format_number(s.fidelity_vs_oracle[i])
            << ',' << format_number(s.gamma_measured[i]) << '\n';
    }
}

namespace {

// JSON has no NaN; map non-finite values to null.
json number_or_null(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

}  // namespace

json report_json(const propagator::ExpansionReport& r) {
    json j{
        {"inputs",
         {{"regime", propagator::to_string(r.regime)},
          {"drive", propagator::to_string(r.drive)},
          {"g0", r.g0},
          {"grid_points", r.grid_points},
          {"box_length", r.box_length},
          {"dt", r.dt},
          {"output_stride", r.output_stride}}},
        {"n_steps", r.n_steps},
        {"n_probes", r.series.size()},
        {"mu", r.mu},
        {"initial_residual", r.initial_residual},
        {"target_residual", r.target_residual},
        {"fid_target", number_or_null(r.fid_target)},
        {"fid_oracle", number_or_null(r.fid_oracle)},
        {"max_oracle_l2", number_or_null(r.max_oracle_l2)},
        {"final_oracle_l2", number_or_null(r.final_oracle_l2)},
        {"max_gamma_rel_error", number_or_null(r.max_gamma_rel_error)},
        {"max_norm_drift", r.max_norm_drift},
        {"runtime_seconds", r.runtime_seconds},
        {"units", kUnitConvention},
    };
    j["tf_density_error"] = r.tf_density_error ? json(*r.tf_density_error) : json(nullptr);
    return j;
}

void write_snapshot(const WaveFunction& psi, const fs::path& stem) {
    std::ostringstream csv;
    csv << "q,re,im\n";
    const Grid1D& grid = psi.grid();
    for (std::size_t j = 0; j < psi.size(); ++j) {
        csv << format_number(grid.position(j)) << ',' << format_number(psi[j].real()) << ','
            << format_number(psi[j].imag()) << '\n';
    }
    fs::path csv_path = stem;
    csv_path += ".csv";
    fs::path json_path = stem;
    json_path += ".json";
    write_text(csv_path, csv.str());
    write_json(json_path, json{{"grid", {{"n_points", grid.n_points()}, {"box_length", grid.box_length()}}},
                               {"time_stamp", psi.time()},
                               {"units", kUnitConvention}});
}

WaveFunction read_snapshot(const fs::path& stem) {
    fs::path csv_path = stem;
    csv_path += ".csv";
    fs::path json_path = stem;
    json_path += ".json";
    const json meta = read_json(json_path);
    const Grid1D grid(meta.at("grid").at("n_points").get<std::size_t>(),
                      meta.at("grid").at("box_length").get<double>());
    std::ifstream in(csv_path);
    if (!in) throw IoError("cannot open " + csv_path.string());
    std::string line;
    std::getline(in, line);
    if (line != "q,re,im") throw IoError(csv_path.string() + ": unexpected header '" + line + "'");
    std::vector<Complex> amplitudes;
    amplitudes.reserve(grid.n_points());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string q, re, im;
        std::getline(row, q, ',');
        std::getline(row, re, ',');
        std::getline(row, im, ',');
        amplitudes.emplace_back(std::stod(re), std::stod(im));
    }
    return WaveFunction(grid, std::move(amplitudes), meta.at("time_stamp").get<double>());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

void write_json(const fs::path& path, const json& value) { write_text(path, value.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& err) {
        throw IoError(path.string() + ": " + err.what());
    }
}

void prepare_output_dir(const fs::path& dir, bool force) {
    std::error_code ec;
    if (fs::exists(dir, ec)) {
        if (!fs::is_directory(dir, ec)) throw IoError(dir.string() + " exists and is not a directory");
        if (!fs::is_empty(dir, ec) && !force) {
            throw IoError(dir.string() + " is not empty; pass --force to overwrite");
        }
        return;
    }
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace cdscale::io
