// cdscale: counter-diabatic expansion protocols and their split-step validation.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O failure.

#include "cdscale/error.hpp"
#include "cdscale/experiments.hpp"
#include "cdscale/io.hpp"
#include "cdscale/protocol.hpp"
#include "cdscale/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cdscale;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

// JSON config files: top-level keys are long flag names without the dashes.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        json j;
        for (const CLI::Option* opt : app->get_options({})) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const std::string name = opt->get_lnames().front();
            if (opt->count() > 0) {
                const auto& results = opt->results();
                j[name] = results.size() == 1 ? json(results.front()) : json(results);
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        return j.dump(2);
    }

    // Subcommand that receives every item (CLI11 only reads config files at the top level).
    std::string section;

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        try {
            input >> j;
        } catch (const json::exception& e) {
            throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
        // config.json records both omegaF and gamma_final; the expansion factor wins.
        if (j.contains("gamma_final")) {
            j["gammaF"] = j["gamma_final"];
            j.erase("gamma_final");
            j.erase("omegaF");
        }
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            if (value.is_object() || value.is_null()) continue;
            CLI::ConfigItem item;
            if (!section.empty()) item.parents = {section};
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            } else {
                item.inputs.push_back(scalar(value));
            }
            items.push_back(std::move(item));
        }
        return items;
    }

private:
    static std::string scalar(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }
};

struct OutputOptions {
    std::string dir;
    bool force = false;
};

struct RampOptions {
    double omega0 = 1.0;
    double gammaF = 2.0;
    double omegaF = 0.0;
    CLI::Option* omegaF_opt = nullptr;
    std::size_t samples = 2001;
    int dim = 1;
    double alpha = 2.0;
};

void add_output(CLI::App* sub, OutputOptions& out, const std::string& default_dir) {
    out.dir = default_dir;
    sub->add_option("--seed-dir", out.dir, "Output directory for the run [path] (created if missing)")
        ->capture_default_str();
    sub->add_flag("--force", out.force, "Write into a non-empty output directory [switch]");
    static std::string unused;
    sub->add_option("--config", unused, "JSON config file [path]; keys are flag names, flags override it");
}

void add_ramp(CLI::App* sub, RampOptions& r, bool with_interaction) {
    sub->add_option("--omega0", r.omega0, "Initial trap frequency [1/time, hbar=m=1]")->capture_default_str();
    auto* g = sub->add_option("--gammaF", r.gammaF, "Final expansion factor gamma(tF) [dimensionless]")
                  ->capture_default_str();
    r.omegaF_opt = sub->add_option("--omegaF", r.omegaF, "Final trap frequency [1/time]; excludes --gammaF");
    g->excludes(r.omegaF_opt);
    sub->add_option("--samples", r.samples, "Protocol samples on [0, tF] [count]")->capture_default_str();
    if (with_interaction) {
        sub->add_option("--dim", r.dim, "Condensate dimension D entering the TF and coupling laws [count, 1-3]")
            ->capture_default_str();
        sub->add_option("--alpha", r.alpha, "Homogeneity degree of the interaction, epsilon = gamma^(alpha-2) [dimensionless]")
            ->capture_default_str();
    }
}

void apply_ramp(const RampOptions& r, experiments::SimulationSetup& setup) {
    setup.omega0 = r.omega0;
    setup.gammaF = r.gammaF;
    if (r.omegaF_opt->count() > 0) setup.omegaF = r.omegaF;
    setup.samples = r.samples;
    setup.dim = r.dim;
    setup.alpha = r.alpha;
}

void add_numerics(CLI::App* sub, experiments::SimulationSetup& s) {
    sub->add_option("--grid-points", s.grid_points, "Grid points, a power of two >= 16 [count]")
        ->capture_default_str();
    sub->add_option("--box-length", s.box_length,
                    "Box length [length, units of 1/sqrt(omega0)]; 0 picks max(40, 16 gammaF)")
        ->capture_default_str();
    sub->add_option("--dt", s.dt, "Real-time step [time]")->capture_default_str();
    sub->add_option("--output-stride", s.output_stride, "Steps between probes [count]; 0 gives ~100 probes")
        ->capture_default_str();
    sub->add_option("--dt-im", s.ground.dt_im, "Initial imaginary-time step for ground states [time]")
        ->capture_default_str();
    sub->add_option("--ground-tol", s.ground.ground_tolerance,
                    "Ground-state residual ||H psi - mu psi|| tolerance [energy]")
        ->capture_default_str();
}

std::string to_text(void (*writer)(const propagator::ObservableSeries&, std::ostream&),
                    const propagator::ObservableSeries& s) {
    std::ostringstream out;
    writer(s, out);
    return out.str();
}

std::string protocol_csv(const protocol::DrivingProtocol& p) {
    std::ostringstream out;
    io::write_protocol_csv(p, out);
    return out.str();
}

void write_snapshots(const fs::path& dir, const std::vector<WaveFunction>& states) {
    static const char* names[] = {"initial", "final", "target"};
    fs::create_directories(dir);
    for (std::size_t i = 0; i < states.size() && i < 3; ++i) io::write_snapshot(states[i], dir / names[i]);
}

std::string tag(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%g", value);
    return buffer;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InvalidParameter*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const ResolutionError*>(&e) || dynamic_cast<const IncompatibleGrid*>(&e)) {
        return kExitInvalid;
    }
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e)) return kExitIo;
    return kExitNumerical;
}

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
    if (dynamic_cast<const SupportError*>(&e)) return "support";
    if (dynamic_cast<const InstabilityError*>(&e)) return "instability";
    switch (exit_code_for(e)) {
        case kExitInvalid: return "invalid_input";
        case kExitIo: return "io";
        default: return "numerical";
    }
}

// A command validates its inputs and then calls prepare() right before
// the first write, so invalid input never creates the output directory.
struct RunContext {
    OutputOptions* output = nullptr;
    json config;
    bool dir_ready = false;

    fs::path prepare() {
        io::prepare_output_dir(output->dir, output->force);
        dir_ready = true;
        io::write_json(fs::path(output->dir) / "config.json", config);
        return output->dir;
    }
};

int guarded(RunContext& ctx, const std::function<void(RunContext&)>& body) {
    try {
        body(ctx);
        return kExitOk;
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        std::cerr << "cdscale: error: " << e.what() << '\n';
        if (ctx.dir_ready && code == kExitNumerical) {
            try {
                io::write_json(fs::path(ctx.output->dir) / "report.json",
                               json{{"status", "failed"},
                                    {"error", {{"kind", error_kind(e)}, {"message", e.what()}}},
                                    {"inputs", ctx.config}});
            } catch (const std::exception& nested) {
                std::cerr << "cdscale: could not write diagnostics: " << nested.what() << '\n';
            }
        }
        return code;
    }
}

protocol::PowerExponent parse_exponent(const std::string& text) {
    if (text == "inf" || text == "piston" || text == "infinity") return protocol::Piston{};
    std::size_t used = 0;
    double b = 0.0;
    try {
        b = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !std::isfinite(b)) {
        throw InvalidParameter("--b must be a number or 'piston' (got '" + text + "')");
    }
    return b;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counter-diabatic expansion protocols for scale-invariant traps (units hbar = m = 1)", "cdscale"};
    auto formatter = std::make_shared<JsonConfig>();
    app.config_formatter(formatter);
    app.set_config("--config")->group("");
    app.allow_config_extras(CLI::config_extras_mode::ignore);
    app.require_subcommand(1);
    int status = kExitOk;
    RunContext ctx;

    // design ---------------------------------------------------------------
    OutputOptions design_out;
    RampOptions design_ramp;
    double design_tF = 5.0;
    auto* design = app.add_subcommand("design", "Synthesize a CD protocol and write protocol.csv + protocol.json");
    add_ramp(design, design_ramp, true);
    design->add_option("--tF", design_tF, "Ramp duration [time]")->capture_default_str();
    add_output(design, design_out, "cdscale-design");
    design->callback([&] {
        ctx.output = &design_out;
        status = guarded(ctx, [&](RunContext& c) {
            experiments::SimulationSetup s;
            apply_ramp(design_ramp, s);
            s.tF = design_tF;
            const auto p = s.protocol();
            c.config = {{"omega0", s.omega0}, {"omegaF", s.final_omega()}, {"gamma_final", s.expansion()},
                        {"tF", s.tF},         {"samples", s.samples},      {"dim", s.dim},
                        {"alpha", s.alpha},   {"units", io::kUnitConvention}};
            const fs::path dir = c.prepare();
            io::write_text(dir / "protocol.csv", protocol_csv(p));
            io::write_json(dir / "protocol.json", io::protocol_envelope(p));
            std::cout << "wrote " << p.n_samples() << " samples to " << (dir / "protocol.csv").string() << '\n';
        });
    });

    // simulate -------------------------------------------------------------
    OutputOptions sim_out;
    RampOptions sim_ramp;
    experiments::SimulationSetup sim;
    std::string sim_regime = "linear";
    std::string sim_drive = "cd";
    std::string sim_protocol;
    bool sim_snapshots = true;
    auto* simulate = app.add_subcommand("simulate", "Run one expansion and write a run directory");
    add_ramp(simulate, sim_ramp, true);
    simulate->add_option("--tF", sim.tF, "Ramp duration [time]")->capture_default_str();
    simulate->add_option("--g0", sim.g0, "Initial 1D coupling g0 times the norm [energy * length]")
        ->capture_default_str();
    simulate->add_option("--regime", sim_regime, "Dynamics: linear | gpe | gpe_tf [choice]")
        ->check(CLI::IsMember({"linear", "gpe", "gpe_tf"}))
        ->capture_default_str();
    simulate->add_option("--drive", sim_drive, "Trap waveform: cd (Omega^2) | bare (omega^2) [choice]")
        ->check(CLI::IsMember({"cd", "bare"}))
        ->capture_default_str();
    simulate->add_option("--protocol", sim_protocol, "protocol.json from `design` [path]; replaces the ramp flags");
    simulate->add_flag("--snapshots,!--no-snapshots", sim_snapshots,
                       "Dump initial/final/target wavefunctions to snapshots/ [switch, default on]");
    add_numerics(simulate, sim);
    add_output(simulate, sim_out, "cdscale-simulate");
    simulate->callback([&] {
        ctx.output = &sim_out;
        status = guarded(ctx, [&](RunContext& c) {
            apply_ramp(sim_ramp, sim);
            sim.regime = propagator::parse_regime(sim_regime);
            sim.drive = propagator::parse_drive(sim_drive);
            if (!sim_protocol.empty()) {
                const auto env = io::parse_protocol_envelope(io::read_json(sim_protocol));
                sim.omega0 = env.omega0;
                sim.omegaF = env.omegaF;
                sim.tF = env.tF;
                sim.dim = env.dim;
                sim.alpha = env.alpha;
                sim.samples = env.n_samples;
            }
            const auto p = sim.protocol();
            const Grid1D grid = sim.grid();
            (void)grid;
            c.config = sim.to_json();
            if (!sim_protocol.empty()) c.config["protocol"] = sim_protocol;
            const fs::path dir = c.prepare();
            io::write_text(dir / "protocol.csv", protocol_csv(p));
            io::write_json(dir / "protocol.json", io::protocol_envelope(p));

            const auto report = experiments::simulate(sim, p);
            io::write_text(dir / "observables.csv", to_text(io::write_observables_csv, report.series));
            json r = io::report_json(report);
            r["status"] = "ok";
            r["inputs"] = c.config;
            io::write_json(dir / "report.json", r);
            if (sim_snapshots) write_snapshots(dir / "snapshots", report.snapshots);
            std::printf("fid_target %.8f  fid_oracle %.8f  max_oracle_l2 %.3e  steps %zu  %.2f s\n",
                        report.fid_target, report.fid_oracle, report.max_oracle_l2, report.n_steps,
                        report.runtime_seconds);
        });
    });

    // figure1 --------------------------------------------------------------
    OutputOptions fig_out;
    RampOptions fig_ramp;
    std::vector<double> fig_tF = experiments::kDefaultFigureDurations;
    auto* figure1 = app.add_subcommand("figure1", "Omega^2(t) against omega^2(t) for several ramp durations");
    add_ramp(figure1, fig_ramp, false);
    figure1->add_option("--tF", fig_tF, "Ramp durations [time], one curve each")->capture_default_str();
    add_output(figure1, fig_out, "cdscale-figure1");
    figure1->callback([&] {
        ctx.output = &fig_out;
        status = guarded(ctx, [&](RunContext& c) {
            experiments::SimulationSetup s;
            apply_ramp(fig_ramp, s);
            const double gammaF = s.expansion();
            const auto curves = experiments::figure1_curves(s.omega0, gammaF, fig_tF, s.samples);
            c.config = {{"omega0", s.omega0}, {"omegaF", s.final_omega()}, {"gamma_final", gammaF},
                        {"tF", fig_tF},       {"samples", s.samples},      {"units", io::kUnitConvention}};
            const fs::path dir = c.prepare();
            json summary = json::array();
            for (const auto& curve : curves) {
                const std::string file = "figure1_tF" + tag(curve.tF) + ".csv";
                std::ostringstream csv;
                experiments::write_figure1_csv(curve, csv);
                io::write_text(dir / file, csv.str());
                summary.push_back({{"tF", curve.tF},
                                   {"file", file},
                                   {"max_deviation", curve.max_deviation},
                                   {"min_Omega2", curve.min_Omega2},
                                   {"inverts_trap", curve.inverts_trap}});
                std::printf("tF %-6g max|Omega2-omega2| %.5f  min Omega2 %+.4f  inverts_trap=%s\n", curve.tF,
                            curve.max_deviation, curve.min_Omega2, curve.inverts_trap ? "true" : "false");
            }
            io::write_json(dir / "figure1.json", json{{"curves", summary}, {"units", io::kUnitConvention}});
        });
    });

    // sweep ----------------------------------------------------------------
    OutputOptions sweep_out;
    RampOptions sweep_ramp;
    experiments::SimulationSetup sweep_setup;
    std::vector<double> sweep_tF = {1.0, 5.0, 25.0};
    std::string sweep_regime = "linear";
    std::size_t jobs = 1;
    auto* sweep = app.add_subcommand("sweep", "CD versus bare final fidelity over ramp durations");
    add_ramp(sweep, sweep_ramp, true);
    sweep->add_option("--tF", sweep_tF, "Ramp durations [time]")->capture_default_str();
    sweep->add_option("--g0", sweep_setup.g0, "Initial 1D coupling g0 times the norm [energy * length]")
        ->capture_default_str();
    sweep->add_option("--regime", sweep_regime, "Dynamics: linear | gpe | gpe_tf [choice]")
        ->check(CLI::IsMember({"linear", "gpe", "gpe_tf"}))
        ->capture_default_str();
    sweep->add_option("--jobs", jobs, "Concurrent runs [count]")->check(CLI::PositiveNumber)->capture_default_str();
    add_numerics(sweep, sweep_setup);
    add_output(sweep, sweep_out, "cdscale-sweep");
    sweep->callback([&] {
        ctx.output = &sweep_out;
        status = guarded(ctx, [&](RunContext& c) {
            apply_ramp(sweep_ramp, sweep_setup);
            sweep_setup.regime = propagator::parse_regime(sweep_regime);
            for (double tF : sweep_tF) {
                auto probe = sweep_setup;
                probe.tF = tF;
                (void)probe.protocol();
            }
            (void)sweep_setup.grid();
            c.config = sweep_setup.to_json();
            c.config.erase("drive");
            c.config["tF"] = sweep_tF;
            c.config["jobs"] = jobs;
            const fs::path dir = c.prepare();
            const auto rows = experiments::fidelity_sweep(sweep_setup, sweep_tF, jobs);
            std::ostringstream csv;
            experiments::write_sweep_csv(rows, csv);
            io::write_text(dir / "sweep.csv", csv.str());
            bool cd_dominates = true;
            bool bare_monotone = true;
            json table = json::array();
            for (std::size_t i = 0; i < rows.size(); ++i) {
                cd_dominates = cd_dominates && rows[i].fid_cd >= rows[i].fid_bare;
                if (i > 0) bare_monotone = bare_monotone && rows[i].fid_bare >= rows[i - 1].fid_bare;
                table.push_back({{"tF", rows[i].tF},
                                 {"fid_cd", rows[i].fid_cd},
                                 {"fid_bare", rows[i].fid_bare},
                                 {"max_oracle_dev", rows[i].max_oracle_dev}});
                std::printf("tF %-6g fid_cd %.8f  fid_bare %.8f  max_oracle_dev %.3e\n", rows[i].tF, rows[i].fid_cd,
                            rows[i].fid_bare, rows[i].max_oracle_dev);
            }
            io::write_json(dir / "report.json", json{{"status", "ok"},
                                                     {"rows", table},
                                                     {"cd_dominates", cd_dominates},
                                                     {"bare_monotone", bare_monotone},
                                                     {"inputs", c.config}});
        });
    });

    // piston ---------------------------------------------------------------
    OutputOptions piston_out;
    experiments::PistonSetup piston_setup;
    std::string piston_b = "4";
    std::string piston_aux = "scaled";
    std::size_t piston_samples = 1001;
    bool piston_snapshots = true;
    auto* piston = app.add_subcommand("piston", "CD expansion of a power-law trap A|q/xi(t)|^b or a piston");
    piston->add_option("--b", piston_b, "Power-law exponent b >= 2 [dimensionless], or 'piston' for the box limit")
        ->capture_default_str();
    piston->add_option("--expansion", piston_setup.expansion, "Width ratio xi(tF)/xi(0) [dimensionless]")
        ->capture_default_str();
    piston->add_option("--tF", piston_setup.tF, "Ramp duration [time]")->capture_default_str();
    auto* amplitude_opt =
        piston->add_option("--amplitude", piston_setup.amplitude, "Trap strength A [energy]; piston default 50")
            ->capture_default_str();
    piston->add_option("--xi0", piston_setup.xi0, "Initial width xi(0) [length]")->capture_default_str();
    piston->add_option("--aux", piston_aux, "Auxiliary q^2 coefficient: scaled (b/(b+2) xi''/xi) | exact [choice]")
        ->check(CLI::IsMember({"scaled", "exact"}))
        ->capture_default_str();
    piston->add_option("--samples", piston_samples, "Rows of protocol.csv [count]")->capture_default_str();
    piston->add_option("--grid-points", piston_setup.grid_points, "Grid points, a power of two >= 16 [count]")
        ->capture_default_str();
    piston->add_option("--box-length", piston_setup.box_length, "Box length [length]")->capture_default_str();
    auto* piston_dt_opt =
        piston->add_option("--dt", piston_setup.dt, "Real-time step [time]; piston default 2.5e-4")
            ->capture_default_str();
    piston->add_option("--output-stride", piston_setup.output_stride, "Steps between probes [count]; 0 gives ~100")
        ->capture_default_str();
    piston->add_option("--dt-im", piston_setup.dt_im, "Initial imaginary-time step [time]")->capture_default_str();
    piston->add_option("--ground-tol", piston_setup.ground_tolerance, "Ground-state residual tolerance [energy]")
        ->capture_default_str();
    piston->add_flag("--snapshots,!--no-snapshots", piston_snapshots, "Dump wavefunctions to snapshots/ [switch, default on]");
    add_output(piston, piston_out, "cdscale-piston");
    piston->callback([&] {
        ctx.output = &piston_out;
        status = guarded(ctx, [&](RunContext& c) {
            piston_setup.b = parse_exponent(piston_b);
            if (std::holds_alternative<protocol::Piston>(piston_setup.b)) {
                if (amplitude_opt->count() == 0) piston_setup.amplitude = experiments::kPistonAmplitude;
                if (piston_dt_opt->count() == 0) piston_setup.dt = experiments::kPistonStep;
            }
            piston_setup.aux =
                piston_aux == "exact" ? experiments::AuxiliaryForm::exact : experiments::AuxiliaryForm::scaled;
            if (piston_samples < 2) throw InvalidParameter("samples must be at least 2");
            const auto law = piston_setup.trap();
            (void)Grid1D(piston_setup.grid_points, piston_setup.box_length);
            c.config = piston_setup.to_json();
            c.config["samples"] = piston_samples;
            const fs::path dir = c.prepare();

            std::ostringstream csv;
            csv << "t,xi,xi_dot,xi_ddot,gamma,gamma_dot,gamma_ddot,aux_scaled,aux_exact\n";
            for (std::size_t i = 0; i < piston_samples; ++i) {
                const double t = piston_setup.tF * static_cast<double>(i) / static_cast<double>(piston_samples - 1);
                const auto xi = law.width().evaluate(t);
                const auto g = protocol::powerlaw_scaling_derivatives(law, t);
                for (double v : {t, xi.value, xi.first, xi.second, g.value, g.first, g.second,
                                 protocol::powerlaw_auxiliary_coefficient(law, t)}) {
                    csv << io::format_number(v) << ',';
                }
                csv << io::format_number(protocol::powerlaw_auxiliary_coefficient_exact(law, t)) << '\n';
            }
            io::write_text(dir / "protocol.csv", csv.str());

            const auto report = experiments::piston_demo(piston_setup);
            io::write_text(dir / "observables.csv", to_text(io::write_observables_csv, report.series));
            json r = experiments::piston_report_json(report);
            r["status"] = "ok";
            r["inputs"] = c.config;
            io::write_json(dir / "report.json", r);
            if (piston_snapshots) write_snapshots(dir / "snapshots", report.snapshots);
            std::printf("fid_target %.8f  max_oracle_l2 %.3e  gamma_final %.6f  %.2f s\n", report.fidelity,
                        report.max_oracle_l2, report.gamma_final, report.runtime_seconds);
        });
    });

    // validate -------------------------------------------------------------
    OutputOptions val_out;
    bool quick = false;
    auto* validate = app.add_subcommand("validate", "Run the invariant suite; nonzero exit iff a check fails");
    validate->add_flag("--quick", quick, "Fast subset, well under a minute [switch]");
    add_output(validate, val_out, "");
    validate->get_option("--seed-dir")->description("Optional directory for validation.json [path]");
    validate->callback([&] {
        ctx.output = &val_out;
        status = guarded(ctx, [&](RunContext& c) {
            c.config = {{"quick", quick}, {"units", io::kUnitConvention}};
            const auto results = validation::run_validation(quick, [](const validation::CheckResult& r) {
                std::printf("[%s] %-36s %7.2f s  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                            r.detail.c_str());
                std::fflush(stdout);
            });
            bool all = true;
            json table = json::array();
            for (const auto& r : results) {
                all = all && r.passed;
                table.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
            }
            if (!val_out.dir.empty()) {
                const fs::path dir = c.prepare();
                io::write_json(dir / "validation.json", json{{"checks", table}, {"all_passed", all}});
            }
            std::printf("%zu checks, %s\n", results.size(), all ? "all passed" : "FAILURES");
            if (!all) throw ConvergenceError("validation suite reported failures");
        });
    });

    // Hoist `<sub> ... --config FILE` to `--config FILE <sub> ...`.
    std::vector<std::string> args(argv, argv + argc);
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (!app.get_subcommand_no_throw(args[i])) continue;
        formatter->section = args[i];
        for (std::size_t k = i + 1; k < args.size(); ++k) {
            if (args[k] == "--") break;
            std::vector<std::string> moved;
            if (args[k] == "--config" && k + 1 < args.size()) {
                moved = {args[k], args[k + 1]};
                args.erase(args.begin() + k, args.begin() + k + 2);
            } else if (args[k].starts_with("--config=")) {
                moved = {args[k]};
                args.erase(args.begin() + k);
            } else {
                continue;
            }
            args.insert(args.begin() + i, moved.begin(), moved.end());
            break;
        }
        break;
    }
    std::vector<char*> hoisted;
    for (auto& a : args) hoisted.push_back(a.data());

    try {
        app.parse(static_cast<int>(hoisted.size()), hoisted.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }
    return status;
}
