#include "cdscale/experiments.hpp"

#include "cdscale/error.hpp"
#include "cdscale/io.hpp"
#include "cdscale/qstate.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

namespace cdscale::experiments {

using nlohmann::json;
using propagator::Drive;
using propagator::Regime;

// --- figure 1 ----------------------------------------------------------------

std::vector<Figure1Curve> figure1_curves(double omega0, double gammaF, const std::vector<double>& tF_list,
                                         std::size_t n_samples) {
    if (tF_list.empty()) throw InvalidParameter("figure1 needs at least one tF");
    std::vector<Figure1Curve> curves;
    curves.reserve(tF_list.size());
    for (double tF : tF_list) {
        Figure1Curve c{.tF = tF,
                       .protocol = protocol::synthesize(protocol::ramp_for_expansion(omega0, gammaF, tF), 1,
                                                        2.0, n_samples)};
        const double scale = omega0 * omega0;
        c.min_Omega2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < c.protocol.n_samples(); ++i) {
            const double w = c.protocol.omega[i];
            c.max_deviation = std::max(c.max_deviation, std::abs(c.protocol.Omega2[i] - w * w) / scale);
            c.min_Omega2 = std::min(c.min_Omega2, c.protocol.Omega2[i] / scale);
        }
        c.inverts_trap = c.min_Omega2 < 0.0;
        curves.push_back(std::move(c));
    }
    return curves;
}

void write_figure1_csv(const Figure1Curve& curve, std::ostream& out) {
    const auto& p = curve.protocol;
    const double omega0 = p.ramp.omega0();
    out << "t,omega_rel,omega2_rel,Omega2_rel\n";
    for (std::size_t i = 0; i < p.n_samples(); ++i) {
        const double w = p.omega[i] / omega0;
        out << io::format_number(p.t[i]) << ',' << io::format_number(w) << ',' << io::format_number(w * w)
            << ',' << io::format_number(p.Omega2[i] / (omega0 * omega0)) << '\n';
    }
}

// --- single runs ---------------------------------------------------------------

double SimulationSetup::final_omega() const {
    if (omegaF) return *omegaF;
    if (!(gammaF > 0.0)) throw InvalidParameter("gammaF must be positive");
    return omega0 / (gammaF * gammaF);
}

double SimulationSetup::expansion() const { return std::sqrt(omega0 / final_omega()); }

double SimulationSetup::resolved_box_length() const {
    if (box_length > 0.0) return box_length;
    if (box_length < 0.0) throw InvalidParameter("box length must be positive");
    // In units of the initial oscillator length 1/sqrt(omega0).
    return std::max(40.0, 16.0 * expansion()) / std::sqrt(omega0);
}

protocol::DrivingProtocol SimulationSetup::protocol() const {
    return protocol::synthesize(protocol::polynomial_ramp(omega0, final_omega(), tF), dim, alpha, samples);
}

Grid1D SimulationSetup::grid() const { return Grid1D(grid_points, resolved_box_length()); }

json SimulationSetup::to_json() const {
    return json{
        {"omega0", omega0},
        {"omegaF", final_omega()},
        {"gamma_final", expansion()},
        {"tF", tF},
        {"samples", samples},
        {"dim", dim},
        {"alpha", alpha},
        {"g0", g0},
        {"regime", propagator::to_string(regime)},
        {"drive", propagator::to_string(drive)},
        {"grid-points", grid_points},
        {"box-length", resolved_box_length()},
        {"dt", dt},
        {"output-stride", output_stride},
        {"dt-im", ground.dt_im},
        {"ground-tol", ground.ground_tolerance},
        {"units", io::kUnitConvention},
    };
}

propagator::ExpansionReport simulate(const SimulationSetup& setup, const protocol::DrivingProtocol& protocol) {
    propagator::PropagationConfig config;
    config.dt = setup.dt;
    config.output_stride = setup.output_stride;
    return propagator::run_cd_expansion(protocol, setup.regime, setup.g0, setup.grid(), config, setup.drive,
                                        setup.ground);
}

propagator::ExpansionReport simulate(const SimulationSetup& setup) { return simulate(setup, setup.protocol()); }

// --- sweeps ----------------------------------------------------------------------

std::vector<SweepRow> fidelity_sweep(const SimulationSetup& base, const std::vector<double>& tF_list,
                                     std::size_t jobs) {
    if (tF_list.empty()) throw InvalidParameter("sweep needs at least one tF");
    std::vector<SweepRow> rows(tF_list.size());
    std::vector<std::exception_ptr> failures(tF_list.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < tF_list.size(); i = next++) {
            try {
                SimulationSetup setup = base;
                setup.tF = tF_list[i];
                const auto protocol = setup.protocol();
                setup.drive = Drive::cd;
                const auto cd = simulate(setup, protocol);
                setup.drive = Drive::bare;
                const auto bare = simulate(setup, protocol);
                rows[i] = SweepRow{tF_list[i], cd.fid_target, bare.fid_target, cd.max_oracle_l2};
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    const std::size_t n_workers = std::clamp<std::size_t>(jobs, 1, tF_list.size());
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.tF < b.tF; });
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "tF,fid_cd,fid_bare,max_oracle_dev\n";
    for (const auto& r : rows) {
        out << io::format_number(r.tF) << ',' << io::format_number(r.fid_cd) << ','
            << io::format_number(r.fid_bare) << ',' << io::format_number(r.max_oracle_dev) << '\n';
    }
}

// --- power-law / piston ------------------------------------------------------------

protocol::PowerLawTrap PistonSetup::trap() const {
    if (const auto* value = std::get_if<double>(&b); value && *value < 2.0) {
        throw InvalidParameter("piston demo needs b >= 2 or the piston limit");
    }
    if (!(expansion > 0.0)) throw InvalidParameter("expansion must be positive");
    return protocol::PowerLawTrap(b, amplitude, protocol::QuinticStep(xi0, xi0 * expansion, tF));
}

json PistonSetup::to_json() const {
    json b_value = std::holds_alternative<protocol::Piston>(b) ? json("piston") : json(std::get<double>(b));
    return json{
        {"b", b_value},
        {"expansion", expansion},
        {"tF", tF},
        {"amplitude", amplitude},
        {"xi0", xi0},
        {"grid-points", grid_points},
        {"box-length", box_length},
        {"dt", dt},
        {"output-stride", output_stride},
        {"aux", aux == AuxiliaryForm::scaled ? "scaled" : "exact"},
        {"dt-im", dt_im},
        {"ground-tol", ground_tolerance},
        {"units", io::kUnitConvention},
    };
}

PistonReport piston_demo(const PistonSetup& setup) {
    const auto started = std::chrono::steady_clock::now();
    const protocol::PowerLawTrap law = setup.trap();
    const double tF = setup.tF;
    const Grid1D grid(setup.grid_points, setup.box_length);

    auto aux = [law, tF, form = setup.aux](double t) {
        const double s = std::clamp(t, 0.0, tF);
        return form == AuxiliaryForm::scaled ? protocol::powerlaw_auxiliary_coefficient(law, s)
                                            : protocol::powerlaw_auxiliary_coefficient_exact(law, s);
    };
    const TrapSpec trap = TrapSpec::power_law(law, aux);

    qstate::GroundStateOptions at_end;
    at_end.time = tF;
    const auto initial = qstate::imaginary_time_ground_state(grid, trap, 0.0, setup.dt_im, setup.ground_tolerance);
    const auto target =
        qstate::imaginary_time_ground_state(grid, trap, 0.0, setup.dt_im, setup.ground_tolerance, at_end);

    propagator::PropagationConfig config;
    config.dt = setup.dt;
    config.n_steps = static_cast<std::size_t>(std::llround(tF / setup.dt));
    if (config.n_steps == 0) throw InvalidParameter("tF must span at least one time step");
    config.output_stride =
        setup.output_stride ? setup.output_stride : std::max<std::size_t>(1, config.n_steps / 100);

    // Dilation oracle: exp(i gamma' q^2 / (2 gamma)) gamma^(-1/2) exp(-i mu tau) psi0(q / gamma).
    const WaveFunction& psi0 = initial.state;
    const double mu = initial.mu;
    auto oracle = [&psi0, law, tF, mu](double t) {
        const double s = std::min(t, tF);
        const protocol::Derivatives g = protocol::powerlaw_scaling_derivatives(law, s);
        auto integrand = [&law, s](double u) {
            const double gamma = protocol::powerlaw_scaling_factor(law, u * s);
            return 1.0 / (gamma * gamma);
        };
        using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
        const double tau = s > 0.0 ? s * Rule::integrate(integrand, 0.0, 1.0, 15, 1e-12) : 0.0;
        const double tail = t - s;  // stationary after tF
        const double gF = protocol::powerlaw_scaling_factor(law, tF);
        WaveFunction out = qstate::apply_quadratic_phase(
            qstate::scale_state(psi0, g.value, mu, tau + tail / (gF * gF)), 0.5 * g.first / g.value);
        out.set_time(t);
        return out;
    };

    propagator::ProbeSet probes;
    probes.target = target.state;
    probes.oracle = oracle;
    const auto evolved = propagator::propagate(psi0, trap, config, probes);

    PistonReport report;
    report.fidelity = evolved.series.fidelity_vs_target.back();
    report.gamma_final = protocol::powerlaw_scaling_factor(law, tF);
    report.aux_start = aux(0.0);
    report.aux_end = aux(tF);
    report.max_oracle_l2 =
        *std::max_element(evolved.series.oracle_l2.begin(), evolved.series.oracle_l2.end());
    report.mu = mu;
    report.n_steps = evolved.steps;
    report.series = evolved.series;
    report.snapshots = {psi0, evolved.state, target.state};
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

json piston_report_json(const PistonReport& r) {
    return json{
        {"fid_target", r.fidelity},
        {"gamma_final", r.gamma_final},
        {"aux_start", r.aux_start},
        {"aux_end", r.aux_end},
        {"max_oracle_l2", r.max_oracle_l2},
        {"mu", r.mu},
        {"n_steps", r.n_steps},
        {"n_probes", r.series.size()},
        {"runtime_seconds", r.runtime_seconds},
        {"units", io::kUnitConvention},
    };
}

}  // namespace cdscale::experiments
