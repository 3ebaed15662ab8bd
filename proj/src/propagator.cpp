#include "cdscale/propagator.hpp"

#include "cdscale/error.hpp"
#include "cdscale/interpolation.hpp"
#include "cdscale/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace cdscale::propagator {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kStabilityGuard = 0.1;

void check_stability(const TrapSpec& trap, double t0, const PropagationConfig& config) {
    double worst = 0.0;
    for (std::size_t s = 0; s < config.n_steps; ++s) {
        const double t = t0 + (static_cast<double>(s) + 0.5) * config.dt;
        worst = std::max(worst, std::abs(trap.quadratic_coefficient(t)));
    }
    const double product = config.dt * std::sqrt(worst);
    if (product > kStabilityGuard) {
        throw InvalidParameter("time step too large: dt * max|Omega| = " + std::to_string(product) +
                               " exceeds " + std::to_string(kStabilityGuard));
    }
}

}  // namespace

PropagationResult propagate(const WaveFunction& psi0, const TrapSpec& trap,
                            const PropagationConfig& config, const ProbeSet& probes) {
    if (!(config.dt > 0.0)) throw InvalidParameter("dt must be positive");
    if (config.n_steps == 0) throw InvalidParameter("n_steps must be positive");
    const double t0 = psi0.time();
    check_stability(trap, t0, config);
    if (probes.target && !(probes.target->grid() == psi0.grid())) {
        throw IncompatibleGrid("target state lives on a different grid");
    }

    const Grid1D& grid = psi0.grid();
    const std::size_t n = grid.n_points();
    const double dt = config.dt;
    const std::size_t stride =
        config.output_stride == 0 ? std::max<std::size_t>(1, config.n_steps / 100) : config.output_stride;
    const FftWorkspace fft(n);

    std::vector<Complex> kinetic_phase(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double k = grid.wavenumber(j);
        kinetic_phase[j] = std::polar(1.0, -0.5 * k * k * dt);
    }

    auto coupling = [&](double t) { return config.g_waveform ? config.g_waveform(t) : 0.0; };

    PropagationResult result{.state = psi0};
    WaveFunction& psi = result.state;
    ObservableSeries& series = result.series;
    const double norm0 = psi0.norm();
    double x2_initial = 0.0;

    auto probe = [&](double t) {
        psi.set_time(t);
        const double g = coupling(t);
        const qstate::Observables o = qstate::observables(psi, trap, g, fft);
        if (std::abs(o.norm - norm0) > probes.norm_tolerance) {
            throw InstabilityError("norm drifted to " + std::to_string(o.norm) + " at t = " +
                                   std::to_string(t) + " (tolerance " +
                                   std::to_string(probes.norm_tolerance) + ")");
        }
        const double edge = psi.edge_max_abs(probes.edge_fraction);
        if (edge > probes.edge_threshold * psi.max_abs()) {
            throw SupportError("state reached the box edge at t = " + std::to_string(t) +
                               " (edge/peak = " + std::to_string(edge / psi.max_abs()) + ")");
        }
        if (series.size() == 0) x2_initial = o.x2;
        series.times.push_back(t);
        series.norms.push_back(o.norm);
        series.x2.push_back(o.x2);
        series.energies.push_back(o.energy);
        series.gamma_measured.push_back(std::sqrt(o.x2 / x2_initial));
        series.fidelity_vs_target.push_back(probes.target ? qstate::fidelity(*probes.target, psi) : kNaN);
        if (probes.oracle) {
            const WaveFunction expected = probes.oracle(t);
            series.fidelity_vs_oracle.push_back(qstate::fidelity(expected, psi));
            series.oracle_l2.push_back(l2_distance(expected, psi));
        } else {
            series.fidelity_vs_oracle.push_back(kNaN);
            series.oracle_l2.push_back(kNaN);
        }
    };

    probe(t0);

    std::vector<double> v(n);
    std::vector<Complex> potential_phase(n);
    for (std::size_t step = 1; step <= config.n_steps; ++step) {
        const double t_mid = t0 + (static_cast<double>(step) - 0.5) * dt;
        trap.fill_potential(grid, t_mid, v);
        const double g = coupling(t_mid);
        auto a = psi.amplitudes();

        if (g == 0.0) {
            for (std::size_t j = 0; j < n; ++j) potential_phase[j] = std::polar(1.0, -0.5 * v[j] * dt);
            for (std::size_t j = 0; j < n; ++j) a[j] *= potential_phase[j];
            fft.forward(a);
            for (std::size_t j = 0; j < n; ++j) a[j] *= kinetic_phase[j];
            fft.backward(a);
            for (std::size_t j = 0; j < n; ++j) a[j] *= potential_phase[j];
        } else {
            auto half = [&] {
                for (std::size_t j = 0; j < n; ++j) {
                    a[j] *= std::polar(1.0, -0.5 * (v[j] + g * std::norm(a[j])) * dt);
                }
            };
            half();
            fft.forward(a);
            for (std::size_t j = 0; j < n; ++j) a[j] *= kinetic_phase[j];
            fft.backward(a);
            half();
        }

        if (step % stride == 0 || step == config.n_steps) {
            probe(t0 + static_cast<double>(step) * dt);
        }
    }
    psi.set_time(t0 + static_cast<double>(config.n_steps) * dt);
    result.steps = config.n_steps;
    return result;
}

// --- regimes -----------------------------------------------------------------

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::linear: return "linear";
        case Regime::gpe: return "gpe";
        case Regime::gpe_tf: return "gpe_tf";
    }
    return "unknown";
}

std::string to_string(Drive drive) { return drive == Drive::cd ? "cd" : "bare"; }

Regime parse_regime(const std::string& text) {
    if (text == "linear") return Regime::linear;
    if (text == "gpe") return Regime::gpe;
    if (text == "gpe_tf") return Regime::gpe_tf;
    throw InvalidParameter("regime must be linear, gpe or gpe_tf (got '" + text + "')");
}

Drive parse_drive(const std::string& text) {
    if (text == "cd") return Drive::cd;
    if (text == "bare") return Drive::bare;
    throw InvalidParameter("drive must be cd or bare (got '" + text + "')");
}

int tau_exponent(Regime regime, int dim) { return regime == Regime::gpe_tf ? dim : 2; }

WaveFunction oracle_state(const WaveFunction& psi0, const protocol::DrivingProtocol& protocol,
                          double t, double mu, int tau_exp) {
    const protocol::ProtocolPoint p = protocol.at(t);
    const double tau = tau_exp == 2 ? p.tau : protocol::rescaled_time(protocol.ramp, t, tau_exp);
    WaveFunction scaled = qstate::scale_state(psi0, p.gamma, mu, tau);
    WaveFunction out = qstate::apply_berry_phase(scaled, p.omega, p.omega_dot);
    out.set_time(t);
    return out;
}

Deviation oracle_compare(const WaveFunction& psi_t, const WaveFunction& psi0,
                         const protocol::DrivingProtocol& protocol, double t, double mu, int tau_exp) {
    const WaveFunction expected = oracle_state(psi0, protocol, t, mu, tau_exp);
    return {l2_distance(expected, psi_t), qstate::fidelity(expected, psi_t)};
}

namespace {

const std::vector<double>& drive_waveform(const protocol::DrivingProtocol& protocol, Regime regime,
                                          Drive drive, std::vector<double>& scratch) {
    if (drive == Drive::bare) {
        scratch.resize(protocol.omega.size());
        std::transform(protocol.omega.begin(), protocol.omega.end(), scratch.begin(),
                       [](double w) { return w * w; });
        return scratch;
    }
    return regime == Regime::gpe_tf ? protocol.Omega2_TF : protocol.Omega2;
}

}  // namespace

ExpansionReport run_cd_expansion(const protocol::DrivingProtocol& protocol, Regime regime, double g0,
                                 const Grid1D& grid, const PropagationConfig& config, Drive drive,
                                 const ExpansionOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    const double tF = protocol.ramp.tF();
    if (regime != Regime::linear && protocol.dim != 1) {
        throw InvalidParameter("nonlinear regimes propagate in 1D; protocol dim must be 1 (got " +
                               std::to_string(protocol.dim) + ")");
    }
    if (regime == Regime::linear && g0 != 0.0) {
        throw InvalidParameter("linear regime requires g0 = 0");
    }
    if (regime != Regime::linear && !(g0 > 0.0)) {
        throw InvalidParameter("nonlinear regimes require g0 > 0");
    }
    if (!(config.dt > 0.0)) throw InvalidParameter("dt must be positive");

    PropagationConfig run = config;
    if (run.n_steps == 0) run.n_steps = static_cast<std::size_t>(std::llround(tF / run.dt));
    if (run.n_steps == 0 || std::abs(static_cast<double>(run.n_steps) * run.dt - tF) > run.dt) {
        throw InvalidParameter("n_steps * dt must equal tF within one dt");
    }
    if (run.output_stride == 0) run.output_stride = std::max<std::size_t>(1, run.n_steps / 100);

    // Couplings and traps of the chosen regime.
    const double gF = regime == Regime::gpe ? g0 * protocol.g_ratio.back() : g0;
    if (regime == Regime::gpe) {
        const SampledWaveform ratio(0.0, tF, protocol.g_ratio);
        run.g_waveform = [ratio, g0](double t) { return g0 * ratio(t); };
    } else if (regime == Regime::gpe_tf) {
        run.g_waveform = [g0](double) { return g0; };
    } else {
        run.g_waveform = nullptr;
    }
    std::vector<double> scratch;
    const SampledWaveform drive_w2(0.0, tF, drive_waveform(protocol, regime, drive, scratch));
    const TrapSpec trap = TrapSpec::harmonic(drive_w2);

    const double omega0 = protocol.ramp.omega0();
    const double final_w2 = regime == Regime::gpe_tf ? protocol.Omega2_TF.back()
                                                     : protocol.ramp.omegaF() * protocol.ramp.omegaF();

    const auto initial = qstate::imaginary_time_ground_state(grid, TrapSpec::static_harmonic(omega0), g0,
                                                             options.dt_im, options.ground_tolerance);
    const auto target = qstate::imaginary_time_ground_state(
        grid, TrapSpec::static_harmonic(std::sqrt(final_w2)), gF, options.dt_im, options.ground_tolerance);

    const int exponent = tau_exponent(regime, protocol.dim);
    ProbeSet probes;
    probes.target = target.state;
    const WaveFunction& psi0 = initial.state;
    const double mu = initial.mu;
    probes.oracle = [&psi0, &protocol, mu, exponent](double t) {
        return oracle_state(psi0, protocol, std::min(t, protocol.ramp.tF()), mu, exponent);
    };

    const PropagationResult evolved = propagate(psi0, trap, run, probes);
    const ObservableSeries& s = evolved.series;

    ExpansionReport report;
    report.regime = regime;
    report.drive = drive;
    report.g0 = g0;
    report.grid_points = grid.n_points();
    report.box_length = grid.box_length();
    report.dt = run.dt;
    report.n_steps = evolved.steps;
    report.output_stride = run.output_stride;
    report.mu = mu;
    report.initial_residual = initial.residual;
    report.target_residual = target.residual;
    report.fid_target = s.fidelity_vs_target.back();
    report.fid_oracle = s.fidelity_vs_oracle.back();
    report.final_oracle_l2 = s.oracle_l2.back();
    report.max_oracle_l2 = *std::max_element(s.oracle_l2.begin(), s.oracle_l2.end());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double t = std::min(s.times[i], tF);
        const double gamma = protocol::scaling_factor(protocol.ramp, t);
        report.max_gamma_rel_error =
            std::max(report.max_gamma_rel_error, std::abs(s.gamma_measured[i] - gamma) / gamma);
        report.max_norm_drift = std::max(report.max_norm_drift, std::abs(s.norms[i] - s.norms.front()));
    }

    if (regime == Regime::gpe_tf) {
        // gamma-scaled Thomas-Fermi profile of the initial trap: rho0(q/gamma)/gamma.
        const auto tf0 = qstate::thomas_fermi_profile(grid, omega0, g0);
        const double gamma = protocol.scaling.gamma.back();
        double diff = 0.0;
        double ref = 0.0;
        for (std::size_t j = 0; j < grid.n_points(); ++j) {
            const double x = grid.position(j) / gamma;
            const double rho_tf = std::max(0.0, tf0.mu - 0.5 * omega0 * omega0 * x * x) / (g0 * gamma);
            const double rho = std::norm(evolved.state[j]);
            diff += (rho - rho_tf) * (rho - rho_tf);
            ref += rho_tf * rho_tf;
        }
        report.tf_density_error = std::sqrt(diff / ref);
    }

    report.snapshots = {psi0, evolved.state, target.state};
    report.series = s;
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace cdscale::propagator
