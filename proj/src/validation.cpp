#include "cdscale/validation.hpp"

#include "cdscale/error.hpp"
#include "cdscale/experiments.hpp"
#include "cdscale/propagator.hpp"
#include "cdscale/qstate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

namespace cdscale::validation {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buffer[256];
    std::snprintf(buffer, sizeof buffer, pattern, a, b, c);
    return buffer;
}

struct Outcome {
    bool passed;
    std::string detail;
};

Outcome check_identities() {
    double worst = 0.0;
    for (double tF : {1.0, 5.0, 25.0}) {
        const auto ramp = protocol::ramp_for_expansion(1.0, 2.0, tF);
        const auto p2 = protocol::synthesize(ramp, 2, 2.0, 401);
        for (std::size_t i = 0; i < p2.n_samples(); ++i) {
            const double t = p2.t[i];
            const double scale = std::max(1.0, std::abs(p2.Omega2[i]));
            worst = std::max(worst, std::abs(p2.Omega2_TF[i] - p2.Omega2[i]) / scale);
            worst = std::max(worst, std::abs(protocol::cd_frequency_via_gamma(p2, t) - p2.Omega2[i]) / scale);
            worst = std::max(worst, std::abs(p2.interaction.epsilon[i] - 1.0));
        }
        worst = std::max(worst, std::abs(protocol::cd_frequency(ramp, 0.0) - 1.0));
        worst = std::max(worst, std::abs(protocol::cd_frequency(ramp, tF) - 0.0625));
    }
    return {worst <= 1e-10, fmt("max identity defect %.3g", worst)};
}

Outcome check_derivatives() {
    // Error / h^2 must be the same constant C at both steps.
    double worst_spread = 0.0;
    double worst_c = 0.0;
    for (double tF : {1.0, 5.0, 25.0}) {
        const auto ramp = protocol::ramp_for_expansion(1.0, 2.0, tF);
        const double c1 = derivative_defect(ramp, 1e-3 * tF);
        const double c2 = derivative_defect(ramp, 1e-4 * tF);
        worst_spread = std::max(worst_spread, std::abs(c2 - c1) / c1);
        worst_c = std::max(worst_c, std::max(c1, c2));
    }
    return {std::isfinite(worst_c) && worst_spread <= 0.05,
            fmt("C spread between h = 1e-3 tF and 1e-4 tF: %.2g (max C %.3g)", worst_spread, worst_c)};
}

Outcome check_figure1() {
    const auto curves = experiments::figure1_curves(1.0, 2.0, experiments::kDefaultFigureDurations, 2001);
    const bool slow = curves.front().max_deviation < 0.05;
    const bool fast = curves.back().inverts_trap;
    return {slow && fast, fmt("tF=25 max|Omega2-omega2| %.4f, tF=1 min Omega2 %.3f", curves.front().max_deviation,
                              curves.back().min_Omega2)};
}

Outcome check_overlap() {
    const Grid1D grid(2048, 40.0);
    const double f = qstate::fidelity(qstate::harmonic_eigenstate(grid, 0, 1.0),
                                      qstate::harmonic_eigenstate(grid, 0, 0.25));
    return {std::abs(f - std::sqrt(0.8)) <= 1e-6, fmt("fidelity %.9f vs sqrt(0.8)", f)};
}

Outcome check_eigen_scaling() {
    const Grid1D grid(2048, 40.0);
    double worst = 0.0;
    for (int n = 0; n <= 5; ++n) {
        const auto scaled = qstate::scale_state(qstate::harmonic_eigenstate(grid, n, 1.0), 2.0, 0.0, 0.0);
        worst = std::max(worst, 1.0 - qstate::fidelity(scaled, qstate::harmonic_eigenstate(grid, n, 0.25)));
    }
    return {worst <= 1e-6, fmt("max infidelity %.3g over n <= 5", worst)};
}

Outcome check_piston_limit() {
    double worst = 0.0;
    const protocol::QuinticStep width(1.0, 2.0, 5.0);
    const protocol::PowerLawTrap big(1e6, 0.5, width);
    const protocol::PowerLawTrap box(protocol::Piston{}, 0.5, width);
    for (int i = 1; i < 100; ++i) {
        const double t = 5.0 * i / 100.0;
        const double ref = protocol::powerlaw_auxiliary_coefficient(box, t);
        if (ref == 0.0) continue;
        worst = std::max(worst, std::abs(protocol::powerlaw_auxiliary_coefficient(big, t) - ref) / std::abs(ref));
    }
    return {worst <= 2e-6, fmt("max relative gap b=1e6 vs piston %.3g", worst)};
}

Outcome check_stationary() {
    const Grid1D grid(1024, 20.0);
    const TrapSpec trap = TrapSpec::static_harmonic(1.0);
    const auto psi0 = qstate::harmonic_eigenstate(grid, 0, 1.0);
    propagator::PropagationConfig config;
    config.dt = 1e-3;
    config.n_steps = static_cast<std::size_t>(std::llround(20.0 * M_PI / config.dt));
    config.output_stride = config.n_steps / 50;
    const auto r = propagator::propagate(psi0, trap, config);
    const double fid = qstate::fidelity(r.state, psi0);
    const double e0 = r.series.energies.front();
    double drift = 0.0;
    for (double e : r.series.energies) drift = std::max(drift, std::abs(e - e0) / std::abs(e0));
    return {fid >= 1.0 - 1e-8 && drift <= 1e-8, fmt("10 periods: infidelity %.3g, energy drift %.3g", 1.0 - fid, drift)};
}

Outcome check_linear_cd(double tF) {
    experiments::SimulationSetup setup;
    setup.tF = tF;
    setup.box_length = 40.0;
    const auto r = experiments::simulate(setup);
    const bool ok = r.fid_target >= 0.999 && r.max_oracle_l2 <= 1e-3 && r.max_gamma_rel_error <= 1e-3 &&
                    r.max_norm_drift <= 1e-8 && r.series.size() >= 50;
    char buffer[256];
    std::snprintf(buffer, sizeof buffer, "fid %.6f, oracle L2 %.2e, gamma err %.2e, norm drift %.2e, %zu probes",
                  r.fid_target, r.max_oracle_l2, r.max_gamma_rel_error, r.max_norm_drift, r.series.size());
    return {ok, buffer};
}

Outcome check_bare(double tF) {
    experiments::SimulationSetup setup;
    setup.tF = tF;
    setup.box_length = 40.0;
    setup.drive = propagator::Drive::bare;
    const auto r = experiments::simulate(setup);
    return {r.fid_target < 0.95 && r.final_oracle_l2 > 0.1,
            fmt("bare fid %.4f, oracle L2 %.3f", r.fid_target, r.final_oracle_l2)};
}

Outcome check_convergence() {
    const auto study = self_convergence(protocol::ramp_for_expansion(1.0, 2.0, 1.0), 4e-3, 1024, 40.0);
    return {std::abs(study.ratio - 4.0) <= 0.8, fmt("error ratio %.3f (%.2e / %.2e)", study.ratio,
                                                    study.error_coarse, study.error_fine)};
}

Outcome check_tf() {
    experiments::SimulationSetup setup;
    setup.regime = propagator::Regime::gpe_tf;
    setup.g0 = 50.0;
    setup.tF = 5.0;
    setup.box_length = 40.0;
    const auto r = experiments::simulate(setup);
    const double err = r.tf_density_error.value_or(1.0);
    return {err <= 0.02, fmt("TF density L2 error %.4f, norm drift %.2e", err, r.max_norm_drift)};
}

Outcome check_piston_demo() {
    const auto r = experiments::piston_demo(experiments::PistonSetup{});
    return {r.fidelity >= 0.995 && std::abs(r.aux_start) < 1e-12 && std::abs(r.aux_end) < 1e-12,
            fmt("b=4 fidelity %.6f, aux(0) %.1e, aux(tF) %.1e", r.fidelity, r.aux_start, r.aux_end)};
}

}  // namespace

double derivative_defect(const protocol::FrequencyRamp& ramp, double h) {
    const double tF = ramp.tF();
    double worst = 0.0;
    const int n = 200;
    for (int i = 0; i <= n; ++i) {
        const double t = h + (tF - 2.0 * h) * i / n;
        const auto w = protocol::ramp_derivatives(ramp, t);
        const auto wp = protocol::ramp_derivatives(ramp, t + h);
        const auto wm = protocol::ramp_derivatives(ramp, t - h);
        const auto g = protocol::scaling_derivatives(ramp, t);
        const auto gp = protocol::scaling_derivatives(ramp, t + h);
        const auto gm = protocol::scaling_derivatives(ramp, t - h);
        const double errors[] = {
            (wp.value - wm.value) / (2 * h) - w.first,
            (wp.value - 2 * w.value + wm.value) / (h * h) - w.second,
            (wp.first - wm.first) / (2 * h) - w.second,
            (gp.value - gm.value) / (2 * h) - g.first,
            (gp.first - gm.first) / (2 * h) - g.second,
        };
        for (double e : errors) worst = std::max(worst, std::abs(e) / (h * h));
    }
    return worst;
}

ConvergenceStudy self_convergence(const protocol::FrequencyRamp& ramp, double dt, std::size_t n, double L) {
    const Grid1D grid(n, L);
    const double tF = ramp.tF();
    const TrapSpec trap = TrapSpec::harmonic([ramp, tF](double t) {
        return protocol::cd_frequency(ramp, std::clamp(t, 0.0, tF));
    });
    const auto psi0 = qstate::harmonic_eigenstate(grid, 0, ramp.omega0());
    auto run = [&](double step) {
        propagator::PropagationConfig config;
        config.dt = step;
        config.n_steps = static_cast<std::size_t>(std::llround(tF / step));
        config.output_stride = config.n_steps;
        return propagator::propagate(psi0, trap, config).state;
    };
    const auto a = run(dt);
    const auto b = run(dt / 2);
    const auto c = run(dt / 4);
    ConvergenceStudy study;
    study.error_coarse = l2_distance(a, b);
    study.error_fine = l2_distance(b, c);
    study.ratio = study.error_coarse / study.error_fine;
    return study;
}

std::vector<CheckResult> run_validation(bool quick, const std::function<void(const CheckResult&)>& on_result) {
    struct Entry {
        const char* name;
        bool in_quick;
        std::function<Outcome()> run;
    };
    const std::vector<Entry> suite = {
        {"identities", true, check_identities},
        {"derivatives-vs-finite-differences", true, check_derivatives},
        {"figure1-regimes", true, check_figure1},
        {"ground-state-overlap", true, check_overlap},
        {"eigenstate-scaling", true, check_eigen_scaling},
        {"piston-limit", true, check_piston_limit},
        {"linear-cd-tF1", true, [] { return check_linear_cd(1.0); }},
        {"bare-contrast-tF1", true, [] { return check_bare(1.0); }},
        {"self-convergence", true, check_convergence},
        {"stationary-state", false, check_stationary},
        {"linear-cd-tF5", false, [] { return check_linear_cd(5.0); }},
        {"linear-cd-tF25", false, [] { return check_linear_cd(25.0); }},
        {"thomas-fermi-decompression", false, check_tf},
        {"power-law-b4", false, check_piston_demo},
    };
    std::vector<CheckResult> results;
    for (const auto& entry : suite) {
        if (quick && !entry.in_quick) continue;
        const auto started = std::chrono::steady_clock::now();
        CheckResult result{.name = entry.name};
        try {
            const Outcome outcome = entry.run();
            result.passed = outcome.passed;
            result.detail = outcome.detail;
        } catch (const std::exception& e) {
            result.passed = false;
            result.detail = std::string("error: ") + e.what();
        }
        result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        if (on_result) on_result(result);
        results.push_back(std::move(result));
    }
    return results;
}

}  // namespace cdscale::validation
