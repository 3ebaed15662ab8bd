#include "cdscale/protocol.hpp"

#include "cdscale/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace cdscale::protocol {

namespace {

constexpr double kQuadratureTolerance = 1e-12;
constexpr unsigned kQuadratureDepth = 15;

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidParameter(std::string(name) + " must be positive and finite (got " +
                               std::to_string(value) + ")");
    }
}

void require_dimension(int dim) {
    if (dim < 1 || dim > 3) {
        throw InvalidParameter("dimension must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
    }
}

double checked_omega(const FrequencyRamp& ramp, double t) {
    const double omega = ramp.evaluate(t);
    if (!(omega > 0.0)) {
        throw DomainError("trap frequency must stay positive; omega(" + std::to_string(t) +
                          ") = " + std::to_string(omega));
    }
    return omega;
}

Derivatives gamma_from_omega(double omega0, const Derivatives& w) {
    // gamma = sqrt(omega0/omega); chain rule on r = omega'/omega.
    const double gamma = std::sqrt(omega0 / w.value);
    const double rate = w.first / w.value;
    const double curvature = w.second / w.value;
    return {gamma, -0.5 * gamma * rate, gamma * (0.75 * rate * rate - 0.5 * curvature)};
}

double cd_correction(const Derivatives& w) {
    const double rate = w.first / w.value;
    return -0.75 * rate * rate + 0.5 * w.second / w.value;
}

}  // namespace

// --- QuinticStep -------------------------------------------------------------

QuinticStep::QuinticStep(double start, double end, double duration)
    : start_(start), end_(end), duration_(duration) {
    require_positive(duration, "duration");
    if (!std::isfinite(start) || !std::isfinite(end)) {
        throw InvalidParameter("quintic end levels must be finite");
    }
}

Derivatives QuinticStep::evaluate(double t) const {
    const double slack = 1e-12 * duration_;
    if (!(t >= -slack && t <= duration_ + slack)) {
        throw DomainError("t = " + std::to_string(t) + " outside [0, " + std::to_string(duration_) +
                          "]");
    }
    return evaluate_clamped(t);
}

Derivatives QuinticStep::evaluate_clamped(double t) const {
    if (t <= 0.0) return {start_, 0.0, 0.0};
    if (t >= duration_) return {end_, 0.0, 0.0};
    const double s = t / duration_;
    const double s2 = s * s;
    const double d = delta();
    const double shape = s2 * s * (10.0 + s * (-15.0 + 6.0 * s));
    const double slope = 30.0 * s2 * (1.0 + s * (-2.0 + s));
    const double curve = 60.0 * s * (1.0 + s * (-3.0 + 2.0 * s));
    return {start_ + d * shape, d * slope / duration_, d * curve / (duration_ * duration_)};
}

// --- ramps and scaling -------------------------------------------------------

namespace {

QuinticStep validated_ramp(double omega0, double omegaF, double tF) {
    require_positive(omega0, "omega0");
    require_positive(omegaF, "omegaF");
    require_positive(tF, "tF");
    return QuinticStep(omega0, omegaF, tF);
}

}  // namespace

FrequencyRamp::FrequencyRamp(double omega0, double omegaF, double tF)
    : step_(validated_ramp(omega0, omegaF, tF)) {}

FrequencyRamp polynomial_ramp(double omega0, double omegaF, double tF) {
    return FrequencyRamp(omega0, omegaF, tF);
}

FrequencyRamp ramp_for_expansion(double omega0, double gammaF, double tF) {
    require_positive(gammaF, "gammaF");
    return FrequencyRamp(omega0, omega0 / (gammaF * gammaF), tF);
}

Derivatives ramp_derivatives(const FrequencyRamp& ramp, double t) { return ramp.derivatives(t); }

double scaling_factor(const FrequencyRamp& ramp, double t) {
    return std::sqrt(ramp.omega0() / checked_omega(ramp, t));
}

Derivatives scaling_derivatives(const FrequencyRamp& ramp, double t) {
    checked_omega(ramp, t);
    return gamma_from_omega(ramp.omega0(), ramp.derivatives(t));
}

double rescaled_time_between(const FrequencyRamp& ramp, double t0, double t1, int exponent) {
    if (t1 == t0) return 0.0;
    ramp.derivatives(t0);
    ramp.derivatives(t1);
    const double omega0 = ramp.omega0();
    // gamma^-exponent = (omega/omega0)^(exponent/2)
    const double power = 0.5 * exponent;
    // Integrated over u in [0, 1]: boost's stopping test compares the error on
    // the reference interval with the scaled estimate, which never passes on
    // short intervals.
    const double span = t1 - t0;
    auto integrand = [&](double u) { return std::pow(checked_omega(ramp, t0 + u * span) / omega0, power); };
    using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
    return span * Rule::integrate(integrand, 0.0, 1.0, kQuadratureDepth, kQuadratureTolerance);
}

double rescaled_time(const FrequencyRamp& ramp, double t, int exponent) {
    return rescaled_time_between(ramp, 0.0, t, exponent);
}

double coupling_modulation(const FrequencyRamp& ramp, double alpha, double t) {
    const double gamma = scaling_factor(ramp, t);
    if (alpha == 2.0) return 1.0;
    return std::pow(gamma, alpha - 2.0);
}

double cd_frequency(const FrequencyRamp& ramp, double t) {
    const double omega = checked_omega(ramp, t);
    return omega * omega + cd_correction(ramp.derivatives(t));
}

double cd_frequency_via_gamma(const Derivatives& gamma, double omega) {
    if (!(gamma.value > 0.0)) throw DomainError("scaling factor must be positive");
    return omega * omega - gamma.second / gamma.value;
}

double cd_frequency_tf(const FrequencyRamp& ramp, int dim, double t) {
    require_dimension(dim);
    const double omega = checked_omega(ramp, t);
    const double omega0 = ramp.omega0();
    return omega0 * omega * std::pow(omega / omega0, 0.5 * dim) + cd_correction(ramp.derivatives(t));
}

double gpe_coupling(double g0, int dim, double gamma) {
    if (!(gamma > 0.0)) throw DomainError("scaling factor must be positive");
    if (dim == 2) return g0;
    return g0 * std::pow(gamma, dim - 2);
}

// --- power-law traps ---------------------------------------------------------

PowerLawTrap::PowerLawTrap(PowerExponent b, double amplitude, QuinticStep width)
    : b_(b), amplitude_(amplitude), width_(width) {
    if (const auto* value = std::get_if<double>(&b_)) require_positive(*value, "power exponent b");
    require_positive(amplitude, "amplitude A");
    require_positive(width.start(), "initial width xi(0)");
    require_positive(width.end(), "final width xi(tF)");
}

double PowerLawTrap::scaling_exponent() const {
    if (is_piston()) return 1.0;
    const double b = std::get<double>(b_);
    return b / (b + 2.0);
}

double PowerLawTrap::potential(double q, double t) const {
    const double xi = width_.evaluate_clamped(t).value;
    if (is_piston()) {
        // Wall of relative thickness kPistonWall; the 1/gamma^2 factor keeps
        // U(q, t) = gamma^-2 U(q / gamma, 0), so the dilation stays exact.
        const double gamma = xi / width_.start();
        const double s = (std::abs(q) / xi - 1.0) / kPistonWall;
        return amplitude_ / (gamma * gamma) * 0.5 * (1.0 + std::tanh(s));
    }
    return amplitude_ * std::pow(std::abs(q / xi), std::get<double>(b_));
}

namespace {

Derivatives checked_width(const PowerLawTrap& trap, double t) {
    const Derivatives xi = trap.width().evaluate(t);
    if (!(xi.value > 0.0)) {
        throw DomainError("trap width must stay positive; xi(" + std::to_string(t) +
                          ") = " + std::to_string(xi.value));
    }
    return xi;
}

}  // namespace

double powerlaw_scaling_factor(const PowerLawTrap& trap, double t) {
    const Derivatives xi = checked_width(trap, t);
    return std::pow(xi.value / trap.width().start(), trap.scaling_exponent());
}

Derivatives powerlaw_scaling_derivatives(const PowerLawTrap& trap, double t) {
    const Derivatives xi = checked_width(trap, t);
    const double p = trap.scaling_exponent();
    const double gamma = std::pow(xi.value / trap.width().start(), p);
    const double rate = xi.first / xi.value;
    const double curvature = xi.second / xi.value;
    return {gamma, p * gamma * rate, gamma * (p * curvature + p * (p - 1.0) * rate * rate)};
}

double powerlaw_auxiliary_coefficient(const PowerLawTrap& trap, double t) {
    const Derivatives xi = checked_width(trap, t);
    return -0.5 * trap.scaling_exponent() * xi.second / xi.value;
}

double powerlaw_auxiliary_coefficient_exact(const PowerLawTrap& trap, double t) {
    const Derivatives gamma = powerlaw_scaling_derivatives(trap, t);
    return -0.5 * gamma.second / gamma.value;
}

// --- sampled protocols -------------------------------------------------------

double DrivingProtocol::sample_spacing() const {
    return ramp.tF() / static_cast<double>(t.size() - 1);
}

ProtocolPoint DrivingProtocol::at(double time) const {
    const Derivatives w = ramp.derivatives(time);
    ProtocolPoint p;
    p.t = time;
    p.omega = w.value;
    p.omega_dot = w.first;
    p.omega_ddot = w.second;
    const Derivatives g = scaling_derivatives(ramp, time);
    p.gamma = g.value;
    p.gamma_dot = g.first;
    p.gamma_ddot = g.second;

    const double spacing = sample_spacing();
    const auto last = t.size() - 1;
    const auto i = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(time / spacing))), last);
    p.tau = scaling.tau[i] + rescaled_time_between(ramp, t[i], time, 2);
    p.tau_tf = tau_tf[i] + rescaled_time_between(ramp, t[i], time, dim);

    p.Omega2 = cd_frequency(ramp, time);
    p.Omega2_TF = cd_frequency_tf(ramp, dim, time);
    p.epsilon = coupling_modulation(ramp, alpha, time);
    p.g_ratio = gpe_coupling(1.0, dim, p.gamma);
    return p;
}

DrivingProtocol synthesize(const FrequencyRamp& ramp, int dim, double alpha, std::size_t n_samples) {
    if (n_samples < 2) {
        throw InvalidParameter("n_samples must be at least 2 (got " + std::to_string(n_samples) + ")");
    }
    require_dimension(dim);
    if (!std::isfinite(alpha)) throw InvalidParameter("alpha must be finite");

    DrivingProtocol p{.ramp = ramp, .dim = dim, .alpha = alpha};
    p.interaction.alpha = alpha;
    auto reserve = [n_samples](std::vector<double>& v) { v.resize(n_samples); };
    for (auto* v : {&p.t, &p.omega, &p.omega_dot, &p.omega_ddot, &p.scaling.gamma,
                    &p.scaling.gamma_dot, &p.scaling.gamma_ddot, &p.scaling.tau, &p.Omega2,
                    &p.Omega2_TF, &p.interaction.epsilon, &p.g_ratio, &p.tau_tf}) {
        reserve(*v);
    }

    const double tF = ramp.tF();
    const double last = static_cast<double>(n_samples - 1);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = (i + 1 == n_samples) ? tF : tF * static_cast<double>(i) / last;
        p.t[i] = t;
        const Derivatives w = ramp.derivatives(t);
        checked_omega(ramp, t);
        p.omega[i] = w.value;
        p.omega_dot[i] = w.first;
        p.omega_ddot[i] = w.second;
        const Derivatives g = gamma_from_omega(ramp.omega0(), w);
        p.scaling.gamma[i] = g.value;
        p.scaling.gamma_dot[i] = g.first;
        p.scaling.gamma_ddot[i] = g.second;
        p.Omega2[i] = cd_frequency(ramp, t);
        p.Omega2_TF[i] = cd_frequency_tf(ramp, dim, t);
        p.interaction.epsilon[i] = coupling_modulation(ramp, alpha, t);
        p.g_ratio[i] = gpe_coupling(1.0, dim, g.value);
        if (i == 0) {
            p.scaling.tau[i] = 0.0;
            p.tau_tf[i] = 0.0;
        } else {
            p.scaling.tau[i] = p.scaling.tau[i - 1] + rescaled_time_between(ramp, p.t[i - 1], t, 2);
            p.tau_tf[i] = p.tau_tf[i - 1] + rescaled_time_between(ramp, p.t[i - 1], t, dim);
        }
    }
    return p;
}

std::size_t sample_index(const DrivingProtocol& protocol, double t) {
    const double spacing = protocol.sample_spacing();
    const double x = t / spacing;
    const double nearest = std::round(x);
    if (nearest < 0.0 || nearest > static_cast<double>(protocol.n_samples() - 1) ||
        std::abs(x - nearest) > 1e-9) {
        throw DomainError("t = " + std::to_string(t) + " is not on the protocol sample grid");
    }
    return static_cast<std::size_t>(nearest);
}

double cd_frequency_via_gamma(const DrivingProtocol& protocol, double t) {
    const std::size_t i = sample_index(protocol, t);
    const Derivatives gamma{protocol.scaling.gamma[i], protocol.scaling.gamma_dot[i],
                            protocol.scaling.gamma_ddot[i]};
    return cd_frequency_via_gamma(gamma, protocol.omega[i]);
}

}  // namespace cdscale::protocol
