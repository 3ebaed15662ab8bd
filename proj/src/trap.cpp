#include "cdscale/trap.hpp"

#include "cdscale/error.hpp"

namespace cdscale {

TrapSpec TrapSpec::harmonic(Schedule squared_frequency) {
    if (!squared_frequency) throw InvalidParameter("harmonic trap needs a squared-frequency waveform");
    return TrapSpec(TrapKind::harmonic, std::move(squared_frequency), std::nullopt);
}

TrapSpec TrapSpec::static_harmonic(double omega) {
    if (!(omega > 0.0)) throw InvalidParameter("trap frequency must be positive");
    const double w2 = omega * omega;
    return harmonic([w2](double) { return w2; });
}

TrapSpec TrapSpec::power_law(protocol::PowerLawTrap trap, Schedule auxiliary_coefficient) {
    if (!auxiliary_coefficient) auxiliary_coefficient = [](double) { return 0.0; };
    // The quadratic part is stored as c with U_aux = c q^2 / 2, c = 2k.
    Schedule quadratic = [aux = std::move(auxiliary_coefficient)](double t) { return 2.0 * aux(t); };
    return TrapSpec(TrapKind::power_law, std::move(quadratic), std::move(trap));
}

TrapSpec TrapSpec::none() {
    return TrapSpec(TrapKind::none, [](double) { return 0.0; }, std::nullopt);
}

double TrapSpec::potential(double q, double t) const {
    double v = 0.5 * quadratic_(t) * q * q;
    if (power_law_) v += power_law_->potential(q, t);
    return v;
}

void TrapSpec::fill_potential(const Grid1D& grid, double t, std::span<double> out) const {
    const double c = 0.5 * quadratic_(t);
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double q = grid.position(j);
        out[j] = c * q * q;
    }
    if (power_law_) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += power_law_->potential(grid.position(j), t);
    }
}

double TrapSpec::quadratic_coefficient(double t) const { return quadratic_(t); }

TrapSpec TrapSpec::frozen_at(double t) const {
    const double c = quadratic_(t);
    Schedule constant = [c](double) { return c; };
    if (!power_law_) return TrapSpec(kind_, std::move(constant), std::nullopt);
    const double xi = power_law_->width().evaluate_clamped(t).value;
    // The piston wall height carries gamma^-2 relative to the initial width.
    double amplitude = power_law_->amplitude();
    if (power_law_->is_piston()) {
        const double gamma = xi / power_law_->width().start();
        amplitude /= gamma * gamma;
    }
    protocol::PowerLawTrap frozen(power_law_->exponent(), amplitude, protocol::QuinticStep(xi, xi, 1.0));
    return TrapSpec(kind_, std::move(constant), std::move(frozen));
}

}  // namespace cdscale
