#pragma once

#include "cdscale/grid.hpp"
#include "cdscale/protocol.hpp"

#include <functional>
#include <optional>
#include <span>

namespace cdscale {

// Scalar function of time: a squared frequency, a coupling, an auxiliary
// coefficient. Usually a SampledWaveform or a closed-form lambda.
using Schedule = std::function<double(double)>;

enum class TrapKind { harmonic, power_law, none };

/// External potential U(q, t) seen by the propagator.
///
/// harmonic:  (1/2) w2(t) q^2, with w2 a bare, CD or Thomas-Fermi squared frequency.
/// power_law: A |q/xi(t)|^b + k(t) q^2, k the auxiliary coefficient waveform.
/// none:      free space.
class TrapSpec {
public:
    static TrapSpec harmonic(Schedule squared_frequency);
    static TrapSpec static_harmonic(double omega);
    static TrapSpec power_law(protocol::PowerLawTrap trap, Schedule auxiliary_coefficient);
    static TrapSpec none();

    TrapKind kind() const { return kind_; }
    bool is_confining() const { return kind_ != TrapKind::none; }

    double potential(double q, double t) const;
    void fill_potential(const Grid1D& grid, double t, std::span<double> out) const;

    // Coefficient c(t) of the quadratic part c q^2 / 2 (w2 for harmonic,
    // 2 k(t) for power-law, 0 for none). Used by the time-step guard.
    double quadratic_coefficient(double t) const;

    const std::optional<protocol::PowerLawTrap>& power_law_trap() const { return power_law_; }

    // Same potential frozen at time t.
    TrapSpec frozen_at(double t) const;

private:
    TrapSpec(TrapKind kind, Schedule quadratic, std::optional<protocol::PowerLawTrap> power_law)
        : kind_(kind), quadratic_(std::move(quadratic)), power_law_(std::move(power_law)) {}

    TrapKind kind_;
    Schedule quadratic_;
    std::optional<protocol::PowerLawTrap> power_law_;
};

}  // namespace cdscale
