#pragma once

// Closed-form synthesis of counter-diabatic driving protocols for traps whose
// instantaneous eigenstates are related by a dilation. Everything here is a
// pure function of its arguments; units are hbar = m = 1.

#include <cstddef>
#include <variant>
#include <vector>

namespace cdscale::protocol {

// Value and first two time derivatives of a scalar trajectory.
struct Derivatives {
    double value = 0.0;
    double first = 0.0;
    double second = 0.0;
};

/// Minimum-jerk quintic between two levels over [0, duration].
///
/// x(s) = start + (end - start)(10 s^3 - 15 s^4 + 6 s^5), s = t / duration, so
/// the first and second derivatives vanish at both ends. Derivatives are the
/// differentiated polynomial, not finite differences.
class QuinticStep {
public:
    QuinticStep(double start, double end, double duration);

    double start() const { return start_; }
    double end() const { return end_; }
    double duration() const { return duration_; }
    double delta() const { return end_ - start_; }

    // Throws DomainError for t outside [0, duration] (roundoff-sized
    // excursions are clamped).
    Derivatives evaluate(double t) const;

    // Holds the end values outside [0, duration].
    Derivatives evaluate_clamped(double t) const;

private:
    double start_;
    double end_;
    double duration_;
};

// Trap-frequency ramp omega(t) from omega0 to omegaF in time tF.
class FrequencyRamp {
public:
    FrequencyRamp(double omega0, double omegaF, double tF);

    double omega0() const { return step_.start(); }
    double omegaF() const { return step_.end(); }
    double tF() const { return step_.duration(); }
    double delta() const { return step_.delta(); }

    double evaluate(double t) const { return step_.evaluate(t).value; }
    Derivatives derivatives(double t) const { return step_.evaluate(t); }

private:
    QuinticStep step_;
};

FrequencyRamp polynomial_ramp(double omega0, double omegaF, double tF);

// omegaF = omega0 / gammaF^2, the ramp that expands the state by gammaF.
FrequencyRamp ramp_for_expansion(double omega0, double gammaF, double tF);

Derivatives ramp_derivatives(const FrequencyRamp& ramp, double t);

double scaling_factor(const FrequencyRamp& ramp, double t);
Derivatives scaling_derivatives(const FrequencyRamp& ramp, double t);

// tau(t) = int_0^t gamma^-exponent dt'. exponent 2 is the standard rescaled
// time; exponent D is the Thomas-Fermi variant.
double rescaled_time(const FrequencyRamp& ramp, double t, int exponent);
double rescaled_time_between(const FrequencyRamp& ramp, double t0, double t1, int exponent);

// epsilon(t) = gamma(t)^(alpha - 2).
double coupling_modulation(const FrequencyRamp& ramp, double alpha, double t);

// Omega^2 = omega^2 - (3/4)(omega'/omega)^2 + (1/2) omega''/omega. Negative
// values are legal (transient trap inversion).
double cd_frequency(const FrequencyRamp& ramp, double t);

// Omega^2 = omega^2 - gamma''/gamma, the acceleration form.
double cd_frequency_via_gamma(const Derivatives& gamma, double omega);

// Omega_TF^2 = omega0 omega (omega/omega0)^(D/2) - (3/4)(omega'/omega)^2 + (1/2) omega''/omega.
double cd_frequency_tf(const FrequencyRamp& ramp, int dim, double t);

// g = g0 gamma^(D-2).
double gpe_coupling(double g0, int dim, double gamma);

// --- power-law traps U(q, t) = A |q / xi(t)|^b ------------------------------

// b -> infinity: a box of half-width xi. Propagated as a smooth wall of height
// A / gamma^2 and thickness kPistonWall * xi.
struct Piston {};
inline constexpr double kPistonWall = 0.1;

using PowerExponent = std::variant<double, Piston>;

class PowerLawTrap {
public:
    PowerLawTrap(PowerExponent b, double amplitude, QuinticStep width);

    const PowerExponent& exponent() const { return b_; }
    bool is_piston() const { return std::holds_alternative<Piston>(b_); }
    double amplitude() const { return amplitude_; }
    const QuinticStep& width() const { return width_; }

    // b / (b + 2), or 1 for the piston.
    double scaling_exponent() const;

    double potential(double q, double t) const;

private:
    PowerExponent b_;
    double amplitude_;
    QuinticStep width_;
};

double powerlaw_scaling_factor(const PowerLawTrap& trap, double t);
Derivatives powerlaw_scaling_derivatives(const PowerLawTrap& trap, double t);

// k(t) with auxiliary potential k q^2: k = -(1/2)(b/(b+2)) xi''/xi.
double powerlaw_auxiliary_coefficient(const PowerLawTrap& trap, double t);

// k(t) = -(1/2) gamma''/gamma, which also keeps the (xi'/xi)^2 term.
double powerlaw_auxiliary_coefficient_exact(const PowerLawTrap& trap, double t);

// --- sampled protocols -----------------------------------------------------

struct ScalingTrajectory {
    std::vector<double> gamma;
    std::vector<double> gamma_dot;
    std::vector<double> gamma_ddot;
    std::vector<double> tau;  // exponent 2
};

struct InteractionSchedule {
    double alpha = 2.0;
    std::vector<double> epsilon;
};

// Every protocol quantity at one instant, evaluated from the closed forms.
struct ProtocolPoint {
    double t = 0.0;
    double omega = 0.0;
    double omega_dot = 0.0;
    double omega_ddot = 0.0;
    double gamma = 1.0;
    double gamma_dot = 0.0;
    double gamma_ddot = 0.0;
    double tau = 0.0;
    double tau_tf = 0.0;  // exponent D
    double Omega2 = 0.0;
    double Omega2_TF = 0.0;
    double epsilon = 1.0;
    double g_ratio = 1.0;
};

// Uniformly sampled protocol on [0, tF]. Treated as immutable once built.
struct DrivingProtocol {
    FrequencyRamp ramp;
    int dim = 1;
    double alpha = 2.0;
    std::vector<double> t;
    std::vector<double> omega;
    std::vector<double> omega_dot;
    std::vector<double> omega_ddot;
    ScalingTrajectory scaling;
    std::vector<double> Omega2;
    std::vector<double> Omega2_TF;
    InteractionSchedule interaction;
    std::vector<double> g_ratio;
    std::vector<double> tau_tf;

    std::size_t n_samples() const { return t.size(); }
    double sample_spacing() const;

    // Closed-form values at any t in [0, tF]; tau is integrated from the
    // nearest preceding sample.
    ProtocolPoint at(double t) const;
};

DrivingProtocol synthesize(const FrequencyRamp& ramp, int dim, double alpha, std::size_t n_samples);

// Index of the sample equal to t (to 1e-9 of the spacing); DomainError if t
// is off the sample grid.
std::size_t sample_index(const DrivingProtocol& protocol, double t);

// Acceleration form evaluated from the sampled scaling trajectory.
double cd_frequency_via_gamma(const DrivingProtocol& protocol, double t);

}  // namespace cdscale::protocol
