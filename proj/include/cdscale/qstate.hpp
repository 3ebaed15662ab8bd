#pragma once

// Reference states, observables and the analytic scaling-law oracle on a 1D
// grid. Units hbar = m = 1.

#include "cdscale/grid.hpp"
#include "cdscale/spectral.hpp"
#include "cdscale/trap.hpp"

#include <cstddef>
#include <vector>

namespace cdscale::qstate {

struct GroundStateResult {
    WaveFunction state;
    double energy = 0.0;
    // mu = <H_lin> + g int |psi|^4; coincides with energy when g = 0.
    double mu = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
    // Energy after each logging block, in iteration order.
    std::vector<double> energy_log;
};

// Normalized Hermite-Gaussian mode n of frequency omega (three-term
// recurrence). ResolutionError when dx exceeds 1/8 of the oscillator length
// or the box does not contain the mode.
WaveFunction harmonic_eigenstate(const Grid1D& grid, int n, double omega);

/// Thomas-Fermi profile rho = max(0, mu - omega^2 q^2 / 2) / g, with mu fixed
/// so that sum rho dx = norm on this grid. The returned energy is the TF
/// functional (potential plus interaction, kinetic term dropped).
GroundStateResult thomas_fermi_profile(const Grid1D& grid, double omega, double g, double norm = 1.0);

// mu = (3 g N omega / (4 sqrt 2))^(2/3), the continuum 1D normalization.
double thomas_fermi_mu(double omega, double g_norm);

struct GroundStateOptions {
    double time = 0.0;  // trap is frozen at this instant
    std::size_t max_iterations = 400000;
    std::size_t log_interval = 50;
    double min_step = 1e-5;
};

/// Split-step imaginary-time relaxation with renormalization after every step.
///
/// The split-step fixed point is biased by O(dt^2), so the step is reduced by
/// 4x each time the energy stalls until the spectral residual
/// ||H psi - mu psi|| / ||psi|| drops below tol. ConvergenceError (carrying
/// the last residual) if that does not happen within max_iterations or above
/// min_step.
GroundStateResult imaginary_time_ground_state(const Grid1D& grid, const TrapSpec& trap, double g,
                                              double dt_im, double tol,
                                              const GroundStateOptions& options = {});

// |<a|b>|
double fidelity(const WaveFunction& a, const WaveFunction& b);

struct Observables {
    double norm = 0.0;
    double x2 = 0.0;  // <q^2> / norm
    double energy = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double interaction = 0.0;  // (g/2) int |psi|^4
};

// Trap evaluated at psi.time().
Observables observables(const WaveFunction& psi, const TrapSpec& trap, double g);
Observables observables(const WaveFunction& psi, const TrapSpec& trap, double g,
                        const FftWorkspace& fft);

// ||H psi - mu psi|| / ||psi|| with mu = <psi|H|psi> / <psi|psi>.
double stationary_residual(const WaveFunction& psi, const TrapSpec& trap, double g,
                           const FftWorkspace& fft, double* mu_out = nullptr);

// gamma^(-1/2) exp(-i mu tau) psi0(q / gamma), resampled by cubic
// interpolation (zero outside the original support). SupportError if psi0 has
// weight beyond L/(2 gamma), i.e. the dilated state would leave the box.
WaveFunction scale_state(const WaveFunction& psi0, double gamma, double mu, double tau);

// Pointwise exp(i c q^2).
WaveFunction apply_quadratic_phase(const WaveFunction& psi, double c);

// Pointwise exp(-i omega_dot q^2 / (4 omega)).
WaveFunction apply_berry_phase(const WaveFunction& psi, double omega, double omega_dot);

}  // namespace cdscale::qstate
