#pragma once

// Split-step spectral propagation of the 1D Schroedinger / Gross-Pitaevskii
// equation i psi_t = [-(1/2) d^2/dq^2 + U(q, t) + g(t)|psi|^2] psi.

#include "cdscale/grid.hpp"
#include "cdscale/protocol.hpp"
#include "cdscale/qstate.hpp"
#include "cdscale/trap.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cdscale::propagator {

enum class Scheme { strang_split_step };

struct PropagationConfig {
    double dt = 1e-3;
    std::size_t n_steps = 0;        // 0: derived from the protocol duration
    std::size_t output_stride = 0;  // 0: about 100 probes per run
    Schedule g_waveform;            // empty: g = 0
    Scheme scheme = Scheme::strang_split_step;
};

struct ObservableSeries {
    std::vector<double> times;
    std::vector<double> norms;
    std::vector<double> x2;
    std::vector<double> energies;
    std::vector<double> fidelity_vs_target;  // NaN without a target probe
    std::vector<double> fidelity_vs_oracle;  // NaN without an oracle probe
    std::vector<double> oracle_l2;           // NaN without an oracle probe
    std::vector<double> gamma_measured;      // sqrt(x2(t) / x2(0))

    std::size_t size() const { return times.size(); }
};

struct ProbeSet {
    std::optional<WaveFunction> target;
    std::function<WaveFunction(double)> oracle;
    double norm_tolerance = 1e-6;
    double edge_fraction = 0.02;
    double edge_threshold = 1e-6;  // relative to the peak amplitude
};

struct PropagationResult {
    WaveFunction state;
    ObservableSeries series;
    std::size_t steps = 0;
};

/// Strang splitting: half potential step, exact kinetic step in wavenumber
/// space, half potential step. U and g are evaluated at the step midpoint; the
/// nonlinear phase uses the density current at each half step.
///
/// Probes run at step 0, every output_stride steps and at the last step.
/// Throws InstabilityError when the norm drifts by more than norm_tolerance
/// and SupportError when the state reaches the box edge.
PropagationResult propagate(const WaveFunction& psi0, const TrapSpec& trap,
                            const PropagationConfig& config, const ProbeSet& probes = {});

enum class Regime { linear, gpe, gpe_tf };
enum class Drive { cd, bare };

std::string to_string(Regime regime);
std::string to_string(Drive drive);
Regime parse_regime(const std::string& text);
Drive parse_drive(const std::string& text);

struct ExpansionOptions {
    double dt_im = 1e-2;
    double ground_tolerance = 1e-6;
};

struct ExpansionReport {
    Regime regime = Regime::linear;
    Drive drive = Drive::cd;
    double g0 = 0.0;
    std::size_t grid_points = 0;
    double box_length = 0.0;
    double dt = 0.0;
    std::size_t n_steps = 0;
    std::size_t output_stride = 0;
    double mu = 0.0;
    double initial_residual = 0.0;
    double target_residual = 0.0;
    double fid_target = 0.0;
    double fid_oracle = 0.0;
    double max_oracle_l2 = 0.0;
    double final_oracle_l2 = 0.0;
    double max_gamma_rel_error = 0.0;
    double max_norm_drift = 0.0;
    std::optional<double> tf_density_error;
    double runtime_seconds = 0.0;
    std::vector<WaveFunction> snapshots;  // initial, final, target
    ObservableSeries series;
};

// exponent of gamma in the rescaled time used by the oracle of each regime
int tau_exponent(Regime regime, int dim);

/// Prepares the ground state of omega0 (imaginary time), drives it with the
/// regime's waveform (Omega^2 with g0 gamma^(D-2) for linear/gpe, Omega_TF^2
/// with constant g0 for gpe_tf; omega^2 for the bare drive) and scores the
/// run against the final ground state and the scaling oracle.
ExpansionReport run_cd_expansion(const protocol::DrivingProtocol& protocol, Regime regime, double g0,
                                 const Grid1D& grid, const PropagationConfig& config,
                                 Drive drive = Drive::cd, const ExpansionOptions& options = {});

struct Deviation {
    double l2 = 0.0;
    double fidelity = 0.0;
};

// Scaled ground state times the Berry phase: the exact CD trajectory.
WaveFunction oracle_state(const WaveFunction& psi0, const protocol::DrivingProtocol& protocol,
                          double t, double mu, int tau_exp = 2);

Deviation oracle_compare(const WaveFunction& psi_t, const WaveFunction& psi0,
                         const protocol::DrivingProtocol& protocol, double t, double mu,
                         int tau_exp = 2);

}  // namespace cdscale::propagator
