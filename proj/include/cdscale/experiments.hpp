#pragma once

// Canned studies built from protocol synthesis and propagation: Fig.-1-style
// CD frequency curves, CD versus bare fidelity sweeps, Thomas-Fermi
// decompression, and power-law / piston expansions.

#include "cdscale/propagator.hpp"
#include "cdscale/protocol.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <vector>

namespace cdscale::experiments {

// Reconstructed regimes: adiabatic onset, moderate speed-up, ultrafast.
inline const std::vector<double> kDefaultFigureDurations = {25.0, 5.0, 1.0};

struct Figure1Curve {
    double tF = 0.0;
    protocol::DrivingProtocol protocol;
    double max_deviation = 0.0;  // max |Omega^2 - omega^2| / omega0^2
    double min_Omega2 = 0.0;     // in omega0^2
    bool inverts_trap = false;   // min Omega^2 < 0
};

std::vector<Figure1Curve> figure1_curves(double omega0, double gammaF, const std::vector<double>& tF_list,
                                         std::size_t n_samples);

// Columns t, omega_rel (omega/omega0), omega2_rel, Omega2_rel (both / omega0^2).
void write_figure1_csv(const Figure1Curve& curve, std::ostream& out);

/// Resolved inputs of a single expansion run.
struct SimulationSetup {
    double omega0 = 1.0;
    double gammaF = 2.0;
    std::optional<double> omegaF;  // overrides gammaF when set
    double tF = 5.0;
    std::size_t samples = 2001;
    int dim = 1;
    double alpha = 2.0;
    double g0 = 0.0;
    propagator::Regime regime = propagator::Regime::linear;
    propagator::Drive drive = propagator::Drive::cd;
    std::size_t grid_points = 2048;
    double box_length = 0.0;  // 0: max(40, 16 gammaF) oscillator lengths
    double dt = 1e-3;
    std::size_t output_stride = 0;
    propagator::ExpansionOptions ground{};

    double final_omega() const;
    double expansion() const;  // gamma(tF)
    double resolved_box_length() const;
    protocol::DrivingProtocol protocol() const;
    Grid1D grid() const;
    nlohmann::json to_json() const;
};

propagator::ExpansionReport simulate(const SimulationSetup& setup);
propagator::ExpansionReport simulate(const SimulationSetup& setup, const protocol::DrivingProtocol& protocol);

struct SweepRow {
    double tF = 0.0;
    double fid_cd = 0.0;
    double fid_bare = 0.0;
    double max_oracle_dev = 0.0;  // CD run
};

// One CD and one bare run per duration. Runs are dispatched to at most `jobs`
// worker threads; rows come back sorted by tF.
std::vector<SweepRow> fidelity_sweep(const SimulationSetup& base, const std::vector<double>& tF_list,
                                     std::size_t jobs = 1);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

// --- power-law / piston -----------------------------------------------------

enum class AuxiliaryForm { scaled, exact };

// Piston defaults: a deep wall, and a step small enough that the O(dt^2)
// splitting error at the wall does not radiate to the box edge.
inline constexpr double kPistonAmplitude = 50.0;
inline constexpr double kPistonStep = 2.5e-4;

struct PistonSetup {
    protocol::PowerExponent b = 4.0;
    double expansion = 2.0;  // xi(tF) / xi(0)
    double tF = 5.0;
    double amplitude = 0.5;
    double xi0 = 1.0;
    std::size_t grid_points = 1024;
    double box_length = 20.0;
    double dt = 1e-3;
    std::size_t output_stride = 0;
    AuxiliaryForm aux = AuxiliaryForm::scaled;
    double dt_im = 1e-2;
    double ground_tolerance = 1e-6;

    protocol::PowerLawTrap trap() const;
    nlohmann::json to_json() const;
};

struct PistonReport {
    double fidelity = 0.0;  // final state vs imaginary-time ground state of U(q, tF)
    double gamma_final = 1.0;
    double aux_start = 0.0;
    double aux_end = 0.0;
    double max_oracle_l2 = 0.0;  // vs the dilated state with Berry phase
    double mu = 0.0;
    std::size_t n_steps = 0;
    double runtime_seconds = 0.0;
    propagator::ObservableSeries series;
    std::vector<WaveFunction> snapshots;  // initial, final, target
};

PistonReport piston_demo(const PistonSetup& setup);

nlohmann::json piston_report_json(const PistonReport& report);

}  // namespace cdscale::experiments
