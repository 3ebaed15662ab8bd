#pragma once

// File formats: protocol CSV + JSON envelope, observable series CSV,
// expansion reports, and wavefunction snapshots (CSV q,re,im + JSON sidecar).

#include "cdscale/grid.hpp"
#include "cdscale/propagator.hpp"
#include "cdscale/protocol.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace cdscale::io {

inline constexpr const char* kUnitConvention = "hbar=m=1";
inline constexpr const char* kProtocolHeader =
    "t,omega,omega_dot,omega_ddot,gamma,gamma_dot,gamma_ddot,tau,Omega2,Omega2_TF,epsilon,g_ratio";
inline constexpr const char* kObservablesHeader = "t,norm,x2,energy,fid_target,fid_oracle,gamma_measured";

// 17 significant digits; "nan" / "inf" for non-finite values.
std::string format_number(double value);

void write_protocol_csv(const protocol::DrivingProtocol& protocol, std::ostream& out);
nlohmann::json protocol_envelope(const protocol::DrivingProtocol& protocol);

struct ProtocolEnvelope {
    double omega0 = 1.0;
    double omegaF = 0.25;
    double tF = 1.0;
    int dim = 1;
    double alpha = 2.0;
    std::size_t n_samples = 2;

    protocol::DrivingProtocol synthesize() const;
};

// InvalidParameter on a missing field or a foreign unit convention.
ProtocolEnvelope parse_protocol_envelope(const nlohmann::json& envelope);

void write_observables_csv(const propagator::ObservableSeries& series, std::ostream& out);

nlohmann::json report_json(const propagator::ExpansionReport& report);

// Writes <stem>.csv and <stem>.json.
void write_snapshot(const WaveFunction& psi, const std::filesystem::path& stem);
WaveFunction read_snapshot(const std::filesystem::path& stem);

// --- filesystem helpers (IoError on failure) --------------------------------

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

// Creates dir; refuses a non-empty existing directory unless force is set.
void prepare_output_dir(const std::filesystem::path& dir, bool force);

}  // namespace cdscale::io
