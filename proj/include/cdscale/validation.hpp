#pragma once

// Invariant suite behind `cdscale validate`.

#include "cdscale/protocol.hpp"

#include <functional>
#include <string>
#include <vector>

namespace cdscale::validation {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct ConvergenceStudy {
    double error_coarse = 0.0;  // ||psi_dt - psi_dt/2||
    double error_fine = 0.0;    // ||psi_dt/2 - psi_dt/4||
    double ratio = 0.0;
};

// Propagates the omega0 ground state through the linear CD drive of `ramp`
// at dt, dt/2 and dt/4 (grid n points, box L) and returns the Richardson
// error ratio, which tends to 4 for a second-order scheme.
ConvergenceStudy self_convergence(const protocol::FrequencyRamp& ramp, double dt, std::size_t n, double L);

// Largest |analytic - central difference| / h^2 over the interior of the ramp
// for omega, omega', gamma and gamma' at step h.
double derivative_defect(const protocol::FrequencyRamp& ramp, double h);

// quick: subset finishing well inside a minute on one core.
std::vector<CheckResult> run_validation(bool quick,
                                        const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace cdscale::validation
