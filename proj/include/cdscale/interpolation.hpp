#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace cdscale {

/// Four-point Lagrange interpolation on uniformly spaced samples.
///
/// `x` is measured in sample-index units. The stencil slides inward near the
/// ends so every evaluation uses four real samples; outside [0, n-1] the
/// caller decides what happens (see SampledWaveform).
template <typename T>
T cubic_uniform(std::span<const T> y, double x) {
    const std::size_t n = y.size();
    if (n == 1) return y[0];
    if (n < 4) {
        const double xc = std::clamp(x, 0.0, static_cast<double>(n - 1));
        const std::size_t i = std::min(static_cast<std::size_t>(xc), n - 2);
        const double u = xc - static_cast<double>(i);
        return y[i] * (1.0 - u) + y[i + 1] * u;
    }
    const auto last_start = static_cast<std::ptrdiff_t>(n) - 4;
    const auto i0 = std::clamp(static_cast<std::ptrdiff_t>(std::floor(x)) - 1,
                               std::ptrdiff_t{0}, last_start);
    const double u = x - static_cast<double>(i0);
    const double w0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    const double w1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    const double w2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    const double w3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    const auto i = static_cast<std::size_t>(i0);
    return y[i] * w0 + y[i + 1] * w1 + y[i + 2] * w2 + y[i + 3] * w3;
}

// Uniformly sampled scalar waveform. Held constant at the end values outside
// the sampled window, so a protocol keeps its final trap after tF.
class SampledWaveform {
public:
    SampledWaveform(double t0, double t1, std::vector<double> values)
        : t0_(t0), t1_(t1), values_(std::move(values)) {}

    double operator()(double t) const {
        if (values_.size() == 1 || t <= t0_) return values_.front();
        if (t >= t1_) return values_.back();
        const double x = (t - t0_) / (t1_ - t0_) * static_cast<double>(values_.size() - 1);
        return cubic_uniform<double>(values_, x);
    }

    double start() const { return t0_; }
    double end() const { return t1_; }
    std::span<const double> values() const { return values_; }

private:
    double t0_;
    double t1_;
    std::vector<double> values_;
};

}  // namespace cdscale
