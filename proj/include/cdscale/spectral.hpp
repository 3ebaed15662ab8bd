#pragma once

#include "cdscale/grid.hpp"

#include <span>

namespace cdscale {

// In-place complex FFT pair for one transform size. Each propagation run owns
// its own workspace; instances are movable but not shareable across threads.
class FftWorkspace {
public:
    explicit FftWorkspace(std::size_t n);
    ~FftWorkspace();

    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;
    FftWorkspace(FftWorkspace&& other) noexcept;
    FftWorkspace& operator=(FftWorkspace&& other) noexcept;

    std::size_t size() const { return n_; }

    // Unnormalized forward transform.
    void forward(std::span<Complex> data) const;
    // Inverse transform including the 1/n factor.
    void backward(std::span<Complex> data) const;

private:
    void release() noexcept;

    std::size_t n_ = 0;
    void* forward_plan_ = nullptr;
    void* backward_plan_ = nullptr;
};

// <T> = sum_k (k^2/2)|psi_k|^2, spectrally exact on the periodic grid.
double kinetic_energy(const WaveFunction& psi, const FftWorkspace& fft);

// out = -(1/2) psi'' computed in wavenumber space.
void apply_kinetic(const WaveFunction& psi, const FftWorkspace& fft, std::span<Complex> out);

}  // namespace cdscale
