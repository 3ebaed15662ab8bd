#include "cdscale/spectral.hpp"

#include <fftw3.h>

#include <mutex>
#include <utility>

namespace cdscale {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(std::span<Complex> data) {
    return reinterpret_cast<fftw_complex*>(data.data());
}

}  // namespace

FftWorkspace::FftWorkspace(std::size_t n) : n_(n) {
    std::vector<Complex> scratch(n);
    auto* buffer = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(planner_mutex());
    forward_plan_ = fftw_plan_dft_1d(static_cast<int>(n), buffer, buffer, FFTW_FORWARD, flags);
    backward_plan_ = fftw_plan_dft_1d(static_cast<int>(n), buffer, buffer, FFTW_BACKWARD, flags);
}

FftWorkspace::~FftWorkspace() { release(); }

FftWorkspace::FftWorkspace(FftWorkspace&& other) noexcept
    : n_(other.n_),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      backward_plan_(std::exchange(other.backward_plan_, nullptr)) {}

FftWorkspace& FftWorkspace::operator=(FftWorkspace&& other) noexcept {
    if (this != &other) {
        release();
        n_ = other.n_;
        forward_plan_ = std::exchange(other.forward_plan_, nullptr);
        backward_plan_ = std::exchange(other.backward_plan_, nullptr);
    }
    return *this;
}

void FftWorkspace::release() noexcept {
    if (!forward_plan_ && !backward_plan_) return;
    std::lock_guard lock(planner_mutex());
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
    forward_plan_ = backward_plan_ = nullptr;
}

void FftWorkspace::forward(std::span<Complex> data) const {
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data), as_fftw(data));
}

void FftWorkspace::backward(std::span<Complex> data) const {
    fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(data), as_fftw(data));
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& z : data) z *= scale;
}

double kinetic_energy(const WaveFunction& psi, const FftWorkspace& fft) {
    std::vector<Complex> work(psi.amplitudes().begin(), psi.amplitudes().end());
    fft.forward(work);
    const Grid1D& grid = psi.grid();
    double sum = 0.0;
    for (std::size_t j = 0; j < work.size(); ++j) {
        const double k = grid.wavenumber(j);
        sum += 0.5 * k * k * std::norm(work[j]);
    }
    return sum * grid.spacing() / static_cast<double>(work.size());
}

void apply_kinetic(const WaveFunction& psi, const FftWorkspace& fft, std::span<Complex> out) {
    std::copy(psi.amplitudes().begin(), psi.amplitudes().end(), out.begin());
    fft.forward(out);
    const Grid1D& grid = psi.grid();
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double k = grid.wavenumber(j);
        out[j] *= 0.5 * k * k;
    }
    fft.backward(out);
}

}  // namespace cdscale
