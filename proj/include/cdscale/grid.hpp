#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace cdscale {

using Complex = std::complex<double>;

/// Uniform periodic grid on [-L/2, L/2) with n points (a power of two, >= 16).
/// Wavenumbers follow the FFT ordering 0, 1, ..., n/2-1, -n/2, ..., -1 (times 2 pi / L).
class Grid1D {
public:
    Grid1D(std::size_t n_points, double box_length);

    std::size_t n_points() const { return n_; }
    double box_length() const { return length_; }
    double spacing() const { return length_ / static_cast<double>(n_); }

    double position(std::size_t j) const { return -0.5 * length_ + static_cast<double>(j) * spacing(); }
    double wavenumber(std::size_t j) const {
        const auto n = static_cast<std::ptrdiff_t>(n_);
        auto m = static_cast<std::ptrdiff_t>(j);
        if (m >= n / 2) m -= n;
        return 2.0 * std::numbers::pi / length_ * static_cast<double>(m);
    }

    std::vector<double> positions() const;
    std::vector<double> wavenumbers() const;

    bool operator==(const Grid1D&) const = default;

private:
    std::size_t n_;
    double length_;
};

/// Complex amplitudes on a Grid1D plus the time they refer to.
class WaveFunction {
public:
    explicit WaveFunction(Grid1D grid, double time = 0.0);
    WaveFunction(Grid1D grid, std::vector<Complex> amplitudes, double time = 0.0);

    const Grid1D& grid() const { return grid_; }
    std::size_t size() const { return amplitudes_.size(); }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    std::span<const Complex> amplitudes() const { return amplitudes_; }
    std::span<Complex> amplitudes() { return amplitudes_; }
    Complex operator[](std::size_t j) const { return amplitudes_[j]; }
    Complex& operator[](std::size_t j) { return amplitudes_[j]; }

    // sum |psi_j|^2 dx
    double norm() const;
    // Rescales to unit norm; throws DomainError for the zero state.
    void normalize();

    double max_abs() const;
    // Largest |psi| among the outermost `fraction` of the points (split evenly
    // between both edges).
    double edge_max_abs(double fraction) const;

private:
    Grid1D grid_;
    std::vector<Complex> amplitudes_;
    double time_;
};

// <a|b> = sum conj(a_j) b_j dx; IncompatibleGrid if the grids differ.
Complex inner_product(const WaveFunction& a, const WaveFunction& b);

// sqrt(sum |a_j - b_j|^2 dx)
double l2_distance(const WaveFunction& a, const WaveFunction& b);

}  // namespace cdscale
