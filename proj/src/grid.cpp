#include "cdscale/grid.hpp"

#include "cdscale/error.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace cdscale {

Grid1D::Grid1D(std::size_t n_points, double box_length) : n_(n_points), length_(box_length) {
    if (n_points < 16 || !std::has_single_bit(n_points)) {
        throw InvalidParameter("grid points must be a power of two >= 16 (got " +
                               std::to_string(n_points) + ")");
    }
    if (!(box_length > 0.0) || !std::isfinite(box_length)) {
        throw InvalidParameter("box length must be positive (got " + std::to_string(box_length) + ")");
    }
}

std::vector<double> Grid1D::positions() const {
    std::vector<double> q(n_);
    for (std::size_t j = 0; j < n_; ++j) q[j] = position(j);
    return q;
}

std::vector<double> Grid1D::wavenumbers() const {
    std::vector<double> k(n_);
    for (std::size_t j = 0; j < n_; ++j) k[j] = wavenumber(j);
    return k;
}

WaveFunction::WaveFunction(Grid1D grid, double time)
    : grid_(grid), amplitudes_(grid.n_points(), Complex{}), time_(time) {}

WaveFunction::WaveFunction(Grid1D grid, std::vector<Complex> amplitudes, double time)
    : grid_(grid), amplitudes_(std::move(amplitudes)), time_(time) {
    if (amplitudes_.size() != grid_.n_points()) {
        throw IncompatibleGrid("amplitude count " + std::to_string(amplitudes_.size()) +
                               " does not match grid size " + std::to_string(grid_.n_points()));
    }
}

double WaveFunction::norm() const {
    double sum = 0.0;
    for (const auto& a : amplitudes_) sum += std::norm(a);
    return sum * grid_.spacing();
}

void WaveFunction::normalize() {
    const double n = norm();
    if (!(n > 0.0)) throw DomainError("cannot normalize the zero state");
    const double scale = 1.0 / std::sqrt(n);
    for (auto& a : amplitudes_) a *= scale;
}

double WaveFunction::max_abs() const {
    double m = 0.0;
    for (const auto& a : amplitudes_) m = std::max(m, std::abs(a));
    return m;
}

double WaveFunction::edge_max_abs(double fraction) const {
    const std::size_t n = amplitudes_.size();
    const auto per_side = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(0.5 * fraction * static_cast<double>(n))));
    double m = 0.0;
    for (std::size_t j = 0; j < per_side; ++j) {
        m = std::max({m, std::abs(amplitudes_[j]), std::abs(amplitudes_[n - 1 - j])});
    }
    return m;
}

Complex inner_product(const WaveFunction& a, const WaveFunction& b) {
    if (!(a.grid() == b.grid())) throw IncompatibleGrid("inner product of states on different grids");
    Complex sum{};
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t j = 0; j < x.size(); ++j) sum += std::conj(x[j]) * y[j];
    return sum * a.grid().spacing();
}

double l2_distance(const WaveFunction& a, const WaveFunction& b) {
    if (!(a.grid() == b.grid())) throw IncompatibleGrid("distance between states on different grids");
    double sum = 0.0;
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t j = 0; j < x.size(); ++j) sum += std::norm(x[j] - y[j]);
    return std::sqrt(sum * a.grid().spacing());
}

}  // namespace cdscale
