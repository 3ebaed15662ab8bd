#include "cdscale/qstate.hpp"

#include "cdscale/error.hpp"
#include "cdscale/interpolation.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace cdscale::qstate {

// --- reference states --------------------------------------------------------

WaveFunction harmonic_eigenstate(const Grid1D& grid, int n, double omega) {
    if (n < 0) throw InvalidParameter("mode index must be non-negative");
    if (!(omega > 0.0)) throw InvalidParameter("oscillator frequency must be positive");
    const double length = 1.0 / std::sqrt(omega);
    if (grid.spacing() > length / 8.0) {
        throw ResolutionError("grid spacing " + std::to_string(grid.spacing()) +
                              " exceeds 1/8 of the oscillator length " + std::to_string(length));
    }
    const double extent = (std::sqrt(2.0 * n + 1.0) + 6.0) * length;
    if (0.5 * grid.box_length() < extent) {
        throw ResolutionError("box half-width " + std::to_string(0.5 * grid.box_length()) +
                              " does not contain mode " + std::to_string(n) + " (needs " +
                              std::to_string(extent) + ")");
    }

    WaveFunction psi(grid);
    const double prefactor = std::pow(omega, 0.25) * std::pow(std::numbers::pi, -0.25);
    for (std::size_t j = 0; j < grid.n_points(); ++j) {
        const double xi = grid.position(j) / length;
        double previous = 0.0;
        double current = prefactor * std::exp(-0.5 * xi * xi);
        for (int m = 0; m < n; ++m) {
            const double next = std::sqrt(2.0 / (m + 1.0)) * xi * current -
                                std::sqrt(static_cast<double>(m) / (m + 1.0)) * previous;
            previous = current;
            current = next;
        }
        psi[j] = current;
    }
    psi.normalize();
    return psi;
}

double thomas_fermi_mu(double omega, double g_norm) {
    return std::pow(3.0 * g_norm * omega / (4.0 * std::numbers::sqrt2), 2.0 / 3.0);
}

GroundStateResult thomas_fermi_profile(const Grid1D& grid, double omega, double g, double norm) {
    if (!(g > 0.0) || !(norm > 0.0)) {
        throw InvalidParameter("Thomas-Fermi profile needs g > 0 and norm > 0");
    }
    if (!(omega > 0.0)) throw InvalidParameter("trap frequency must be positive");
    const auto q = grid.positions();
    const double dx = grid.spacing();
    const double w2 = omega * omega;

    auto mass = [&](double mu) {
        double sum = 0.0;
        for (double x : q) sum += std::max(0.0, mu - 0.5 * w2 * x * x);
        return sum * dx / g - norm;
    };
    double hi = 2.0 * thomas_fermi_mu(omega, g * norm) + 1.0;
    while (mass(hi) <= 0.0) hi *= 2.0;
    std::uintmax_t max_iter = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        mass, 0.0, hi, -norm, mass(hi), boost::math::tools::eps_tolerance<double>(52), max_iter);
    const double mu = 0.5 * (bracket.first + bracket.second);

    WaveFunction psi(grid);
    double potential = 0.0;
    double interaction = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
        const double v = 0.5 * w2 * q[j] * q[j];
        const double rho = std::max(0.0, mu - v) / g;
        psi[j] = std::sqrt(rho);
        potential += v * rho;
        interaction += 0.5 * g * rho * rho;
    }
    return GroundStateResult{
        .state = std::move(psi),
        .energy = (potential + interaction) * dx,
        .mu = mu,
        .residual = 0.0,
        .iterations = 0,
        .energy_log = {},
    };
}

// --- observables -------------------------------------------------------------

double fidelity(const WaveFunction& a, const WaveFunction& b) { return std::abs(inner_product(a, b)); }

Observables observables(const WaveFunction& psi, const TrapSpec& trap, double g,
                        const FftWorkspace& fft) {
    const Grid1D& grid = psi.grid();
    const double dx = grid.spacing();
    std::vector<double> v(grid.n_points());
    trap.fill_potential(grid, psi.time(), v);

    Observables o;
    double x2 = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double rho = std::norm(psi[j]);
        const double q = grid.position(j);
        o.norm += rho;
        x2 += q * q * rho;
        o.potential += v[j] * rho;
        o.interaction += 0.5 * g * rho * rho;
    }
    o.norm *= dx;
    o.x2 = x2 * dx / o.norm;
    o.potential *= dx;
    o.interaction *= dx;
    o.kinetic = kinetic_energy(psi, fft);
    o.energy = o.kinetic + o.potential + o.interaction;
    return o;
}

Observables observables(const WaveFunction& psi, const TrapSpec& trap, double g) {
    const FftWorkspace fft(psi.size());
    return observables(psi, trap, g, fft);
}

double stationary_residual(const WaveFunction& psi, const TrapSpec& trap, double g,
                           const FftWorkspace& fft, double* mu_out) {
    const Grid1D& grid = psi.grid();
    std::vector<double> v(grid.n_points());
    trap.fill_potential(grid, psi.time(), v);
    std::vector<Complex> h(grid.n_points());
    apply_kinetic(psi, fft, h);
    double norm = 0.0;
    Complex expectation{};
    for (std::size_t j = 0; j < h.size(); ++j) {
        h[j] += (v[j] + g * std::norm(psi[j])) * psi[j];
        norm += std::norm(psi[j]);
        expectation += std::conj(psi[j]) * h[j];
    }
    const double mu = expectation.real() / norm;
    double r = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) r += std::norm(h[j] - mu * psi[j]);
    if (mu_out) *mu_out = mu;
    return std::sqrt(r / norm);
}

// --- imaginary time ----------------------------------------------------------

namespace {

WaveFunction initial_guess(const Grid1D& grid, const TrapSpec& trap, double g, double t) {
    WaveFunction psi(grid, t);
    if (trap.kind() == TrapKind::power_law) {
        const double xi = trap.power_law_trap()->width().evaluate_clamped(t).value;
        for (std::size_t j = 0; j < grid.n_points(); ++j) {
            const double q = grid.position(j) / xi;
            psi[j] = std::exp(-2.0 * q * q);
        }
        return psi;
    }
    const double c = trap.quadratic_coefficient(t);
    if (!(c > 0.0)) {
        throw InvalidParameter("imaginary-time relaxation needs a confining trap (omega^2 = " +
                               std::to_string(c) + ")");
    }
    const double omega = std::sqrt(c);
    if (g > 0.0) {
        const double mu = thomas_fermi_mu(omega, g);
        for (std::size_t j = 0; j < grid.n_points(); ++j) {
            const double q = grid.position(j);
            const double tf = std::max(0.0, mu - 0.5 * c * q * q) / g;
            psi[j] = std::sqrt(tf) + 1e-3 * std::exp(-0.5 * omega * q * q);
        }
    } else {
        for (std::size_t j = 0; j < grid.n_points(); ++j) {
            const double q = grid.position(j);
            psi[j] = std::exp(-0.5 * omega * q * q);
        }
    }
    return psi;
}

using Vector = std::vector<Complex>;

Complex dot(const Vector& a, const Vector& b) {
    Complex s{};
    for (std::size_t j = 0; j < a.size(); ++j) s += std::conj(a[j]) * b[j];
    return s;
}

// Locally optimal preconditioned CG (block size 1) for the lowest eigenvector
// of the linear grid Hamiltonian T + V. Rayleigh-Ritz on span{x, P r, p}, with
// P = (k^2/2 + s)^-1, so the energy never increases.
struct Polished {
    double mu = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
};

Polished polish_linear(WaveFunction& psi, const std::vector<double>& v, const std::vector<double>& k,
                       const FftWorkspace& fft, double tol, std::size_t max_iterations,
                       std::vector<double>& energy_log, std::size_t log_interval) {
    const std::size_t n = v.size();
    auto apply_h = [&](const Vector& x) {
        Vector out = x;
        fft.forward(out);
        for (std::size_t j = 0; j < n; ++j) out[j] *= 0.5 * k[j] * k[j];
        fft.backward(out);
        for (std::size_t j = 0; j < n; ++j) out[j] += v[j] * x[j];
        return out;
    };
    auto scale_to_unit = [](Vector& a, Vector& ha) {
        const double nrm = std::sqrt(dot(a, a).real());
        for (std::size_t j = 0; j < a.size(); ++j) {
            a[j] /= nrm;
            ha[j] /= nrm;
        }
    };

    Vector x(psi.amplitudes().begin(), psi.amplitudes().end());
    Vector hx = apply_h(x);
    scale_to_unit(x, hx);
    Vector p;
    Vector hp;
    Polished out;
    for (out.iterations = 0;; ++out.iterations) {
        const double lambda = dot(x, hx).real();
        Vector r(n);
        double rr = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            r[j] = hx[j] - lambda * x[j];
            rr += std::norm(r[j]);
        }
        out.mu = lambda;
        out.residual = std::sqrt(rr);
        if (out.iterations % log_interval == 0) energy_log.push_back(lambda);
        if (out.residual <= tol || out.iterations >= max_iterations) break;

        // Preconditioned residual.
        fft.forward(r);
        const double shift = std::max(1.0, std::abs(lambda));
        for (std::size_t j = 0; j < n; ++j) r[j] /= 0.5 * k[j] * k[j] + shift;
        fft.backward(r);

        // Orthonormal basis of span{x, w, p} by modified Gram-Schmidt.
        std::vector<Vector> basis{x};
        std::vector<Vector> hbasis{hx};
        for (Vector* cand : {&r, &p}) {
            if (cand->empty()) continue;
            Vector c = *cand;
            Vector hc = cand == &r ? apply_h(c) : hp;
            const double before = std::sqrt(dot(c, c).real());
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t b = 0; b < basis.size(); ++b) {
                    const Complex proj = dot(basis[b], c);
                    for (std::size_t j = 0; j < n; ++j) {
                        c[j] -= proj * basis[b][j];
                        hc[j] -= proj * hbasis[b][j];
                    }
                }
            }
            if (std::sqrt(dot(c, c).real()) <= 1e-10 * before) continue;
            scale_to_unit(c, hc);
            basis.push_back(std::move(c));
            hbasis.push_back(std::move(hc));
        }

        const auto m = static_cast<Eigen::Index>(basis.size());
        Eigen::MatrixXcd a(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = i; j < m; ++j) {
                a(i, j) = dot(basis[i], hbasis[j]);
                a(j, i) = std::conj(a(i, j));
            }
        }
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(a);
        const Eigen::VectorXcd c = eig.eigenvectors().col(0);

        Vector nx(n, Complex{});
        Vector nhx(n, Complex{});
        Vector np(n, Complex{});
        Vector nhp(n, Complex{});
        for (Eigen::Index b = 0; b < m; ++b) {
            for (std::size_t j = 0; j < n; ++j) {
                nx[j] += c(b) * basis[b][j];
                nhx[j] += c(b) * hbasis[b][j];
                if (b > 0) {
                    np[j] += c(b) * basis[b][j];
                    nhp[j] += c(b) * hbasis[b][j];
                }
            }
        }
        x = std::move(nx);
        hx = std::move(nhx);
        scale_to_unit(x, hx);
        if (m > 1) {
            p = std::move(np);
            hp = std::move(nhp);
        }
    }
    auto amp = psi.amplitudes();
    std::copy(x.begin(), x.end(), amp.begin());
    psi.normalize();
    return out;
}

}  // namespace

GroundStateResult imaginary_time_ground_state(const Grid1D& grid, const TrapSpec& trap, double g,
                                              double dt_im, double tol,
                                              const GroundStateOptions& options) {
    if (!trap.is_confining()) throw InvalidParameter("imaginary-time relaxation needs a confining trap");
    if (!(dt_im > 0.0)) throw InvalidParameter("imaginary time step must be positive");
    if (!(tol > 0.0)) throw InvalidParameter("residual tolerance must be positive");
    if (g < 0.0) throw InvalidParameter("coupling must be non-negative");

    const TrapSpec frozen = trap.frozen_at(options.time);
    WaveFunction psi = initial_guess(grid, frozen, g, options.time);
    psi.normalize();

    const std::size_t n = grid.n_points();
    const FftWorkspace fft(n);
    std::vector<double> v(n);
    frozen.fill_potential(grid, options.time, v);
    const auto k = grid.wavenumbers();

    std::vector<double> kinetic_factor(n);
    std::vector<double> potential_factor(n);
    double dt = 0.0;
    std::size_t block = 0;
    auto set_step = [&](double step) {
        dt = step;
        for (std::size_t j = 0; j < n; ++j) {
            kinetic_factor[j] = std::exp(-0.5 * k[j] * k[j] * dt);
            potential_factor[j] = std::exp(-0.5 * v[j] * dt);
        }
        // Blocks span at least half a unit of imaginary time.
        block = std::max(options.log_interval, static_cast<std::size_t>(std::ceil(0.5 / dt)));
    };
    set_step(dt_im);

    // Both half-steps use the density at the start of the step.
    std::vector<double> step_factor(n);
    auto half_potential = [&](std::span<Complex> a) {
        for (std::size_t j = 0; j < n; ++j) a[j] *= step_factor[j];
    };

    GroundStateResult result{.state = psi};
    double last_residual = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    while (true) {
        for (std::size_t s = 0; s < block; ++s) {
            auto a = psi.amplitudes();
            if (g == 0.0) {
                std::copy(potential_factor.begin(), potential_factor.end(), step_factor.begin());
            } else {
                for (std::size_t j = 0; j < n; ++j) {
                    step_factor[j] = potential_factor[j] * std::exp(-0.5 * g * std::norm(a[j]) * dt);
                }
            }
            half_potential(a);
            fft.forward(a);
            for (std::size_t j = 0; j < n; ++j) a[j] *= kinetic_factor[j];
            fft.backward(a);
            half_potential(a);
            psi.normalize();
        }
        iterations += block;

        double mu = 0.0;
        const double residual = stationary_residual(psi, frozen, g, fft, &mu);
        const Observables o = observables(psi, frozen, g, fft);
        result.energy_log.push_back(o.energy);

        if (residual <= tol) {
            result.state = psi;
            result.energy = o.energy;
            result.mu = mu;
            result.residual = residual;
            result.iterations = iterations;
            return result;
        }
        if (iterations >= options.max_iterations) {
            throw ConvergenceError("imaginary-time relaxation did not converge in " +
                                   std::to_string(iterations) + " iterations; residual " +
                                   std::to_string(residual) + " > " + std::to_string(tol));
        }
        if (residual > 0.97 * last_residual) {
            if (dt / 4.0 < options.min_step && g == 0.0) {
                // Split-step floor (sharp walls): finish by Rayleigh-Ritz.
                const std::size_t budget = options.max_iterations - std::min(options.max_iterations, iterations);
                const Polished p = polish_linear(psi, v, k, fft, tol, budget, result.energy_log,
                                                 std::max<std::size_t>(1, options.log_interval / 10));
                iterations += p.iterations;
                const double final_residual = stationary_residual(psi, frozen, g, fft, &mu);
                if (!(final_residual <= tol)) {
                    throw ConvergenceError("ground-state residual stalled at " + std::to_string(final_residual) +
                                           " after split-step and Rayleigh-Ritz refinement (tolerance " +
                                           std::to_string(tol) + ")");
                }
                result.state = psi;
                result.energy = observables(psi, frozen, g, fft).energy;
                result.mu = mu;
                result.residual = final_residual;
                result.iterations = iterations;
                return result;
            }
            if (dt / 4.0 < options.min_step) {
                throw ConvergenceError("imaginary-time residual stalled at " + std::to_string(residual) +
                                       " with step " + std::to_string(dt) + " (tolerance " +
                                       std::to_string(tol) + ")");
            }
            set_step(dt / 4.0);
            last_residual = std::numeric_limits<double>::infinity();
        } else {
            last_residual = residual;
        }
    }
}

// --- scaling oracle ----------------------------------------------------------

WaveFunction scale_state(const WaveFunction& psi0, double gamma, double mu, double tau) {
    if (!(gamma > 0.0)) throw DomainError("scaling factor must be positive");
    const Grid1D& grid = psi0.grid();
    const std::size_t n = grid.n_points();
    const double dx = grid.spacing();
    const double q0 = grid.position(0);

    if (gamma > 1.0) {
        const double limit = 0.5 * grid.box_length() / gamma;
        const double floor = 1e-6 * psi0.max_abs();
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(grid.position(j)) > limit && std::abs(psi0[j]) > floor) {
                throw SupportError("state dilated by " + std::to_string(gamma) +
                                   " would leave the box (weight at q = " +
                                   std::to_string(grid.position(j)) + ")");
            }
        }
    }

    const Complex factor = std::polar(1.0 / std::sqrt(gamma), -mu * tau);
    const auto source = psi0.amplitudes();
    WaveFunction out(grid, psi0.time());
    const double last = static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        const double u = (grid.position(j) / gamma - q0) / dx;
        if (u < 0.0 || u > last) continue;
        out[j] = factor * cubic_uniform<Complex>(source, u);
    }
    return out;
}

WaveFunction apply_quadratic_phase(const WaveFunction& psi, double c) {
    WaveFunction out = psi;
    if (c == 0.0) return out;
    const Grid1D& grid = psi.grid();
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double q = grid.position(j);
        out[j] *= std::polar(1.0, c * q * q);
    }
    return out;
}

WaveFunction apply_berry_phase(const WaveFunction& psi, double omega, double omega_dot) {
    if (!(omega > 0.0)) throw DomainError("trap frequency must be positive");
    return apply_quadratic_phase(psi, -omega_dot / (4.0 * omega));
}

}  // namespace cdscale::qstate
