#include <catch_amalgamated.hpp>

#include "cdscale/error.hpp"
#include "cdscale/qstate.hpp"
#include "cdscale/spectral.hpp"
#include "cdscale/trap.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace cdscale;
using namespace cdscale::qstate;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Grid1D kGrid(2048, 40.0);

constexpr double kEnergyFloor = 1e-10;

WaveFunction random_superposition(std::mt19937& rng, const Grid1D& grid, double omega) {
    std::normal_distribution<double> c(0.0, 1.0);
    WaveFunction psi(grid);
    for (int n = 0; n <= 4; ++n) {
        const Complex coeff(c(rng), c(rng));
        const auto mode = harmonic_eigenstate(grid, n, omega);
        for (std::size_t j = 0; j < psi.size(); ++j) psi[j] += coeff * mode[j];
    }
    psi.normalize();
    return psi;
}

}  // namespace

TEST_CASE("grid layout", "[qstate][grid]") {
    const Grid1D grid(16, 8.0);
    CHECK(grid.spacing() == 0.5);
    CHECK(grid.position(0) == -4.0);
    CHECK(grid.position(8) == 0.0);
    CHECK_THAT(grid.wavenumber(1), WithinRel(2.0 * std::numbers::pi / 8.0, 1e-15));
    CHECK_THAT(grid.wavenumber(15), WithinRel(-2.0 * std::numbers::pi / 8.0, 1e-15));
    CHECK_THROWS_AS(Grid1D(1000, 40.0), InvalidParameter);
    CHECK_THROWS_AS(Grid1D(8, 40.0), InvalidParameter);
    CHECK_THROWS_AS(Grid1D(64, -1.0), InvalidParameter);
    CHECK_THROWS_AS(inner_product(WaveFunction(Grid1D(16, 8.0)), WaveFunction(Grid1D(32, 8.0))), IncompatibleGrid);
}

TEST_CASE("harmonic ground state moments", "[qstate][eigenstate]") {
    const auto psi = harmonic_eigenstate(kGrid, 0, 1.0);
    const auto o = observables(psi, TrapSpec::static_harmonic(1.0), 0.0);
    CHECK_THAT(o.norm, WithinAbs(1.0, 1e-12));
    CHECK_THAT(o.x2, WithinAbs(0.5, 1e-10));
    CHECK_THAT(o.energy, WithinAbs(0.5, 1e-10));
    CHECK_THAT(o.kinetic, WithinAbs(0.25, 1e-10));

    for (int n = 1; n <= 6; ++n) {
        const auto mode = harmonic_eigenstate(kGrid, n, 1.0);
        CHECK_THAT(observables(mode, TrapSpec::static_harmonic(1.0), 0.0).energy, WithinAbs(n + 0.5, 1e-9));
        CHECK_THAT(std::abs(inner_product(psi, mode)), WithinAbs(0.0, 1e-12));
    }
    CHECK_THROWS_AS(harmonic_eigenstate(Grid1D(16, 40.0), 0, 1.0), ResolutionError);
    CHECK_THROWS_AS(harmonic_eigenstate(kGrid, -1, 1.0), InvalidParameter);
}

TEST_CASE("eigenstates are related by dilation", "[qstate][scaling][property]") {
    CHECK_THAT(fidelity(scale_state(harmonic_eigenstate(kGrid, 0, 1.0), 2.0, 0.0, 0.0),
                        harmonic_eigenstate(kGrid, 0, 0.25)),
               WithinAbs(1.0, 1e-8));
    for (int n = 0; n <= 5; ++n) {
        const auto scaled = scale_state(harmonic_eigenstate(kGrid, n, 1.0), 2.0, 0.0, 0.0);
        CHECK(fidelity(scaled, harmonic_eigenstate(kGrid, n, 0.25)) >= 1.0 - 1e-6);
    }
}

TEST_CASE("fidelity", "[qstate][fidelity]") {
    const auto a = harmonic_eigenstate(kGrid, 0, 1.0);
    const auto b = harmonic_eigenstate(kGrid, 0, 0.25);
    CHECK_THAT(fidelity(a, a), WithinAbs(1.0, 1e-12));
    CHECK_THAT(fidelity(a, b), WithinAbs(std::sqrt(0.8), 1e-6));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> theta(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < 10; ++i) {
        const auto x = random_superposition(rng, kGrid, 1.0);
        const auto y = random_superposition(rng, kGrid, 0.5);
        WaveFunction rotated = y;
        const Complex phase = std::polar(1.0, theta(rng));
        for (std::size_t j = 0; j < rotated.size(); ++j) rotated[j] *= phase;
        CHECK_THAT(fidelity(x, y), WithinAbs(fidelity(y, x), 1e-14));
        CHECK_THAT(fidelity(x, rotated), WithinAbs(fidelity(x, y), 1e-13));
        CHECK(fidelity(x, y) <= 1.0 + 1e-12);
    }
}

TEST_CASE("scale_state", "[qstate][scaling]") {
    const auto psi = harmonic_eigenstate(kGrid, 0, 1.0);
    SECTION("identity") {
        CHECK(l2_distance(scale_state(psi, 1.0, 0.0, 0.0), psi) < 1e-14);
    }
    SECTION("global phase from mu tau") {
        const auto phased = scale_state(psi, 1.0, 0.7, 2.0);
        const Complex overlap = inner_product(psi, phased);
        CHECK_THAT(std::arg(overlap), WithinAbs(-1.4, 1e-12));
    }
    SECTION("width quadruples under dilation by two") {
        const auto o = observables(scale_state(psi, 2.0, 0.0, 0.0), TrapSpec::none(), 0.0);
        CHECK_THAT(o.x2, WithinRel(2.0, 1e-7));
    }
    SECTION("composition") {
        const auto twice = scale_state(scale_state(psi, 1.3, 0.0, 0.0), 1.5, 0.0, 0.0);
        CHECK(l2_distance(twice, scale_state(psi, 1.95, 0.0, 0.0)) <= 1e-5);
    }
    SECTION("norm preservation for random smooth states") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> gamma(0.5, 2.5);
        for (int i = 0; i < 20; ++i) {
            const auto x = random_superposition(rng, kGrid, 1.0);
            CHECK_THAT(scale_state(x, gamma(rng), 0.3, 1.1).norm(), WithinAbs(1.0, 1e-6));
        }
    }
    SECTION("dilation beyond the box") {
        CHECK_THROWS_AS(scale_state(psi, 20.0, 0.0, 0.0), SupportError);
        CHECK_THROWS_AS(scale_state(psi, 0.0, 0.0, 0.0), DomainError);
    }
}

TEST_CASE("Berry phase", "[qstate][berry]") {
    std::mt19937 rng(9);
    const auto psi = random_superposition(rng, kGrid, 1.0);
    CHECK(l2_distance(apply_berry_phase(psi, 0.7, 0.0), psi) == 0.0);
    CHECK(l2_distance(apply_berry_phase(apply_berry_phase(psi, 0.7, 0.3), 0.7, -0.3), psi) < 1e-14);
    const auto phased = apply_berry_phase(psi, 0.7, 0.3);
    for (std::size_t j = 0; j < psi.size(); j += 7) CHECK_THAT(std::abs(phased[j]), WithinAbs(std::abs(psi[j]), 1e-15));
    const std::size_t j = 1500;
    const double q = kGrid.position(j);
    CHECK_THAT(std::arg(phased[j] / psi[j]), WithinAbs(std::remainder(-0.3 / (4 * 0.7) * q * q, 2 * std::numbers::pi), 1e-12));
    CHECK_THROWS_AS(apply_berry_phase(psi, 0.0, 0.3), DomainError);
}

TEST_CASE("Thomas-Fermi profile", "[qstate][thomas-fermi]") {
    // fine grid: the square-root edge limits the discrete normalization to O(dx^1.5)
    const Grid1D fine(8192, 20.0);
    const auto tf = thomas_fermi_profile(fine, 1.0, 10.0);
    double total = 0.0;
    double potential = 0.0;
    double interaction = 0.0;
    for (std::size_t j = 0; j < fine.n_points(); ++j) {
        const double rho = std::norm(tf.state[j]);
        const double q = fine.position(j);
        CHECK(rho >= 0.0);
        CHECK(tf.state[j].imag() == 0.0);
        total += rho * fine.spacing();
        potential += 0.5 * q * q * rho * fine.spacing();
        interaction += 5.0 * rho * rho * fine.spacing();
    }
    CHECK_THAT(total, WithinAbs(1.0, 1e-6));
    CHECK_THAT(tf.mu, WithinRel(thomas_fermi_mu(1.0, 10.0), 1e-6));
    CHECK_THAT(tf.mu, WithinRel(std::pow(3.0 * 10.0 / (4.0 * std::sqrt(2.0)), 2.0 / 3.0), 1e-6));
    CHECK_THAT(tf.energy, WithinRel(potential + interaction, 1e-10));
    // virial relation of the 1D profile: E = (3/5) mu N
    CHECK_THAT(tf.energy, WithinRel(0.6 * tf.mu, 1e-4));

    const auto doubled = thomas_fermi_profile(fine, 1.0, 20.0);
    CHECK_THAT(doubled.mu / tf.mu, WithinRel(std::pow(2.0, 2.0 / 3.0), 1e-6));
    CHECK_THROWS_AS(thomas_fermi_profile(kGrid, 1.0, 0.0), InvalidParameter);
}

TEST_CASE("imaginary-time ground states", "[qstate][ground]") {
    SECTION("harmonic, g = 0") {
        for (double omega : {1.0, 0.25}) {
            const auto r = imaginary_time_ground_state(kGrid, TrapSpec::static_harmonic(omega), 0.0, 1e-2, 1e-7);
            CHECK(r.residual <= 1e-7);
            CHECK_THAT(r.energy, WithinAbs(0.5 * omega, 1e-6));
            CHECK_THAT(r.mu, WithinAbs(r.energy, 1e-12));
            CHECK(fidelity(r.state, harmonic_eigenstate(kGrid, 0, omega)) >= 1.0 - 1e-8);
            CHECK_THAT(r.state.norm(), WithinAbs(1.0, 1e-12));
            REQUIRE(!r.energy_log.empty());
            for (std::size_t i = 1; i < r.energy_log.size(); ++i) {
                CHECK(r.energy_log[i] <= r.energy_log[i - 1] + kEnergyFloor);
            }
        }
    }
    SECTION("nonlinear, g N = 10") {
        const auto r = imaginary_time_ground_state(kGrid, TrapSpec::static_harmonic(1.0), 10.0, 1e-2, 1e-6);
        CHECK(r.residual <= 1e-6);
        // independent dense finite-difference SCF value; the kinetic term lifts mu 2.2% above TF
        CHECK_THAT(r.mu, WithinRel(3.107242, 2e-6));
        CHECK_THAT(r.mu, WithinRel(thomas_fermi_mu(1.0, 10.0), 0.025));
        CHECK(r.mu > r.energy);
        for (std::size_t i = 1; i < r.energy_log.size(); ++i) {
            CHECK(r.energy_log[i] <= r.energy_log[i - 1] + kEnergyFloor);
        }
    }
    SECTION("trap frozen at a later time") {
        GroundStateOptions options;
        options.time = 3.0;
        const TrapSpec trap = TrapSpec::harmonic([](double t) { return 1.0 / (1.0 + t); });
        const auto r = imaginary_time_ground_state(kGrid, trap, 0.0, 1e-2, 1e-7, options);
        CHECK_THAT(r.energy, WithinAbs(0.25, 1e-6));
    }
    SECTION("sharp-walled piston box") {
        const protocol::PowerLawTrap box(protocol::Piston{}, 50.0, protocol::QuinticStep(1.0, 2.0, 5.0));
        const TrapSpec trap = TrapSpec::power_law(box, [](double) { return 0.0; });
        const Grid1D grid(1024, 20.0);
        const auto r = imaginary_time_ground_state(grid, trap, 0.0, 1e-2, 1e-6);
        CHECK(r.residual <= 1e-6);
        // softened walls sit below the hard box of width 2
        CHECK(r.energy < std::numbers::pi * std::numbers::pi / 8.0);
        CHECK(r.energy > 0.5);
        for (std::size_t i = 1; i < r.energy_log.size(); ++i) {
            CHECK(r.energy_log[i] <= r.energy_log[i - 1] + kEnergyFloor);
        }
    }
    SECTION("invalid input") {
        CHECK_THROWS_AS(imaginary_time_ground_state(kGrid, TrapSpec::none(), 0.0, 1e-2, 1e-6), InvalidParameter);
        CHECK_THROWS_AS(imaginary_time_ground_state(kGrid, TrapSpec::static_harmonic(1.0), 0.0, -1.0, 1e-6),
                        InvalidParameter);
    }
}

TEST_CASE("stationary residual", "[qstate][ground]") {
    const FftWorkspace fft(kGrid.n_points());
    double mu = 0.0;
    const auto ground = harmonic_eigenstate(kGrid, 2, 1.0);
    CHECK(stationary_residual(ground, TrapSpec::static_harmonic(1.0), 0.0, fft, &mu) < 1e-9);
    CHECK_THAT(mu, WithinAbs(2.5, 1e-9));
    CHECK(stationary_residual(harmonic_eigenstate(kGrid, 0, 0.5), TrapSpec::static_harmonic(1.0), 0.0, fft) > 0.1);
}
