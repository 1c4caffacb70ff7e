#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ris/pda.hpp"
#include "ris/rng.hpp"

using namespace ris;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> phase_grid(const PdaParams& p, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = p.phi_lower() + (p.phi_upper() - p.phi_lower()) * i / (n - 1);
    return g;
}
}  // namespace

TEST_CASE("amplitude model endpoints and midpoint") {
    PdaParams p{1.0, 0.2, 0.43 * kPi};
    CHECK(reflection_amplitude(p.phi_upper(), p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(reflection_amplitude(p.phi_lower(), p) == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(reflection_amplitude(p.offset, p) == doctest::Approx(0.6).epsilon(1e-12));

    PdaParams steep{2.0, 0.2, 0.43 * kPi};
    CHECK(reflection_amplitude(steep.phi_upper(), steep) == doctest::Approx(1.0));
    CHECK(reflection_amplitude(steep.phi_lower(), steep) ==
          doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("amplitude stays within [floor, 1] and is 2pi-periodic") {
    PdaParams p{1.7, 0.3, 0.4 * kPi};
    Rng rng({5, 0});
    for (int i = 0; i < 100000; ++i) {
        const double phi = rng.uniform(-10.0, 10.0);
        const double a = reflection_amplitude(phi, p);
        CHECK(a >= p.floor_amplitude - 1e-12);
        CHECK(a <= 1.0 + 1e-12);
        CHECK(reflection_amplitude(phi + 2.0 * kPi, p) == doctest::Approx(a).epsilon(1e-9));
    }
}

TEST_CASE("amplitude slope vanishes at both extremes") {
    PdaParams p{1.0, 0.2, 0.43 * kPi};
    const double h = 1e-4;
    for (double phi : {p.phi_lower(), p.phi_upper()}) {
        const double fd =
            (reflection_amplitude(phi + h, p) - reflection_amplitude(phi - h, p)) /
            (2.0 * h);
        CHECK(std::abs(fd) < 1e-6);
    }
}

TEST_CASE("bound chain over the phase grid") {
    PdaParams p{2.0, 0.2, 0.43 * kPi};
    const auto grid = phase_grid(p, 10000);
    const auto rep = beta_bounds_check(p, grid);
    CHECK(rep.ok());
    CHECK(rep.max_below_floor <= 0.0);
    CHECK(rep.max_above_unit_slope <= 0.0);
    CHECK(rep.max_above_one <= 0.0);

    // a=1 vs a=1: the middle inequality is tight everywhere
    PdaParams unit{1.0, 0.2, 0.43 * kPi};
    const auto rep_unit = beta_bounds_check(unit, grid);
    CHECK(rep_unit.max_above_unit_slope == doctest::Approx(0.0));

    // floor 1 collapses the whole model to a unit reflector
    PdaParams flat{3.0, 1.0, 0.43 * kPi};
    for (double phi : phase_grid(flat, 100))
        CHECK(reflection_amplitude(phi, flat) == doctest::Approx(1.0));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((PdaParams{0.5, 0.2, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PdaParams{1.0, 1.2, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PdaParams{1.0, 0.2, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PdaParams{1.0, 0.2, 2.0}.validate()), std::invalid_argument);
    CHECK_NOTHROW((PdaParams{1.0, 0.2, kPi / 2.0}.validate()));
}

TEST_CASE("circuit reflection magnitude properties") {
    // purely reactive circuit reflects fully
    CircuitParams p;
    p.capacitance = 1.0e-12;
    Rng rng({17, 0});
    for (int i = 0; i < 100; ++i) {
        CircuitParams q = p;
        q.resistance = 1e-9;  // effectively lossless
        q.capacitance = rng.uniform(0.3e-12, 3.0e-12);
        CHECK(std::abs(circuit_reflection(q)) == doctest::Approx(1.0).epsilon(1e-6));
    }
    // huge series resistance opens the branch: |s| -> 1 again
    CircuitParams open = p;
    open.resistance = 1e9;
    CHECK(std::abs(circuit_reflection(open)) == doctest::Approx(1.0).epsilon(1e-6));
    // purely reactive impedance always reflects fully: |jX - Z0| = |jX + Z0|
    for (int i = 0; i < 100; ++i) {
        const double x = -500.0 + 10.0 * i + 3.7;
        const std::complex<double> z(0.0, x);
        CHECK(std::abs((z - 377.0) / (z + 377.0)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // loss inside the sweep range keeps |s| <= 1
    for (double c = 0.47e-12; c <= 2.35e-12; c += 0.05e-12) {
        CircuitParams q = p;
        q.capacitance = c;
        CHECK(std::abs(circuit_reflection(q)) <= 1.0 + 1e-12);
    }
    CHECK_THROWS_AS((CircuitParams{0.0, 1e-9, 1e-12, 1.0, 2.4e9, 377.0}.validate()),
                    std::invalid_argument);
}

TEST_CASE("amplitude model reproduces the circuit sweep after fitting") {
    CircuitParams base;  // defaults reproduce the floor-0.2 regime
    std::vector<double> phases, amps;
    for (int i = 0; i <= 200; ++i) {
        CircuitParams q = base;
        q.capacitance = 0.47e-12 + (2.35e-12 - 0.47e-12) * i / 200.0;
        const auto s = circuit_reflection(q);
        phases.push_back(std::atan2(s.imag(), s.real()));
        amps.push_back(std::abs(s));
    }
    const PdaFit fit = fit_pda_to_circuit(phases, amps, PdaParams{1.6, 0.2, 0.43 * kPi});
    CHECK(fit.max_abs_deviation < 0.05);
    CHECK(fit.params.floor_amplitude > 0.05);
    CHECK(fit.params.floor_amplitude < 0.5);
}

TEST_CASE("feasible set of a unit reflector is the unit disk") {
    PdaParams ideal{1.0, 1.0, 0.43 * kPi};
    const auto fs = feasible_set(ideal, nullptr, 4096);
    CHECK(fs.area == doctest::Approx(kPi).epsilon(1e-3 / kPi));
    CHECK(std::abs(fs.area - kPi) < 1e-3);
    for (const auto& pt : fs.points)
        CHECK(std::hypot(pt[0], pt[1]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lossy model covers strictly less area") {
    PdaParams p{1.0, 0.2, 0.43 * kPi};
    const auto fs = feasible_set(p, nullptr, 2048);
    CHECK(fs.area < kPi);
    CHECK(fs.area > 0.0);
    CHECK_THROWS_AS(feasible_set(p, nullptr, 32), std::invalid_argument);
}

TEST_CASE("feasible-set area shrinks as the error coupling grows") {
    PdaParams p{1.0, 0.2, 0.43 * kPi};
    NoiseSpec noise;
    noise.family = NoiseFamily::Uniform;
    noise.tau = kPi / 4.0;
    noise.pda_has_error = true;
    double prev = 1e9;
    for (double iota : {0.0, 0.5, 1.0}) {
        noise.iota = iota;
        const double area = feasible_set(p, &noise, 256).area;
        CHECK(area < prev);
        prev = area;
    }
}
