#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "ris/circular_noise.hpp"

namespace ris {

// Equivalent parallel-resonant circuit of one varactor-loaded pixel.
struct CircuitParams {
    double inductance_bottom = 2.5e-9;  // H
    double inductance_top = 0.7e-9;     // H
    double capacitance = 1.0e-12;       // F, the tunable element
    double resistance = 2.5;            // ohm, effective loss
    double carrier_hz = 2.4e9;
    double z0 = 377.0;  // free-space impedance, ohm

    void validate() const;
};

// Complex reflection coefficient (Z - Z0)/(Z + Z0) of the pixel circuit.
std::complex<double> circuit_reflection(const CircuitParams& params);

// Tuned phase of the reflection coefficient, four-quadrant.
double circuit_phase(const CircuitParams& params);

// Phase-dependent amplitude model
//   amplitude(phi) = (1-b) * ((sin(phi - c) + 1)/2)^a + b,
// maximized to 1 at phi_upper = pi/2 + c and minimized to b at
// phi_lower = -pi/2 + c. The expression is 2*pi-periodic, so arguments
// pushed outside the principal domain by noise are handled as-is.
struct PdaParams {
    double steepness = 1.0;            // a >= 1
    double floor_amplitude = 0.2;      // b in [0, 1]
    double offset = 0.43 * 3.14159265358979323846;  // c in (0, pi/2]

    double phi_lower() const;  // -pi/2 + c
    double phi_upper() const;  // +pi/2 + c
    void validate() const;
};

double reflection_amplitude(double phi, const PdaParams& params);

// Pointwise check of the bound chain b <= amp(phi; a) <= amp(phi; a=1) <= 1
// over a grid covering [phi_lower, phi_upper]. Violations are reported as
// positive magnitudes (0 means the chain holds).
struct AmplitudeBoundsReport {
    double max_below_floor = 0.0;      // b - amp(phi; a)
    double max_above_unit_slope = 0.0; // amp(phi; a) - amp(phi; a=1)
    double max_above_one = 0.0;        // amp(phi; a=1) - 1
    bool ok() const;
};
AmplitudeBoundsReport beta_bounds_check(const PdaParams& params,
                                        std::span<const double> phase_grid);

// Locus of achievable complex reflection coefficients over a full phase
// revolution, and its shoelace area. With a noise spec the locus point at
// phi is the expected coefficient E[amp(phi+Dpda) e^{-j(phi+Dpse)}],
// evaluated by quadrature.
struct FeasibleSet {
    std::vector<std::array<double, 2>> points;  // (re, im)
    double area = 0.0;
};
FeasibleSet feasible_set(const PdaParams& params, const NoiseSpec* noise,
                         int resolution);

// Least-squares fit of (a, b, c) to sampled (phase, amplitude) pairs from
// the circuit model; Nelder-Mead on the sum of squared residuals.
struct PdaFit {
    PdaParams params;
    double max_abs_deviation = 0.0;
    double rms_deviation = 0.0;
};
PdaFit fit_pda_to_circuit(std::span<const double> phases,
                          std::span<const double> amplitudes, PdaParams initial);

}  // namespace ris
