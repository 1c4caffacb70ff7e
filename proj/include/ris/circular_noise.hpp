#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ris/rng.hpp"

namespace ris {

enum class NoiseFamily {
    Uniform,   // quantization / hardware aging: UF[-tau, tau]
    VonMises,  // imperfect phase estimation: VM(0, kappa)
    Composite, // both at once: the PSE carries delta+gamma, the PDA their pair
};

// Phase-error model shared by the remaining-power and channel modules.
// iota couples the error seen by the amplitude (PDA) to the error seen by
// the phase term (PSE): the PDA error is iota*D + sqrt(1-iota^2)*D' with D'
// an i.i.d. copy. pda_has_error=false means the amplitude sees no error at
// all (the error-free-PDA regime).
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::Uniform;
    double tau = 0.0;    // uniform half-width, radians, in [0, pi/2]
    double kappa = 0.0;  // von Mises concentration, >= 0
    double iota = 1.0;   // PDA/PSE error correlation, in [0, 1]
    bool pda_has_error = true;

    void validate() const;  // throws std::domain_error on out-of-range fields
};

// n i.i.d. draws from UF[-tau, tau].
std::vector<double> sample_uniform(double tau, std::size_t n, SeedSpec seed);

// n i.i.d. draws from VM(0, kappa) via the Best-Fisher wrapped-Cauchy
// rejection sampler. kappa = 0 degenerates to UF[-pi, pi].
std::vector<double> sample_von_mises(double kappa, std::size_t n, SeedSpec seed);

// Elementwise iota*base + sqrt(1-iota^2)*independent. `independent` must be
// an i.i.d. copy of `base` for the construction to preserve the variance.
// Note: for 0 < iota < 1 the result does not keep a von Mises marginal; the
// linear construction is applied literally regardless of family.
std::vector<double> correlated_pair(std::span<const double> base, double iota,
                                    std::span<const double> independent);

// Scalar draws for hot Monte Carlo loops.
double draw_uniform_error(Rng& rng, double tau);
double draw_von_mises(Rng& rng, double kappa);

}  // namespace ris
