#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ris/circular_noise.hpp"
#include "ris/pda.hpp"
#include "ris/rng.hpp"

namespace ris {

// The four pixel reflection regimes. ConstantPda fixes the amplitude to a
// constant; ErrorFreePda evaluates the amplitude model at the designed phase
// only; SingleErrorPda feeds one phase-error family into both amplitude and
// phase term; DualErrorPda feeds the composite (uniform + von Mises) pair.
struct ReflectionCase {
    enum class Kind { ConstantPda, ErrorFreePda, SingleErrorPda, DualErrorPda };
    Kind kind = Kind::SingleErrorPda;
    double constant_amplitude = 1.0;  // ConstantPda only

    static ReflectionCase constant(double amplitude) {
        return {Kind::ConstantPda, amplitude};
    }
    static ReflectionCase error_free() { return {Kind::ErrorFreePda, 1.0}; }
    static ReflectionCase single_error() { return {Kind::SingleErrorPda, 1.0}; }
    static ReflectionCase dual_error() { return {Kind::DualErrorPda, 1.0}; }
};

// Closed-form remaining-power approximations, keyed by the conventional
// numbering of the supported noise configurations ("3.1" .. "3.10").
enum class PropId { P31, P32, P33, P34, P35, P36, P37, P38, P39, P310 };
std::string to_string(PropId id);
std::optional<PropId> prop_from_string(const std::string& text);

struct RpResult {
    enum class Method { MonteCarlo, ClosedForm, NumericOracle };
    double gamma = 0.0;  // |E{amp * e^{-j error}}|^2, in [0, 1]
    Method method = Method::NumericOracle;
    double error_estimate = 0.0;
    std::size_t pixels = 0;        // MonteCarlo
    std::size_t realizations = 0;  // MonteCarlo
    std::optional<PropId> prop;    // ClosedForm
    int evaluations = 0;           // NumericOracle
};

// ---- Monte Carlo ----------------------------------------------------------

// Empirical remaining power with M pixels sharing one designed phase:
// mean over realizations of |M^-1 sum_m amp_m e^{-j err_m}|^2.
// error_estimate is the standard error of that mean.
RpResult remaining_power_mc(const ReflectionCase& rcase, const PdaParams& pda,
                            const NoiseSpec& noise, double phi, std::size_t pixels,
                            std::size_t realizations, SeedSpec seed);

// Same estimator with per-pixel designed phases (the finite-M average that
// converges to the analytic limit as the phase set densifies).
RpResult remaining_power_mc(const ReflectionCase& rcase, const PdaParams& pda,
                            const NoiseSpec& noise, std::span<const double> phases,
                            std::size_t realizations, SeedSpec seed);

// Pooled estimator |mean phasor over all pixels*realizations|^2 - the
// consistent estimator of the analytic limit itself (the per-realization
// form above carries an O(1/M) variance bias). Standard error by the delta
// method.
RpResult remaining_power_mc_pooled(const ReflectionCase& rcase, const PdaParams& pda,
                                   const NoiseSpec& noise, double phi,
                                   std::size_t samples, SeedSpec seed);

// ---- Numeric oracle -------------------------------------------------------

// Expected reflection phasor E{amp(phi + Dpda) e^{-j Dpse}} by adaptive
// quadrature over the error density (1-D or 2-D; quasi-random for the
// 4-D partially-correlated composite case).
std::complex<double> mean_reflection(const ReflectionCase& rcase, const PdaParams& pda,
                                     const NoiseSpec& noise, double phi,
                                     double abs_tol = 1e-10);

// Quasi-random variant with an explicit sample budget; only meaningful for
// the partially-correlated composite regime, where adaptive quadrature would
// need four dimensions.
std::complex<double> mean_reflection_qmc(const ReflectionCase& rcase,
                                         const PdaParams& pda, const NoiseSpec& noise,
                                         double phi, std::size_t samples);

// Squared modulus of the mean reflection. Absolute accuracy <= 1e-8 at the
// default tolerance; pass a tighter abs_tol when resolving sub-1e-8
// differences.
RpResult remaining_power_oracle(const ReflectionCase& rcase, const PdaParams& pda,
                                const NoiseSpec& noise, double phi,
                                double abs_tol = 1e-10);

// Oracle with the designed phase itself averaged over the uniform measure on
// [-pi/2 - c, pi/2 + c] (the dense-phase limit of the finite-M average).
// Supported for Uniform and VonMises families.
RpResult remaining_power_oracle_phase_averaged(const ReflectionCase& rcase,
                                               const PdaParams& pda,
                                               const NoiseSpec& noise,
                                               double abs_tol = 1e-10);

// ---- Closed forms ---------------------------------------------------------

// Closed-form approximation for the given configuration; `phi` is the shared
// designed phase. For P31/P32 the amplitude is the constant
// `constant_amplitude`. Preconditions (noise family, iota, kappa range) are
// enforced and violations raise std::invalid_argument.
RpResult remaining_power_closed_form(PropId id, const PdaParams& pda,
                                     const NoiseSpec& noise, double phi,
                                     double constant_amplitude = 1.0);

// The phi_upper variant of the same bound (its maximum over phi).
RpResult remaining_power_closed_form_upper(PropId id, const PdaParams& pda,
                                           const NoiseSpec& noise,
                                           double constant_amplitude = 1.0);

// Noise configuration implied by a closed-form id; used to validate inputs
// and to drive Monte Carlo cross-checks.
ReflectionCase case_for_prop(PropId id);
NoiseSpec noise_template_for_prop(PropId id, double tau, double kappa);

// ---- Convergence study ----------------------------------------------------

struct ConvergenceRow {
    std::size_t pixels = 0;
    double gamma_m = 0.0;      // finite-M Monte Carlo average
    double gamma_limit = 0.0;  // phase-averaged oracle
    double gap = 0.0;
    double std_error = 0.0;
};

// Finite-M remaining power over a dense equispaced phase grid versus the
// analytic limit, per pixel-count in `pixel_grid`.
std::vector<ConvergenceRow> gamma_convergence_study(const PdaParams& pda,
                                                    const NoiseSpec& noise,
                                                    std::span<const std::size_t> pixel_grid,
                                                    std::size_t realizations,
                                                    SeedSpec seed);

}  // namespace ris
