#include "ris/remaining_power.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ris/quadrature.hpp"
#include "ris/special_functions.hpp"

namespace ris {

namespace {

constexpr double kPi = std::numbers::pi;

// ---- shared validation ------------------------------------------------

void check_case_noise(const ReflectionCase& rcase, const NoiseSpec& noise) {
    noise.validate();
    switch (rcase.kind) {
        case ReflectionCase::Kind::ConstantPda:
            if (!(rcase.constant_amplitude > 0.0 && rcase.constant_amplitude <= 1.0))
                throw std::invalid_argument("constant amplitude must be in (0, 1]");
            break;
        case ReflectionCase::Kind::ErrorFreePda:
            break;
        case ReflectionCase::Kind::SingleErrorPda:
            if (noise.family == NoiseFamily::Composite)
                throw std::invalid_argument(
                    "single-error regime takes one family, not composite noise");
            if (!noise.pda_has_error)
                throw std::invalid_argument(
                    "single-error regime requires pda_has_error");
            break;
        case ReflectionCase::Kind::DualErrorPda:
            if (noise.family != NoiseFamily::Composite)
                throw std::invalid_argument("dual-error regime requires composite noise");
            if (!noise.pda_has_error)
                throw std::invalid_argument("dual-error regime requires pda_has_error");
            break;
    }
}

// ---- Monte Carlo draws --------------------------------------------------

double draw_family(Rng& rng, NoiseFamily family, double tau, double kappa) {
    return family == NoiseFamily::Uniform ? draw_uniform_error(rng, tau)
                                          : draw_von_mises(rng, kappa);
}

double mix_correlated(Rng& rng, double base, const NoiseSpec& noise, NoiseFamily family) {
    if (noise.iota >= 1.0) return base;
    const double indep = draw_family(rng, family, noise.tau, noise.kappa);
    if (noise.iota <= 0.0) return indep;
    return noise.iota * base + std::sqrt(1.0 - noise.iota * noise.iota) * indep;
}

std::complex<double> draw_phasor(Rng& rng, const ReflectionCase& rcase,
                                 const PdaParams& pda, const NoiseSpec& noise,
                                 double phi) {
    switch (rcase.kind) {
        case ReflectionCase::Kind::ConstantPda:
        case ReflectionCase::Kind::ErrorFreePda: {
            double pse = 0.0;
            if (noise.family == NoiseFamily::Composite) {
                pse = draw_uniform_error(rng, noise.tau) + draw_von_mises(rng, noise.kappa);
            } else {
                pse = draw_family(rng, noise.family, noise.tau, noise.kappa);
            }
            const double amp = rcase.kind == ReflectionCase::Kind::ConstantPda
                                   ? rcase.constant_amplitude
                                   : reflection_amplitude(phi, pda);
            return amp * std::polar(1.0, -pse);
        }
        case ReflectionCase::Kind::SingleErrorPda: {
            const double pse = draw_family(rng, noise.family, noise.tau, noise.kappa);
            const double pda_err = mix_correlated(rng, pse, noise, noise.family);
            return reflection_amplitude(phi + pda_err, pda) * std::polar(1.0, -pse);
        }
        case ReflectionCase::Kind::DualErrorPda: {
            const double du = draw_uniform_error(rng, noise.tau);
            const double dv = draw_von_mises(rng, noise.kappa);
            const double du_pda = mix_correlated(rng, du, noise, NoiseFamily::Uniform);
            const double dv_pda = mix_correlated(rng, dv, noise, NoiseFamily::VonMises);
            return reflection_amplitude(phi + du_pda + dv_pda, pda) *
                   std::polar(1.0, -(du + dv));
        }
    }
    throw std::logic_error("draw_phasor: unreachable");
}

// ---- quadrature helpers ---------------------------------------------------

struct ErrorDensity {
    double lo = 0.0, hi = 0.0;
    std::vector<double> breakpoints;  // interior split points (peaked densities)
    std::function<double(double)> pdf;
    bool point_mass = false;  // degenerate at 0

    double pdf_or_one(double x) const { return point_mass ? 1.0 : pdf(x); }
};

ErrorDensity uniform_density(double tau) {
    ErrorDensity d;
    if (tau <= 0.0) {
        d.point_mass = true;
        return d;
    }
    d.lo = -tau;
    d.hi = tau;
    const double inv = 1.0 / (2.0 * tau);
    d.pdf = [inv](double) { return inv; };
    return d;
}

ErrorDensity vm_density(double kappa) {
    ErrorDensity d;
    d.lo = -kPi;
    d.hi = kPi;
    const double log_norm = std::log(2.0 * kPi) + std::log(bessel_i(0, kappa));
    d.pdf = [kappa, log_norm](double g) { return std::exp(kappa * std::cos(g) - log_norm); };
    if (kappa > 4.0) {
        const double s = std::min(kPi / 2.0, 6.0 / std::sqrt(kappa));
        d.breakpoints = {-s, s};
    }
    return d;
}

ErrorDensity density_for(NoiseFamily family, const NoiseSpec& noise) {
    return family == NoiseFamily::Uniform ? uniform_density(noise.tau)
                                          : vm_density(noise.kappa);
}

std::vector<double> segment_edges(const ErrorDensity& d) {
    std::vector<double> edges = {d.lo};
    for (double b : d.breakpoints) edges.push_back(b);
    edges.push_back(d.hi);
    return edges;
}

struct ComplexQuad {
    std::complex<double> value;
    double error = 0.0;
    int evaluations = 0;
};

ComplexQuad integrate_complex(const std::function<std::complex<double>(double)>& f,
                              const ErrorDensity& d, double abs_tol) {
    ComplexQuad out;
    if (d.point_mass) {
        out.value = f(0.0);
        return out;
    }
    const auto edges = segment_edges(d);
    const double seg_tol = abs_tol / static_cast<double>(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        QuadOptions opt;
        opt.abs_tol = seg_tol;
        auto re = integrate([&](double x) { return f(x).real(); }, edges[i], edges[i + 1], opt);
        auto im = integrate([&](double x) { return f(x).imag(); }, edges[i], edges[i + 1], opt);
        out.value += std::complex<double>(re.value, im.value);
        out.error += re.error_estimate + im.error_estimate;
        out.evaluations += re.evaluations + im.evaluations;
    }
    return out;
}

ComplexQuad integrate_complex_2d(
    const std::function<std::complex<double>(double, double)>& f, const ErrorDensity& dx,
    const ErrorDensity& dy, double abs_tol) {
    ComplexQuad out;
    if (dx.point_mass && dy.point_mass) {
        out.value = f(0.0, 0.0);
        return out;
    }
    if (dx.point_mass) {
        return integrate_complex([&](double y) { return f(0.0, y); }, dy, abs_tol);
    }
    if (dy.point_mass) {
        return integrate_complex([&](double x) { return f(x, 0.0); }, dx, abs_tol);
    }
    const auto ex = segment_edges(dx);
    const auto ey = segment_edges(dy);
    const int cells = static_cast<int>((ex.size() - 1) * (ey.size() - 1));
    const double cell_tol = abs_tol / cells;
    for (std::size_t i = 0; i + 1 < ex.size(); ++i) {
        for (std::size_t j = 0; j + 1 < ey.size(); ++j) {
            QuadOptions opt;
            opt.abs_tol = cell_tol;
            auto re = integrate_2d([&](double x, double y) { return f(x, y).real(); },
                                   ex[i], ex[i + 1], ey[j], ey[j + 1], opt);
            auto im = integrate_2d([&](double x, double y) { return f(x, y).imag(); },
                                   ex[i], ex[i + 1], ey[j], ey[j + 1], opt);
            out.value += std::complex<double>(re.value, im.value);
            out.error += re.error_estimate + im.error_estimate;
            out.evaluations += re.evaluations + im.evaluations;
        }
    }
    return out;
}

// Numeric inverse CDF for VM(0, kappa), used by the quasi-random 4-D path.
class VmInverseCdf {
  public:
    explicit VmInverseCdf(double kappa) : grid_(kN + 1), cdf_(kN + 1) {
        const double log_norm = std::log(2.0 * kPi) + std::log(bessel_i(0, kappa));
        double acc = 0.0;
        double prev_pdf = std::exp(kappa * std::cos(-kPi) - log_norm);
        grid_[0] = -kPi;
        cdf_[0] = 0.0;
        const double h = 2.0 * kPi / kN;
        for (int i = 1; i <= kN; ++i) {
            grid_[i] = -kPi + h * i;
            const double p = std::exp(kappa * std::cos(grid_[i]) - log_norm);
            acc += 0.5 * (prev_pdf + p) * h;
            cdf_[i] = acc;
            prev_pdf = p;
        }
        for (auto& c : cdf_) c /= acc;  // normalize the trapezoid mass
    }

    double operator()(double u) const {
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.begin()) return grid_.front();
        if (it == cdf_.end()) return grid_.back();
        const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
        const double c0 = cdf_[i - 1], c1 = cdf_[i];
        const double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
        return grid_[i - 1] + t * (grid_[i] - grid_[i - 1]);
    }

  private:
    static constexpr int kN = 16384;
    std::vector<double> grid_, cdf_;
};

constexpr std::size_t kQmcSamples = 1u << 19;

}  // namespace

// ---- PropId helpers ---------------------------------------------------------

std::string to_string(PropId id) {
    switch (id) {
        case PropId::P31: return "3.1";
        case PropId::P32: return "3.2";
        case PropId::P33: return "3.3";
        case PropId::P34: return "3.4";
        case PropId::P35: return "3.5";
        case PropId::P36: return "3.6";
        case PropId::P37: return "3.7";
        case PropId::P38: return "3.8";
        case PropId::P39: return "3.9";
        case PropId::P310: return "3.10";
    }
    return "?";
}

std::optional<PropId> prop_from_string(const std::string& text) {
    static const std::pair<const char*, PropId> table[] = {
        {"3.1", PropId::P31},  {"3.2", PropId::P32}, {"3.3", PropId::P33},
        {"3.4", PropId::P34},  {"3.5", PropId::P35}, {"3.6", PropId::P36},
        {"3.7", PropId::P37},  {"3.8", PropId::P38}, {"3.9", PropId::P39},
        {"3.10", PropId::P310}};
    for (const auto& [name, id] : table)
        if (text == name) return id;
    return std::nullopt;
}

ReflectionCase case_for_prop(PropId id) {
    switch (id) {
        case PropId::P31:
        case PropId::P32:
            return ReflectionCase::constant(1.0);
        case PropId::P33:
        case PropId::P34:
            return ReflectionCase::error_free();
        case PropId::P35:
        case PropId::P36:
        case PropId::P37:
        case PropId::P38:
            return ReflectionCase::single_error();
        case PropId::P39:
        case PropId::P310:
            return ReflectionCase::dual_error();
    }
    throw std::logic_error("case_for_prop: unreachable");
}

NoiseSpec noise_template_for_prop(PropId id, double tau, double kappa) {
    NoiseSpec n;
    n.tau = tau;
    n.kappa = kappa;
    switch (id) {
        case PropId::P31: n.family = NoiseFamily::Uniform; n.pda_has_error = false; break;
        case PropId::P32: n.family = NoiseFamily::VonMises; n.pda_has_error = false; break;
        case PropId::P33: n.family = NoiseFamily::Uniform; n.pda_has_error = false; break;
        case PropId::P34: n.family = NoiseFamily::VonMises; n.pda_has_error = false; break;
        case PropId::P35: n.family = NoiseFamily::Uniform; n.iota = 1.0; break;
        case PropId::P36: n.family = NoiseFamily::VonMises; n.iota = 1.0; break;
        case PropId::P37: n.family = NoiseFamily::Uniform; n.iota = 0.0; break;
        case PropId::P38: n.family = NoiseFamily::VonMises; n.iota = 0.0; break;
        case PropId::P39: n.family = NoiseFamily::Composite; n.iota = 1.0; break;
        case PropId::P310: n.family = NoiseFamily::Composite; n.iota = 0.0; break;
    }
    return n;
}

// ---- Monte Carlo ------------------------------------------------------------

RpResult remaining_power_mc(const ReflectionCase& rcase, const PdaParams& pda,
                            const NoiseSpec& noise, std::span<const double> phases,
                            std::size_t realizations, SeedSpec seed) {
    check_case_noise(rcase, noise);
    pda.validate();
    if (phases.empty()) throw std::invalid_argument("remaining_power_mc: no pixels");
    if (realizations == 0) throw std::invalid_argument("remaining_power_mc: no realizations");

    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t r = 0; r < realizations; ++r) {
        Rng rng(seed.substream(r));
        std::complex<double> acc(0.0, 0.0);
        for (double phi : phases) acc += draw_phasor(rng, rcase, pda, noise, phi);
        acc /= static_cast<double>(phases.size());
        const double g = std::norm(acc);
        sum += g;
        sum_sq += g * g;
    }
    const double n = static_cast<double>(realizations);
    RpResult out;
    out.method = RpResult::Method::MonteCarlo;
    out.gamma = sum / n;
    out.pixels = phases.size();
    out.realizations = realizations;
    if (realizations > 1) {
        const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
        out.error_estimate = std::sqrt(var / n);
    }
    return out;
}

RpResult remaining_power_mc(const ReflectionCase& rcase, const PdaParams& pda,
                            const NoiseSpec& noise, double phi, std::size_t pixels,
                            std::size_t realizations, SeedSpec seed) {
    std::vector<double> phases(pixels, phi);
    return remaining_power_mc(rcase, pda, noise, phases, realizations, seed);
}

RpResult remaining_power_mc_pooled(const ReflectionCase& rcase, const PdaParams& pda,
                                   const NoiseSpec& noise, double phi,
                                   std::size_t samples, SeedSpec seed) {
    check_case_noise(rcase, noise);
    pda.validate();
    if (samples == 0) throw std::invalid_argument("remaining_power_mc_pooled: no samples");

    Rng rng(seed);
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const std::complex<double> z = draw_phasor(rng, rcase, pda, noise, phi);
        sx += z.real();
        sy += z.imag();
        sxx += z.real() * z.real();
        syy += z.imag() * z.imag();
        sxy += z.real() * z.imag();
    }
    const double n = static_cast<double>(samples);
    const double mx = sx / n, my = sy / n;
    RpResult out;
    out.method = RpResult::Method::MonteCarlo;
    out.gamma = mx * mx + my * my;
    out.pixels = 1;
    out.realizations = samples;
    if (samples > 1) {
        const double vx = std::max(0.0, (sxx - n * mx * mx) / (n - 1.0));
        const double vy = std::max(0.0, (syy - n * my * my) / (n - 1.0));
        const double cxy = (sxy - n * mx * my) / (n - 1.0);
        const double var_gamma =
            (4.0 * mx * mx * vx + 4.0 * my * my * vy + 8.0 * mx * my * cxy) / n;
        out.error_estimate = std::sqrt(std::max(0.0, var_gamma));
    }
    return out;
}

// ---- Numeric oracle ---------------------------------------------------------

std::complex<double> mean_reflection(const ReflectionCase& rcase, const PdaParams& pda,
                                     const NoiseSpec& noise, double phi, double abs_tol) {
    check_case_noise(rcase, noise);
    pda.validate();

    auto amp = [&pda](double x) { return reflection_amplitude(x, pda); };
    auto unit_phasor = [](double x) { return std::polar(1.0, -x); };

    switch (rcase.kind) {
        case ReflectionCase::Kind::ConstantPda:
        case ReflectionCase::Kind::ErrorFreePda: {
            const double a = rcase.kind == ReflectionCase::Kind::ConstantPda
                                 ? rcase.constant_amplitude
                                 : amp(phi);
            std::complex<double> pse(1.0, 0.0);
            if (noise.family != NoiseFamily::VonMises) {
                const ErrorDensity du = uniform_density(noise.tau);
                pse *= integrate_complex(
                           [&](double x) { return unit_phasor(x) * du.pdf_or_one(x); }, du,
                           abs_tol)
                           .value;
            }
            if (noise.family != NoiseFamily::Uniform) {
                const ErrorDensity dv = vm_density(noise.kappa);
                pse *= integrate_complex(
                           [&](double y) { return unit_phasor(y) * dv.pdf_or_one(y); }, dv,
                           abs_tol)
                           .value;
            }
            return a * pse;
        }
        case ReflectionCase::Kind::SingleErrorPda: {
            const ErrorDensity d = density_for(noise.family, noise);
            if (noise.iota >= 1.0) {
                return integrate_complex(
                           [&](double x) {
                               return amp(phi + x) * unit_phasor(x) * d.pdf_or_one(x);
                           },
                           d, abs_tol)
                    .value;
            }
            if (noise.iota <= 0.0) {
                const auto mean_amp =
                    integrate_complex(
                        [&](double y) {
                            return std::complex<double>(amp(phi + y) * d.pdf_or_one(y), 0.0);
                        },
                        d, abs_tol)
                        .value;
                const auto pse = integrate_complex(
                                     [&](double x) { return unit_phasor(x) * d.pdf_or_one(x); },
                                     d, abs_tol)
                                     .value;
                return mean_amp.real() * pse;
            }
            const double q = std::sqrt(1.0 - noise.iota * noise.iota);
            return integrate_complex_2d(
                       [&](double x, double y) {
                           return amp(phi + noise.iota * x + q * y) * unit_phasor(x) *
                                  d.pdf_or_one(x) * d.pdf_or_one(y);
                       },
                       d, d, abs_tol)
                .value;
        }
        case ReflectionCase::Kind::DualErrorPda: {
            const ErrorDensity du = uniform_density(noise.tau);
            const ErrorDensity dv = vm_density(noise.kappa);
            if (noise.iota >= 1.0) {
                return integrate_complex_2d(
                           [&](double x, double y) {
                               return amp(phi + x + y) * unit_phasor(x + y) *
                                      du.pdf_or_one(x) * dv.pdf_or_one(y);
                           },
                           du, dv, abs_tol)
                    .value;
            }
            if (noise.iota <= 0.0) {
                const auto mean_amp =
                    integrate_complex_2d(
                        [&](double x, double y) {
                            return std::complex<double>(
                                amp(phi + x + y) * du.pdf_or_one(x) * dv.pdf_or_one(y), 0.0);
                        },
                        du, dv, abs_tol)
                        .value;
                const auto pse_u = integrate_complex(
                                       [&](double x) { return unit_phasor(x) * du.pdf_or_one(x); },
                                       du, abs_tol)
                                       .value;
                const auto pse_v = integrate_complex(
                                       [&](double y) { return unit_phasor(y) * dv.pdf_or_one(y); },
                                       dv, abs_tol)
                                       .value;
                return mean_amp.real() * pse_u * pse_v;
            }
            // Partially correlated composite pair: 4-D quasi-random average
            // over (du, du', dv, dv') with inverse-CDF sampling.
            return mean_reflection_qmc(rcase, pda, noise, phi, kQmcSamples);
        }
    }
    throw std::logic_error("mean_reflection: unreachable");
}

std::complex<double> mean_reflection_qmc(const ReflectionCase& rcase,
                                         const PdaParams& pda, const NoiseSpec& noise,
                                         double phi, std::size_t samples) {
    check_case_noise(rcase, noise);
    pda.validate();
    if (rcase.kind != ReflectionCase::Kind::DualErrorPda)
        throw std::invalid_argument(
            "mean_reflection_qmc: only the dual-error composite regime needs it");
    const double q = std::sqrt(std::max(0.0, 1.0 - noise.iota * noise.iota));
    const VmInverseCdf inv_vm(noise.kappa);
    auto phasor_at = [&](const std::array<double, 4>& u) {
        const double a = noise.tau * (2.0 * u[0] - 1.0);
        const double ai = noise.tau * (2.0 * u[1] - 1.0);
        const double g = inv_vm(u[2]);
        const double gi = inv_vm(u[3]);
        const double pda_arg = phi + noise.iota * a + q * ai + noise.iota * g + q * gi;
        return reflection_amplitude(pda_arg, pda) * std::polar(1.0, -(a + g));
    };
    const double re = halton_average_4d(
        [&](const std::array<double, 4>& u) { return phasor_at(u).real(); }, samples);
    const double im = halton_average_4d(
        [&](const std::array<double, 4>& u) { return phasor_at(u).imag(); }, samples);
    return {re, im};
}

RpResult remaining_power_oracle(const ReflectionCase& rcase, const PdaParams& pda,
                                const NoiseSpec& noise, double phi, double abs_tol) {
    const std::complex<double> m = mean_reflection(rcase, pda, noise, phi, abs_tol);
    RpResult out;
    out.method = RpResult::Method::NumericOracle;
    out.gamma = std::norm(m);
    out.error_estimate = 2.0 * std::abs(m) * abs_tol;
    return out;
}

RpResult remaining_power_oracle_phase_averaged(const ReflectionCase& rcase,
                                               const PdaParams& pda,
                                               const NoiseSpec& noise, double abs_tol) {
    check_case_noise(rcase, noise);
    pda.validate();
    if (rcase.kind == ReflectionCase::Kind::DualErrorPda)
        throw std::invalid_argument(
            "phase-averaged oracle supports Uniform and VonMises families only");

    const double lo = -kPi / 2.0 - pda.offset;
    const double hi = kPi / 2.0 + pda.offset;
    const double span = hi - lo;
    auto amp = [&pda](double x) { return reflection_amplitude(x, pda); };

    auto phase_mean_amp = [&](double shift, double tol) {
        QuadOptions opt;
        opt.abs_tol = tol;
        return integrate([&](double p) { return amp(p + shift); }, lo, hi, opt).value / span;
    };

    std::complex<double> mean(0.0, 0.0);
    switch (rcase.kind) {
        case ReflectionCase::Kind::ConstantPda:
        case ReflectionCase::Kind::ErrorFreePda: {
            const double a = rcase.kind == ReflectionCase::Kind::ConstantPda
                                 ? rcase.constant_amplitude
                                 : phase_mean_amp(0.0, abs_tol * 1e-2);
            NoiseSpec pse_only = noise;
            ReflectionCase unit = ReflectionCase::constant(1.0);
            mean = a * mean_reflection(unit, pda, pse_only, 0.0, abs_tol);
            break;
        }
        case ReflectionCase::Kind::SingleErrorPda: {
            const ErrorDensity d = density_for(noise.family, noise);
            ErrorDensity phase_dom;
            phase_dom.lo = lo;
            phase_dom.hi = hi;
            phase_dom.pdf = [](double) { return 1.0; };
            if (noise.iota >= 1.0) {
                mean = integrate_complex_2d(
                           [&](double x, double p) {
                               return amp(p + x) * std::polar(1.0, -x) *
                                      d.pdf_or_one(x) / span;
                           },
                           d, phase_dom, abs_tol)
                           .value;
            } else if (noise.iota <= 0.0) {
                // PDA and PSE errors independent: mean factorizes.
                const auto amp_mean =
                    integrate_complex_2d(
                        [&](double x, double p) {
                            return std::complex<double>(
                                amp(p + x) * d.pdf_or_one(x) / span, 0.0);
                        },
                        d, phase_dom, abs_tol)
                        .value;
                const auto pse =
                    integrate_complex(
                        [&](double x) { return std::polar(1.0, -x) * d.pdf_or_one(x); },
                        d, abs_tol)
                        .value;
                mean = amp_mean.real() * pse;
            } else {
                const double q = std::sqrt(1.0 - noise.iota * noise.iota);
                // Inner phase average as a function of the combined shift.
                mean = integrate_complex_2d(
                           [&](double x, double y) {
                               const double shift = noise.iota * x + q * y;
                               return phase_mean_amp(shift, abs_tol * 1e-3) *
                                      std::polar(1.0, -x) * d.pdf_or_one(x) *
                                      d.pdf_or_one(y);
                           },
                           d, d, abs_tol)
                           .value;
            }
            break;
        }
        case ReflectionCase::Kind::DualErrorPda:
            break;  // rejected above
    }

    RpResult out;
    out.method = RpResult::Method::NumericOracle;
    out.gamma = std::norm(mean);
    out.error_estimate = 2.0 * std::abs(mean) * abs_tol;
    return out;
}

// ---- Closed forms -----------------------------------------------------------

namespace {

// Degree-8 Taylor polynomial of (sin t / t)^2; remainder O(t^10).
double sinc_sq_poly(double tau) {
    const double t2 = tau * tau;
    return 1.0 +
           t2 * (-1.0 / 3.0 +
                 t2 * (2.0 / 45.0 + t2 * (-1.0 / 315.0 + t2 * (2.0 / 14175.0))));
}

// Truncations of sin(t)/t.
double sinc3(double tau) {
    const double t2 = tau * tau;
    return 1.0 + t2 * (-1.0 / 6.0 + t2 * (1.0 / 120.0));
}
double sinc4(double tau) {
    const double t2 = tau * tau;
    return 1.0 + t2 * (-1.0 / 6.0 + t2 * (1.0 / 120.0 - t2 / 5040.0));
}

// Truncations of the real/imaginary parts of E{cos d e^{-jd}}, d ~ UF[-t,t]:
// (1 +- sin(2t)/(2t))/2.
double half_sum_poly(double tau) {
    const double t2 = tau * tau;
    return 1.0 + t2 * (-1.0 / 3.0 + t2 * (1.0 / 15.0 - t2 * 2.0 / 315.0));
}
double half_diff_poly(double tau) {
    const double t2 = tau * tau;
    return t2 * (1.0 / 3.0 + t2 * (-1.0 / 15.0 + t2 * 2.0 / 315.0));
}

double zeta_factor(double phi, const PdaParams& pda) {
    const double b = pda.floor_amplitude;
    const double s = std::sin(phi - pda.offset);
    return (1.0 - b) * (1.0 - b) / 4.0 * s * s + (1.0 - b * b) / 2.0 * s +
           (1.0 + b) * (1.0 + b) / 4.0;
}

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

}  // namespace

RpResult remaining_power_closed_form(PropId id, const PdaParams& pda,
                                     const NoiseSpec& noise, double phi,
                                     double constant_amplitude) {
    pda.validate();
    noise.validate();
    const double b = pda.floor_amplitude;
    const double c = pda.offset;
    const double tau = noise.tau;
    const double kappa = noise.kappa;
    const double s = std::sin(phi - c);
    const double co = std::cos(phi - c);
    const auto mode = BesselRatioMode::Auto;

    double gamma = 0.0;
    switch (id) {
        case PropId::P31: {
            require(noise.family == NoiseFamily::Uniform, "3.1 needs uniform noise");
            gamma = constant_amplitude * constant_amplitude * sinc_sq_poly(tau);
            break;
        }
        case PropId::P32: {
            require(noise.family == NoiseFamily::VonMises, "3.2 needs von Mises noise");
            require(kappa >= 1.0, "3.2 requires kappa >= 1");
            const double r = vm_mean_resultant(kappa, mode);
            gamma = constant_amplitude * constant_amplitude * r * r;
            break;
        }
        case PropId::P33: {
            require(noise.family == NoiseFamily::Uniform, "3.3 needs uniform noise");
            require(!noise.pda_has_error, "3.3 is the error-free-PDA regime");
            gamma = zeta_factor(phi, pda) * sinc_sq_poly(tau);
            break;
        }
        case PropId::P34: {
            require(noise.family == NoiseFamily::VonMises, "3.4 needs von Mises noise");
            require(!noise.pda_has_error, "3.4 is the error-free-PDA regime");
            require(kappa >= 1.0, "3.4 requires kappa >= 1");
            const double r = vm_mean_resultant(kappa, mode);
            gamma = zeta_factor(phi, pda) * r * r;
            break;
        }
        case PropId::P35: {
            require(noise.family == NoiseFamily::Uniform && noise.iota == 1.0 &&
                        noise.pda_has_error,
                    "3.5 needs fully-coupled uniform noise");
            const double e1 = (1.0 - b) / 2.0 * s * half_sum_poly(tau);
            const double e2 = (1.0 + b) / 2.0 * sinc4(tau);
            const double hd = half_diff_poly(tau);
            const double e3 = (1.0 - b) * (1.0 - b) / 4.0 * hd * hd * co * co;
            gamma = (e1 + e2) * (e1 + e2) + e3;
            break;
        }
        case PropId::P36: {
            require(noise.family == NoiseFamily::VonMises && noise.iota == 1.0 &&
                        noise.pda_has_error,
                    "3.6 needs fully-coupled von Mises noise");
            require(kappa >= 1.0, "3.6 requires kappa >= 1");
            const double r = vm_mean_resultant(kappa, mode);
            const double r2 = vm_second_moment(kappa, mode);
            const double e1 = (1.0 + b) / 2.0 * r;
            const double e2 = (1.0 - b) / 4.0 * s * (1.0 + r2);
            const double e3 =
                (1.0 - b) * (1.0 - b) / 16.0 * co * co * (1.0 - r2) * (1.0 - r2);
            gamma = (e1 + e2) * (e1 + e2) + e3;
            break;
        }
        case PropId::P37: {
            require(noise.family == NoiseFamily::Uniform && noise.iota == 0.0 &&
                        noise.pda_has_error,
                    "3.7 needs independent uniform noise");
            const double e2 = sinc3(tau);
            const double e1 = (1.0 - b) / 2.0 * s * e2 + (1.0 + b) / 2.0;
            gamma = e1 * e1 * e2 * e2;
            break;
        }
        case PropId::P38: {
            require(noise.family == NoiseFamily::VonMises && noise.iota == 0.0 &&
                        noise.pda_has_error,
                    "3.8 needs independent von Mises noise");
            require(kappa >= 1.0, "3.8 requires kappa >= 1");
            const double r = vm_mean_resultant(kappa, mode);
            const double e = (1.0 - b) / 2.0 * s * r + (1.0 + b) / 2.0;
            gamma = e * e * r * r;
            break;
        }
        case PropId::P39: {
            require(noise.family == NoiseFamily::Composite && noise.iota == 1.0 &&
                        noise.pda_has_error,
                    "3.9 needs fully-coupled composite noise");
            require(kappa >= 1.6, "3.9 requires kappa >= 1.6");
            const double u = 1.0 / kappa;
            const double kp = 1.0 - u * (0.125 + u * (1.0 / 64.0 + u / 128.0));
            const double km = u * (0.125 + u * (1.0 / 64.0 + u / 128.0));
            const double e1 = half_sum_poly(tau) * kp;
            const double e2 = half_diff_poly(tau) * kp;
            const double e3 = half_sum_poly(tau) * km;
            const double e4 = half_diff_poly(tau) * km;
            const double e5 = sinc3(tau) * vm_mean_resultant(kappa, mode);
            const double re = (1.0 - b) * s / 2.0 * (e1 - e4) + (1.0 + b) / 2.0 * e5;
            const double im = (1.0 - b) * co / 2.0 * (e2 + e3);
            gamma = re * re + im * im;
            break;
        }
        case PropId::P310: {
            require(noise.family == NoiseFamily::Composite && noise.iota == 0.0 &&
                        noise.pda_has_error,
                    "3.10 needs independent composite noise");
            require(kappa >= 1.0, "3.10 requires kappa >= 1");
            const double eta = sinc3(tau) * vm_mean_resultant(kappa, mode);
            const double e1 = (1.0 - b) / 2.0 * s * eta + (1.0 + b) / 2.0;
            gamma = e1 * e1 * eta * eta;
            break;
        }
    }

    RpResult out;
    out.method = RpResult::Method::ClosedForm;
    out.gamma = gamma;
    out.prop = id;
    return out;
}

RpResult remaining_power_closed_form_upper(PropId id, const PdaParams& pda,
                                           const NoiseSpec& noise,
                                           double constant_amplitude) {
    return remaining_power_closed_form(id, pda, noise, pda.phi_upper(),
                                       constant_amplitude);
}

// ---- Convergence study --------------------------------------------------

std::vector<ConvergenceRow> gamma_convergence_study(const PdaParams& pda,
                                                    const NoiseSpec& noise,
                                                    std::span<const std::size_t> pixel_grid,
                                                    std::size_t realizations,
                                                    SeedSpec seed) {
    if (noise.family == NoiseFamily::Composite)
        throw std::invalid_argument(
            "gamma_convergence_study: Uniform or VonMises families only");
    const ReflectionCase rcase = noise.pda_has_error ? ReflectionCase::single_error()
                                                     : ReflectionCase::error_free();
    const RpResult limit = remaining_power_oracle_phase_averaged(rcase, pda, noise);

    const double lo = -kPi / 2.0 - pda.offset;
    const double hi = kPi / 2.0 + pda.offset;
    std::vector<ConvergenceRow> rows;
    rows.reserve(pixel_grid.size());
    std::size_t idx = 0;
    for (std::size_t m : pixel_grid) {
        std::vector<double> phases(m);
        for (std::size_t i = 0; i < m; ++i)
            phases[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.5) /
                                 static_cast<double>(m);
        const RpResult mc = remaining_power_mc(rcase, pda, noise, phases, realizations,
                                               seed.substream(1000 * idx));
        ConvergenceRow row;
        row.pixels = m;
        row.gamma_m = mc.gamma;
        row.gamma_limit = limit.gamma;
        row.gap = std::abs(mc.gamma - limit.gamma);
        row.std_error = mc.error_estimate;
        rows.push_back(row);
        ++idx;
    }
    return rows;
}

}  // namespace ris
