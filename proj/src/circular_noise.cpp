#include "ris/circular_noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ris {

namespace {
constexpr double kPi = std::numbers::pi;
}

void NoiseSpec::validate() const {
    if (family != NoiseFamily::VonMises) {
        if (!(tau >= 0.0 && tau <= kPi / 2.0))
            throw std::domain_error("NoiseSpec: tau must be in [0, pi/2]");
    }
    if (family != NoiseFamily::Uniform) {
        if (!(kappa >= 0.0)) throw std::domain_error("NoiseSpec: kappa must be >= 0");
    }
    if (!(iota >= 0.0 && iota <= 1.0))
        throw std::domain_error("NoiseSpec: iota must be in [0, 1]");
}

double draw_uniform_error(Rng& rng, double tau) {
    return tau * (2.0 * rng.uniform01() - 1.0);
}

double draw_von_mises(Rng& rng, double kappa) {
    if (kappa < 1e-10) return rng.uniform(-kPi, kPi);

    // Best & Fisher (1979): rejection from a wrapped Cauchy envelope.
    const double a = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double b = (a - std::sqrt(2.0 * a)) / (2.0 * kappa);
    const double r = (1.0 + b * b) / (2.0 * b);
    for (;;) {
        const double z = std::cos(kPi * rng.uniform01());
        const double f = (1.0 + r * z) / (r + z);
        const double c = kappa * (r - f);
        const double u2 = rng.uniform01();
        if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
            const double u3 = rng.uniform01();
            const double angle = std::acos(std::clamp(f, -1.0, 1.0));
            return u3 < 0.5 ? -angle : angle;
        }
    }
}

std::vector<double> sample_uniform(double tau, std::size_t n, SeedSpec seed) {
    if (!(tau >= 0.0 && tau <= kPi / 2.0))
        throw std::domain_error("sample_uniform: tau must be in [0, pi/2]");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = draw_uniform_error(rng, tau);
    return out;
}

std::vector<double> sample_von_mises(double kappa, std::size_t n, SeedSpec seed) {
    if (!(kappa >= 0.0)) throw std::domain_error("sample_von_mises: kappa must be >= 0");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = draw_von_mises(rng, kappa);
    return out;
}

std::vector<double> correlated_pair(std::span<const double> base, double iota,
                                    std::span<const double> independent) {
    if (base.size() != independent.size())
        throw std::invalid_argument("correlated_pair: sequence lengths differ");
    if (!(iota >= 0.0 && iota <= 1.0))
        throw std::domain_error("correlated_pair: iota must be in [0, 1]");
    const double mix = std::sqrt(1.0 - iota * iota);
    std::vector<double> out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        out[i] = iota * base[i] + mix * independent[i];
    return out;
}

}  // namespace ris
