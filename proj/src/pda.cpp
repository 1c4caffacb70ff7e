#include "ris/pda.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ris/remaining_power.hpp"

namespace ris {

namespace {
constexpr double kPi = std::numbers::pi;
}

void CircuitParams::validate() const {
    if (!(inductance_bottom > 0.0) || !(inductance_top > 0.0) || !(capacitance > 0.0) ||
        !(resistance > 0.0) || !(carrier_hz > 0.0) || !(z0 > 0.0))
        throw std::invalid_argument("CircuitParams: all fields must be strictly positive");
}

std::complex<double> circuit_reflection(const CircuitParams& p) {
    p.validate();
    const double w = 2.0 * kPi * p.carrier_hz;
    const std::complex<double> jw(0.0, w);
    const std::complex<double> branch_top =
        jw * p.inductance_top + 1.0 / (jw * p.capacitance) + p.resistance;
    const std::complex<double> branch_bottom = jw * p.inductance_bottom;
    const std::complex<double> z = branch_bottom * branch_top / (branch_bottom + branch_top);
    const std::complex<double> denom = z + p.z0;
    if (std::abs(denom) < 1e-12)
        throw std::domain_error("circuit_reflection: singular input, Z + Z0 ~ 0");
    return (z - p.z0) / denom;
}

double circuit_phase(const CircuitParams& p) {
    const std::complex<double> s = circuit_reflection(p);
    return std::atan2(s.imag(), s.real());
}

double PdaParams::phi_lower() const { return -kPi / 2.0 + offset; }
double PdaParams::phi_upper() const { return kPi / 2.0 + offset; }

void PdaParams::validate() const {
    if (!(steepness >= 1.0))
        throw std::invalid_argument("PdaParams: steepness must be >= 1");
    if (!(floor_amplitude >= 0.0 && floor_amplitude <= 1.0))
        throw std::invalid_argument("PdaParams: floor_amplitude must be in [0, 1]");
    if (!(offset > 0.0 && offset <= kPi / 2.0))
        throw std::invalid_argument("PdaParams: offset must be in (0, pi/2]");
}

double reflection_amplitude(double phi, const PdaParams& p) {
    const double base = (std::sin(phi - p.offset) + 1.0) / 2.0;
    return (1.0 - p.floor_amplitude) * std::pow(base, p.steepness) + p.floor_amplitude;
}

bool AmplitudeBoundsReport::ok() const {
    return max_below_floor <= 0.0 && max_above_unit_slope <= 0.0 && max_above_one <= 0.0;
}

AmplitudeBoundsReport beta_bounds_check(const PdaParams& params,
                                        std::span<const double> phase_grid) {
    params.validate();
    PdaParams unit = params;
    unit.steepness = 1.0;
    AmplitudeBoundsReport rep;
    rep.max_below_floor = rep.max_above_unit_slope = rep.max_above_one =
        -std::numeric_limits<double>::infinity();
    for (double phi : phase_grid) {
        const double a_steep = reflection_amplitude(phi, params);
        const double a_unit = reflection_amplitude(phi, unit);
        rep.max_below_floor = std::max(rep.max_below_floor, params.floor_amplitude - a_steep);
        rep.max_above_unit_slope = std::max(rep.max_above_unit_slope, a_steep - a_unit);
        rep.max_above_one = std::max(rep.max_above_one, a_unit - 1.0);
    }
    return rep;
}

FeasibleSet feasible_set(const PdaParams& params, const NoiseSpec* noise,
                         int resolution) {
    params.validate();
    if (resolution < 64)
        throw std::invalid_argument("feasible_set: resolution must be >= 64");

    ReflectionCase rcase = ReflectionCase::error_free();
    if (noise != nullptr) {
        noise->validate();
        if (!noise->pda_has_error)
            rcase = ReflectionCase::error_free();
        else if (noise->family == NoiseFamily::Composite)
            rcase = ReflectionCase::dual_error();
        else
            rcase = ReflectionCase::single_error();
    }

    // The partially-correlated composite mean has no quadrature route; use a
    // reduced quasi-random budget per locus point to keep sweeps tractable.
    const bool qmc = noise != nullptr &&
                     rcase.kind == ReflectionCase::Kind::DualErrorPda &&
                     noise->iota > 0.0 && noise->iota < 1.0;

    FeasibleSet out;
    out.points.reserve(static_cast<std::size_t>(resolution));
    for (int i = 0; i < resolution; ++i) {
        const double phi = -kPi + 2.0 * kPi * static_cast<double>(i) / resolution;
        std::complex<double> pt;
        if (noise == nullptr) {
            pt = reflection_amplitude(phi, params) * std::polar(1.0, -phi);
        } else if (qmc) {
            pt = mean_reflection_qmc(rcase, params, *noise, phi, 1u << 15) *
                 std::polar(1.0, -phi);
        } else {
            pt = mean_reflection(rcase, params, *noise, phi, 1e-8) * std::polar(1.0, -phi);
        }
        out.points.push_back({pt.real(), pt.imag()});
    }
    double twice_area = 0.0;
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        const auto& p = out.points[i];
        const auto& q = out.points[(i + 1) % out.points.size()];
        twice_area += p[0] * q[1] - q[0] * p[1];
    }
    out.area = 0.5 * std::abs(twice_area);
    return out;
}

namespace {

double fit_objective(std::span<const double> phases, std::span<const double> amps,
                     const PdaParams& p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        const double r = reflection_amplitude(phases[i], p) - amps[i];
        sum += r * r;
    }
    return sum;
}

}  // namespace

PdaFit fit_pda_to_circuit(std::span<const double> phases,
                          std::span<const double> amplitudes, PdaParams initial) {
    if (phases.size() != amplitudes.size() || phases.empty())
        throw std::invalid_argument("fit_pda_to_circuit: need equal-length, non-empty samples");

    using Point = std::array<double, 3>;  // (a, b, c)
    auto clamp_params = [](Point v) {
        PdaParams p;
        p.steepness = std::max(1.0, v[0]);
        p.floor_amplitude = std::clamp(v[1], 0.0, 1.0);
        p.offset = std::clamp(v[2], 1e-3, kPi / 2.0);
        return p;
    };
    auto f = [&](const Point& v) {
        return fit_objective(phases, amplitudes, clamp_params(v));
    };

    // Nelder-Mead, three parameters.
    std::array<Point, 4> simplex;
    simplex[0] = {initial.steepness, initial.floor_amplitude, initial.offset};
    simplex[1] = {initial.steepness + 0.3, initial.floor_amplitude, initial.offset};
    simplex[2] = {initial.steepness, initial.floor_amplitude + 0.1, initial.offset};
    simplex[3] = {initial.steepness, initial.floor_amplitude, initial.offset + 0.1};
    std::array<double, 4> value;
    for (int i = 0; i < 4; ++i) value[i] = f(simplex[i]);

    for (int iter = 0; iter < 600; ++iter) {
        std::array<int, 4> order = {0, 1, 2, 3};
        std::sort(order.begin(), order.end(),
                  [&](int l, int r) { return value[l] < value[r]; });
        const int best = order[0], worst = order[3], second = order[2];
        if (value[worst] - value[best] < 1e-14) break;

        Point centroid = {0, 0, 0};
        for (int i = 0; i < 4; ++i)
            if (i != worst)
                for (int d = 0; d < 3; ++d) centroid[d] += simplex[i][d] / 3.0;

        auto blend = [&](double t) {
            Point p;
            for (int d = 0; d < 3; ++d)
                p[d] = centroid[d] + t * (centroid[d] - simplex[worst][d]);
            return p;
        };
        Point refl = blend(1.0);
        double f_refl = f(refl);
        if (f_refl < value[best]) {
            Point exp_pt = blend(2.0);
            double f_exp = f(exp_pt);
            if (f_exp < f_refl) {
                simplex[worst] = exp_pt;
                value[worst] = f_exp;
            } else {
                simplex[worst] = refl;
                value[worst] = f_refl;
            }
        } else if (f_refl < value[second]) {
            simplex[worst] = refl;
            value[worst] = f_refl;
        } else {
            Point contr = blend(-0.5);
            double f_contr = f(contr);
            if (f_contr < value[worst]) {
                simplex[worst] = contr;
                value[worst] = f_contr;
            } else {
                for (int i = 0; i < 4; ++i) {
                    if (i == best) continue;
                    for (int d = 0; d < 3; ++d)
                        simplex[i][d] = 0.5 * (simplex[i][d] + simplex[best][d]);
                    value[i] = f(simplex[i]);
                }
            }
        }
    }

    int best = 0;
    for (int i = 1; i < 4; ++i)
        if (value[i] < value[best]) best = i;

    PdaFit fit;
    fit.params = clamp_params(simplex[best]);
    double max_dev = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        const double d = std::abs(reflection_amplitude(phases[i], fit.params) - amplitudes[i]);
        max_dev = std::max(max_dev, d);
        sum_sq += d * d;
    }
    fit.max_abs_deviation = max_dev;
    fit.rms_deviation = std::sqrt(sum_sq / static_cast<double>(phases.size()));
    return fit;
}

}  // namespace ris
