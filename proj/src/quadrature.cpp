#include "ris/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ris {

namespace {

// G7-K15 nodes and weights on [-1, 1]. Gauss points are the odd-index
// abscissae.
constexpr std::array<double, 8> kAbscissae = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr std::array<double, 4> kGaussW = {0.129484966168870, 0.279705391489277,
                                           0.381830050505119, 0.417959183673469};

struct Segment {
    double a, b, value, error;
};

Segment eval_segment(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double gauss = 0.0, kronrod = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        const double x = kAbscissae[i];
        double fsum;
        if (x == 0.0) {
            fsum = f(mid);
        } else {
            fsum = f(mid - hw * x) + f(mid + hw * x);
        }
        kronrod += kKronrodW[i] * fsum;
        if (i % 2 == 1) gauss += kGaussW[i / 2] * fsum;
    }
    gauss *= hw;
    kronrod *= hw;
    // |K15 - G7| overestimates the Kronrod error for smooth integrands,
    // which keeps the subdivision conservative.
    return Segment{a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt) {
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::vector<Segment> segs;
    segs.push_back(eval_segment(f, a, b));
    out.evaluations = 15;

    auto totals = [&segs]() {
        double v = 0.0, e = 0.0;
        for (const auto& s : segs) {
            v += s.value;
            e += s.error;
        }
        return std::pair{v, e};
    };
    // Tolerances below the rounding floor of the accumulated value are not
    // reachable; clamp the goal there instead of subdividing forever.
    auto goal_for = [&opt](double value) {
        return std::max({opt.abs_tol, opt.rel_tol * std::abs(value),
                         8.0 * 2.220446049250313e-16 * std::abs(value)});
    };

    while (static_cast<int>(segs.size()) < opt.max_intervals) {
        auto [value, error] = totals();
        const double goal = goal_for(value);
        if (error <= goal) {
            out.value = value;
            out.error_estimate = error;
            out.converged = true;
            return out;
        }
        auto worst = std::max_element(
            segs.begin(), segs.end(),
            [](const Segment& l, const Segment& r) { return l.error < r.error; });
        const Segment s = *worst;
        const double mid = 0.5 * (s.a + s.b);
        if (mid <= s.a || mid >= s.b) break;  // interval at floating-point resolution
        *worst = eval_segment(f, s.a, mid);
        segs.push_back(eval_segment(f, mid, s.b));
        out.evaluations += 30;
    }
    auto [value, error] = totals();
    const double goal = goal_for(value);
    if (error <= goal) {
        out.value = value;
        out.error_estimate = error;
        out.converged = true;
        return out;
    }
    throw std::runtime_error(
        "integrate: no convergence after " + std::to_string(segs.size()) +
        " intervals (error " + std::to_string(error) + ", tol " + std::to_string(goal) + ")");
}

QuadResult integrate_2d(const std::function<double(double, double)>& f, double ax,
                        double bx, double ay, double by, const QuadOptions& opt) {
    QuadOptions inner = opt;
    inner.abs_tol = opt.abs_tol * 1e-2;
    int inner_evals = 0;
    double inner_err = 0.0;
    auto outer_f = [&](double x) {
        QuadResult r = integrate([&](double y) { return f(x, y); }, ay, by, inner);
        inner_evals += r.evaluations;
        inner_err = std::max(inner_err, r.error_estimate);
        return r.value;
    };
    QuadOptions outer = opt;
    QuadResult r = integrate(outer_f, ax, bx, outer);
    r.evaluations += inner_evals;
    r.error_estimate += inner_err * std::abs(bx - ax);
    return r;
}

double halton_average_4d(const std::function<double(const std::array<double, 4>&)>& f,
                         std::size_t n) {
    constexpr std::array<unsigned, 4> bases = {2, 3, 5, 7};
    auto radical_inverse = [](std::size_t i, unsigned base) {
        double inv = 1.0 / base, frac = inv, x = 0.0;
        while (i > 0) {
            x += static_cast<double>(i % base) * frac;
            i /= base;
            frac *= inv;
        }
        return x;
    };
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, 4> u;
        for (std::size_t d = 0; d < 4; ++d) u[d] = radical_inverse(i + 64, bases[d]);
        sum += f(u);
    }
    return sum / static_cast<double>(n);
}

}  // namespace ris
