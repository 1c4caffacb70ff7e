#pragma once

#include <array>
#include <cstddef>
#include <functional>

namespace ris {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
    bool converged = false;
};

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_intervals = 4000;
};

// Adaptive Gauss-Kronrod (G7, K15) on [a, b]. Splits the interval with the
// largest error estimate until the tolerance is met. Throws std::runtime_error
// with diagnostics if the interval budget is exhausted first.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

// Tensor-product adaptive quadrature over [ax,bx] x [ay,by]: an adaptive
// outer pass in x over adaptive inner integrals in y.
QuadResult integrate_2d(const std::function<double(double, double)>& f, double ax,
                        double bx, double ay, double by, const QuadOptions& opt = {});

// Quasi-random (Halton) average of f over the unit hypercube [0,1)^4,
// n points. Deterministic.
double halton_average_4d(const std::function<double(const std::array<double, 4>&)>& f,
                         std::size_t n);

}  // namespace ris
