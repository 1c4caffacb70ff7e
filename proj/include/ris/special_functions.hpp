#pragma once

namespace ris {

// Evaluation mode for the von Mises Bessel-ratio moments. Exact sums the
// power series of both Bessel functions; the two series modes evaluate the
// truncated expansions used by the remaining-power closed forms. Auto picks
// the series whose validity range contains kappa (switch at kappa = 1.6).
enum class BesselRatioMode {
    Exact,
    SmallKappaSeries,
    LargeKappaAsymptotic,
    Auto,
};

inline constexpr double kBesselSeriesSwitch = 1.6;
inline constexpr double kBesselMaxArgument = 700.0;  // I0 overflows past this

// Modified Bessel function of the first kind, integer order >= 0, by power
// series with term-ratio stopping. Relative accuracy ~1e-15 for x <= 700.
double bessel_i(int order, double x);

// First circular moment E{cos g} of VM(0, kappa): I1/I0.
double vm_mean_resultant(double kappa, BesselRatioMode mode = BesselRatioMode::Exact);

// Second circular moment E{cos 2g} of VM(0, kappa): I2/I0.
double vm_second_moment(double kappa, BesselRatioMode mode = BesselRatioMode::Exact);

}  // namespace ris
