#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ris/nf_channel.hpp"
#include "ris/remaining_power.hpp"

namespace ris {

// Closed-form antiderivative value for the pixel-rectangle pathloss integral:
// (1/z) * arctan(s1 s2 / (z sqrt(s1^2 + s2^2 + z^2))). Requires z > 0.
double q_kernel(double s1, double s2, double z);

// Integral of ((x-xT)^2 + (y-yT)^2 + zT^2)^(-3/2) over the pixel rectangle
// via the four-corner q_kernel combination. side selects the terminal.
double panel_integral(const PixelGeometry& pixel, const Scenario& scenario,
                      LinkSide side);

// Spectral-efficiency bound chain. All values in bits/s/Hz.
struct SeReport {
    double se_mc = 0.0;       // Monte Carlo over noise realizations (0 if skipped)
    double se_mc_std = 0.0;
    double se_lower = 0.0;        // designed phase pinned at phi_lower
    double se_lower_upper = 0.0;  // its rectangle/CBS upper bound
    double se_mid = 0.0;          // per-pixel designed phases (the operating point)
    double se_mid_upper = 0.0;
    double se_peak = 0.0;         // designed phase pinned at phi_upper
    double se_peak_upper = 0.0;
    double gap_lower = 0.0;  // se_lower_upper - se_lower
    double gap_mid = 0.0;    // se_mid_upper - se_mid
    double gap_peak = 0.0;   // se_peak_upper - se_peak
    bool chain_ok = false;   // lower <= lower_upper < mid <= mid_upper < peak <= peak_upper

    std::vector<double> values() const;  // the six chain values in order
};

struct SeChainOptions {
    std::size_t mc_realizations = 0;  // 0 skips the Monte Carlo cross-check
    SeedSpec seed;
    double chain_tolerance = 1e-12;  // slack for the strict middle inequalities
};

// Evaluates the full chain for one scenario. `prop` selects the closed-form
// remaining power used for Gamma(phi); nullopt uses the numeric oracle
// bucketized over 256 phase bins (the only option for 0 < iota < 1).
// The rectangle upper bounds require the cosine pattern; with the isotropic
// override they are reported as NaN.
SeReport se_chain(const Scenario& scenario, const PdaParams& pda,
                  const NoiseSpec& noise, std::optional<PropId> prop,
                  const SeChainOptions& options = {});

enum class SweepAxis { RisX, RisZ, Pitch, Iota, Steepness, Floor, Offset, Tau, Kappa };
std::optional<SweepAxis> sweep_axis_from_string(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepRow {
    double value = 0.0;
    SeReport report;
    bool skipped = false;
    std::string skip_reason;
};

// One se_chain evaluation per grid point along the chosen axis. Geometrically
// invalid points are marked skipped rather than aborting the sweep.
std::vector<SweepRow> se_sweep(const Scenario& scenario, const PdaParams& pda,
                               const NoiseSpec& noise, std::optional<PropId> prop,
                               SweepAxis axis, std::span<const double> grid,
                               const SeChainOptions& options = {});

}  // namespace ris
