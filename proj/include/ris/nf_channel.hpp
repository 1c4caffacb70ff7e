#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ris/circular_noise.hpp"
#include "ris/pda.hpp"
#include "ris/rng.hpp"

namespace ris {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

enum class PixelPattern {
    Cosine,     // projected aperture, gain 4 cos(theta) over the front hemisphere
    Isotropic,  // pattern override for comparison runs
};

enum class LinkSide { Ap, User };

// Geometry of an access-point / RIS / user deployment. Pixels sit on a
// rectangular grid in the plane z = ris_center.z, spaced pitch_x by pitch_y,
// with the grid centered on ris_center. Both terminals must be on the front
// side (z > ris_center.z) for the gain model to apply.
struct Scenario {
    Vec3 ap_pos{-20.0, 15.0, 8.0};
    Vec3 user_pos{20.0, 1.5, 8.0};
    Vec3 ris_center{0.0, 10.0, 0.0};
    double pitch_x = 0.0;  // m
    double pitch_y = 0.0;  // m
    std::size_t pixel_count = 0;  // perfect square
    double carrier_hz = 2.4e9;
    double tx_power_w = 0.1;      // 20 dBm
    double noise_power_w = 1e-11; // -80 dBm
    PixelPattern pattern = PixelPattern::Cosine;

    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    std::size_t grid_side() const;
    void validate() const;  // throws std::invalid_argument listing all failures
};

struct PixelGeometry {
    std::size_t index = 0;
    Vec3 position;
    double dist_ap = 0.0, dist_user = 0.0;       // m
    double cos_theta_ap = 0.0, cos_theta_user = 0.0;  // signed; <= 0 means invisible
    double delay_ap = 0.0, delay_user = 0.0;     // s
    double designed_phase = 0.0;                 // radians in (-pi, pi]
    bool visible_ap = true, visible_user = true;
};

// Grid coordinates, distances, angles, delays and designed phases for all
// pixels. Row-major: index = row * side + col where rows walk the x axis.
std::vector<PixelGeometry> build_grid(const Scenario& scenario);

// One-hop Friis amplitude between a pixel and a terminal. Cosine pattern:
// A^2 = pitch_x * pitch_y * cos(theta) / (pi d^2); zero when the terminal is
// behind the array plane. Isotropic: A^2 = pitch_x * pitch_y / (4 pi d^2).
double link_amplitude(const PixelGeometry& pixel, const Scenario& scenario,
                      LinkSide side);

struct ChannelResult {
    std::complex<double> h{0.0, 0.0};
    double ideal_gain = 0.0;  // sum of amplitude products (noise-free, unit PDA)
    std::vector<double> designed_phases;
    std::vector<double> amp_products;  // per-pixel A_ap * A_user
};

// Cascaded channel h = sum_m g_m amp(phase_m + pda_err) e^{-j(phase_m + pse)} h_m
// with the designed phases canceling the propagation phase. Null pda means a
// unit reflector; null noise means error-free operation.
ChannelResult cascaded_channel(const Scenario& scenario, const PdaParams* pda,
                               const NoiseSpec* noise, SeedSpec seed);

}  // namespace ris
