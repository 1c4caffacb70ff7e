#include "ris/nf_channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ris {

namespace {
constexpr double kPi = std::numbers::pi;

double wrap_to_pi(double x) {
    const double r = std::remainder(x, 2.0 * kPi);
    return r;  // in [-pi, pi]
}
}  // namespace

std::size_t Scenario::grid_side() const {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(
        static_cast<double>(pixel_count))));
    return side;
}

void Scenario::validate() const {
    std::string problems;
    auto flag = [&problems](const char* msg) {
        if (!problems.empty()) problems += "; ";
        problems += msg;
    };
    const std::size_t side = grid_side();
    if (pixel_count == 0 || side * side != pixel_count)
        flag("pixel_count must be a non-zero perfect square");
    if (!(pitch_x > 0.0)) flag("pitch_x must be > 0");
    if (!(pitch_y > 0.0)) flag("pitch_y must be > 0");
    if (!(carrier_hz > 0.0)) flag("carrier_hz must be > 0");
    if (!(tx_power_w > 0.0)) flag("tx_power_w must be > 0");
    if (!(noise_power_w > 0.0)) flag("noise_power_w must be > 0");
    if (!(ap_pos.z > ris_center.z)) flag("ap must sit in front of the array plane");
    if (!(user_pos.z > ris_center.z)) flag("user must sit in front of the array plane");
    if (!problems.empty()) throw std::invalid_argument("Scenario: " + problems);
}

std::vector<PixelGeometry> build_grid(const Scenario& sc) {
    sc.validate();
    const std::size_t side = sc.grid_side();
    const long n = static_cast<long>(side);
    // Index range {((side+1) mod 2) - floor(side/2), ..., floor(side/2)} and
    // centering offset 0.5*((side+1) mod 2): even sides straddle the center,
    // odd sides place one pixel exactly on it.
    const long lo = ((n + 1) % 2) - n / 2;
    const long hi = n / 2;
    const double off = 0.5 * static_cast<double>((n + 1) % 2);

    std::vector<PixelGeometry> pixels;
    pixels.reserve(sc.pixel_count);
    std::size_t index = 0;
    for (long m1 = lo; m1 <= hi; ++m1) {
        for (long m2 = lo; m2 <= hi; ++m2) {
            PixelGeometry px;
            px.index = index++;
            px.position = {sc.ris_center.x + sc.pitch_x * (static_cast<double>(m1) - off),
                           sc.ris_center.y + sc.pitch_y * (static_cast<double>(m2) - off),
                           sc.ris_center.z};
            const double dxa = px.position.x - sc.ap_pos.x;
            const double dya = px.position.y - sc.ap_pos.y;
            const double dza = px.position.z - sc.ap_pos.z;
            px.dist_ap = std::sqrt(dxa * dxa + dya * dya + dza * dza);
            const double dxu = px.position.x - sc.user_pos.x;
            const double dyu = px.position.y - sc.user_pos.y;
            const double dzu = px.position.z - sc.user_pos.z;
            px.dist_user = std::sqrt(dxu * dxu + dyu * dyu + dzu * dzu);
            px.cos_theta_ap = (sc.ap_pos.z - sc.ris_center.z) / px.dist_ap;
            px.cos_theta_user = (sc.user_pos.z - sc.ris_center.z) / px.dist_user;
            px.visible_ap = px.cos_theta_ap > 0.0;
            px.visible_user = px.cos_theta_user > 0.0;
            px.delay_ap = px.dist_ap / kSpeedOfLight;
            px.delay_user = px.dist_user / kSpeedOfLight;
            px.designed_phase =
                wrap_to_pi(-2.0 * kPi * sc.carrier_hz * (px.delay_ap + px.delay_user));
            pixels.push_back(px);
        }
    }
    return pixels;
}

double link_amplitude(const PixelGeometry& px, const Scenario& sc, LinkSide side) {
    const double d = side == LinkSide::Ap ? px.dist_ap : px.dist_user;
    const double area = sc.pitch_x * sc.pitch_y;
    if (sc.pattern == PixelPattern::Isotropic) return std::sqrt(area / (4.0 * kPi)) / d;
    const double ct = side == LinkSide::Ap ? px.cos_theta_ap : px.cos_theta_user;
    if (!(ct > 0.0)) return 0.0;  // terminal behind the plane: pixel invisible
    return std::sqrt(area * ct / kPi) / d;
}

ChannelResult cascaded_channel(const Scenario& sc, const PdaParams* pda,
                               const NoiseSpec* noise, SeedSpec seed) {
    if (pda != nullptr) pda->validate();
    if (noise != nullptr) noise->validate();
    const auto pixels = build_grid(sc);

    ChannelResult out;
    out.designed_phases.reserve(pixels.size());
    out.amp_products.reserve(pixels.size());

    Rng rng(seed);
    std::complex<double> h(0.0, 0.0);
    double ideal = 0.0;
    for (const auto& px : pixels) {
        const double aa = link_amplitude(px, sc, LinkSide::Ap) *
                          link_amplitude(px, sc, LinkSide::User);
        out.designed_phases.push_back(px.designed_phase);
        out.amp_products.push_back(aa);
        ideal += aa;

        double pse = 0.0, pda_err = 0.0;
        if (noise != nullptr) {
            if (noise->family == NoiseFamily::Composite) {
                const double du = draw_uniform_error(rng, noise->tau);
                const double dv = draw_von_mises(rng, noise->kappa);
                pse = du + dv;
                if (noise->pda_has_error) {
                    const double mix = std::sqrt(1.0 - noise->iota * noise->iota);
                    pda_err = noise->iota * du + mix * draw_uniform_error(rng, noise->tau) +
                              noise->iota * dv + mix * draw_von_mises(rng, noise->kappa);
                }
            } else {
                pse = noise->family == NoiseFamily::Uniform
                          ? draw_uniform_error(rng, noise->tau)
                          : draw_von_mises(rng, noise->kappa);
                if (noise->pda_has_error) {
                    const double indep = noise->family == NoiseFamily::Uniform
                                             ? draw_uniform_error(rng, noise->tau)
                                             : draw_von_mises(rng, noise->kappa);
                    pda_err = noise->iota * pse +
                              std::sqrt(1.0 - noise->iota * noise->iota) * indep;
                }
            }
        }
        const double amp =
            pda != nullptr ? reflection_amplitude(px.designed_phase + pda_err, *pda) : 1.0;
        // Propagation phase and the designed phase cancel by construction;
        // both are kept explicit so the cancellation stays testable.
        const double total_phase = 2.0 * kPi * sc.carrier_hz * (px.delay_ap + px.delay_user) +
                                   px.designed_phase + pse;
        h += aa * amp * std::polar(1.0, -total_phase);
    }
    out.h = h;
    out.ideal_gain = ideal;
    return out;
}

}  // namespace ris
