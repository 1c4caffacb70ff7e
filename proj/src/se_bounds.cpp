#include "ris/se_bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ris {

namespace {
constexpr double kPi = std::numbers::pi;

double log2_snr(double gain, const Scenario& sc) {
    return std::log2(1.0 + sc.tx_power_w * gain / sc.noise_power_w);
}

// Pairwise reduction keeps the big sums accurate and the order fixed.
double pairwise_sum(std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}
double pairwise_sum(std::vector<double> v) {
    return v.empty() ? 0.0 : pairwise_sum(v, 0, v.size());
}

// Per-pixel sqrt(Gamma(phase)) provider: closed form, or the oracle coarsened
// over 256 phase bins when no closed form exists.
class GammaProfile {
  public:
    GammaProfile(const PdaParams& pda, const NoiseSpec& noise, std::optional<PropId> prop)
        : pda_(pda), noise_(noise), prop_(prop) {
        if (!prop_) {
            const ReflectionCase rcase =
                !noise.pda_has_error ? ReflectionCase::error_free()
                : noise.family == NoiseFamily::Composite ? ReflectionCase::dual_error()
                                                         : ReflectionCase::single_error();
            const bool qmc = rcase.kind == ReflectionCase::Kind::DualErrorPda &&
                             noise.iota > 0.0 && noise.iota < 1.0;
            bins_.resize(kBins);
            for (int i = 0; i < kBins; ++i) {
                const double phi = -kPi + 2.0 * kPi * (i + 0.5) / kBins;
                bins_[i] = qmc ? std::norm(mean_reflection_qmc(rcase, pda_, noise_, phi,
                                                               1u << 15))
                               : remaining_power_oracle(rcase, pda_, noise_, phi, 1e-8).gamma;
            }
        }
    }

    double operator()(double phi) const {
        if (prop_) return remaining_power_closed_form(*prop_, pda_, noise_, phi).gamma;
        const double t = (phi + kPi) / (2.0 * kPi);
        int i = static_cast<int>(t * kBins);
        i = std::clamp(i, 0, kBins - 1);
        return bins_[i];
    }

  private:
    static constexpr int kBins = 256;
    PdaParams pda_;
    NoiseSpec noise_;
    std::optional<PropId> prop_;
    std::vector<double> bins_;
};

}  // namespace

double q_kernel(double s1, double s2, double z) {
    if (!(z > 0.0)) throw std::domain_error("q_kernel: z must be > 0");
    return std::atan(s1 * s2 / (z * std::sqrt(s1 * s1 + s2 * s2 + z * z))) / z;
}

double panel_integral(const PixelGeometry& px, const Scenario& sc, LinkSide side) {
    const Vec3 terminal = side == LinkSide::Ap ? sc.ap_pos : sc.user_pos;
    const double z = terminal.z - sc.ris_center.z;
    const double t1 = px.position.x - sc.pitch_x / 2.0 - terminal.x;
    const double t2 = px.position.x + sc.pitch_x / 2.0 - terminal.x;
    const double t3 = px.position.y - sc.pitch_y / 2.0 - terminal.y;
    const double t4 = px.position.y + sc.pitch_y / 2.0 - terminal.y;
    return q_kernel(t2, t4, z) - q_kernel(t1, t4, z) - q_kernel(t2, t3, z) +
           q_kernel(t1, t3, z);
}

std::vector<double> SeReport::values() const {
    return {se_lower, se_lower_upper, se_mid, se_mid_upper, se_peak, se_peak_upper};
}

SeReport se_chain(const Scenario& sc, const PdaParams& pda, const NoiseSpec& noise,
                  std::optional<PropId> prop, const SeChainOptions& opt) {
    sc.validate();
    pda.validate();
    noise.validate();

    const auto pixels = build_grid(sc);
    const GammaProfile gamma(pda, noise, prop);

    std::vector<double> amp_products(pixels.size());
    std::vector<double> weighted_amp(pixels.size());
    std::vector<double> s_upper(pixels.size());
    std::vector<double> s_upper_weighted(pixels.size());
    std::vector<double> t_upper(pixels.size());
    const bool cosine = sc.pattern == PixelPattern::Cosine;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const auto& px = pixels[i];
        const double aa =
            link_amplitude(px, sc, LinkSide::Ap) * link_amplitude(px, sc, LinkSide::User);
        const double root_gamma = std::sqrt(gamma(px.designed_phase));
        amp_products[i] = aa;
        weighted_amp[i] = aa * root_gamma;
        if (cosine) {
            s_upper[i] = panel_integral(px, sc, LinkSide::Ap);
            s_upper_weighted[i] = root_gamma * s_upper[i];
            t_upper[i] = panel_integral(px, sc, LinkSide::User);
        }
    }

    const double sum_aa = pairwise_sum(amp_products);
    const double sum_weighted = pairwise_sum(weighted_amp);
    const double gamma_lower = gamma(pda.phi_lower());
    const double gamma_peak = gamma(pda.phi_upper());

    SeReport rep;
    rep.se_lower = log2_snr(gamma_lower * sum_aa * sum_aa, sc);
    rep.se_mid = log2_snr(sum_weighted * sum_weighted, sc);
    rep.se_peak = log2_snr(gamma_peak * sum_aa * sum_aa, sc);

    if (cosine) {
        const double z1 = sc.ap_pos.z - sc.ris_center.z;
        const double z2 = sc.user_pos.z - sc.ris_center.z;
        const double scale = z1 * z2 / (kPi * kPi);
        const double sum_s = pairwise_sum(s_upper);
        const double sum_sw = pairwise_sum(s_upper_weighted);
        const double sum_t = pairwise_sum(t_upper);
        rep.se_lower_upper = log2_snr(gamma_lower * scale * sum_s * sum_t, sc);
        rep.se_mid_upper = log2_snr(scale * sum_sw * sum_t, sc);
        rep.se_peak_upper = log2_snr(gamma_peak * scale * sum_s * sum_t, sc);
        rep.gap_lower = rep.se_lower_upper - rep.se_lower;
        rep.gap_mid = rep.se_mid_upper - rep.se_mid;
        rep.gap_peak = rep.se_peak_upper - rep.se_peak;
        const double tol = opt.chain_tolerance;
        rep.chain_ok = rep.se_lower <= rep.se_lower_upper + tol &&
                       rep.se_lower_upper < rep.se_mid - tol &&
                       rep.se_mid <= rep.se_mid_upper + tol &&
                       rep.se_mid_upper < rep.se_peak - tol &&
                       rep.se_peak <= rep.se_peak_upper + tol;
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rep.se_lower_upper = rep.se_mid_upper = rep.se_peak_upper = nan;
        rep.gap_lower = rep.gap_mid = rep.gap_peak = nan;
        rep.chain_ok = rep.se_lower <= rep.se_mid && rep.se_mid <= rep.se_peak;
    }

    if (opt.mc_realizations > 0) {
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t r = 0; r < opt.mc_realizations; ++r) {
            const ChannelResult ch =
                cascaded_channel(sc, &pda, &noise, opt.seed.substream(r));
            const double se = log2_snr(std::norm(ch.h), sc);
            sum += se;
            sum_sq += se * se;
        }
        const double n = static_cast<double>(opt.mc_realizations);
        rep.se_mc = sum / n;
        if (opt.mc_realizations > 1) {
            const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
            rep.se_mc_std = std::sqrt(var / n);
        }
    }
    return rep;
}

std::optional<SweepAxis> sweep_axis_from_string(const std::string& name) {
    if (name == "x_ris") return SweepAxis::RisX;
    if (name == "z_ris") return SweepAxis::RisZ;
    if (name == "pitch") return SweepAxis::Pitch;
    if (name == "iota") return SweepAxis::Iota;
    if (name == "a" || name == "steepness") return SweepAxis::Steepness;
    if (name == "b" || name == "floor") return SweepAxis::Floor;
    if (name == "c" || name == "offset") return SweepAxis::Offset;
    if (name == "tau") return SweepAxis::Tau;
    if (name == "kappa") return SweepAxis::Kappa;
    return std::nullopt;
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::RisX: return "x_ris";
        case SweepAxis::RisZ: return "z_ris";
        case SweepAxis::Pitch: return "pitch";
        case SweepAxis::Iota: return "iota";
        case SweepAxis::Steepness: return "steepness";
        case SweepAxis::Floor: return "floor";
        case SweepAxis::Offset: return "offset";
        case SweepAxis::Tau: return "tau";
        case SweepAxis::Kappa: return "kappa";
    }
    return "?";
}

std::vector<SweepRow> se_sweep(const Scenario& scenario, const PdaParams& pda,
                               const NoiseSpec& noise, std::optional<PropId> prop,
                               SweepAxis axis, std::span<const double> grid,
                               const SeChainOptions& options) {
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    std::size_t idx = 0;
    for (double value : grid) {
        Scenario sc = scenario;
        PdaParams p = pda;
        NoiseSpec n = noise;
        std::optional<PropId> row_prop = prop;
        switch (axis) {
            case SweepAxis::RisX: sc.ris_center.x = value; break;
            case SweepAxis::RisZ: sc.ris_center.z = value; break;
            case SweepAxis::Pitch: sc.pitch_x = sc.pitch_y = value; break;
            case SweepAxis::Iota:
                n.iota = value;
                // Closed forms only exist at the iota endpoints, and the
                // applicable one flips between the coupled and independent
                // variants across the sweep.
                if (value > 0.0 && value < 1.0) {
                    row_prop = std::nullopt;
                } else if (row_prop && n.pda_has_error) {
                    const bool coupled = value >= 1.0;
                    if (n.family == NoiseFamily::Uniform)
                        row_prop = coupled ? PropId::P35 : PropId::P37;
                    else if (n.family == NoiseFamily::VonMises)
                        row_prop = coupled ? PropId::P36 : PropId::P38;
                    else
                        row_prop = coupled ? PropId::P39 : PropId::P310;
                }
                break;
            case SweepAxis::Steepness: p.steepness = value; break;
            case SweepAxis::Floor: p.floor_amplitude = value; break;
            case SweepAxis::Offset: p.offset = value; break;
            case SweepAxis::Tau: n.tau = value; break;
            case SweepAxis::Kappa: n.kappa = value; break;
        }
        SweepRow row;
        row.value = value;
        SeChainOptions opt = options;
        opt.seed = options.seed.substream(100000 * idx);
        try {
            row.report = se_chain(sc, p, n, row_prop, opt);
        } catch (const std::exception& e) {
            row.skipped = true;
            row.skip_reason = e.what();
        }
        rows.push_back(std::move(row));
        ++idx;
    }
    return rows;
}

}  // namespace ris
