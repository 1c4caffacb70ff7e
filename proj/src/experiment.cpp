#include "ris/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ris/version.hpp"

namespace ris {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Schema-versioned CSV sink with fixed float formatting, so identical runs
// are identical bytes.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& cols)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
        out_ << "# schema=1\n";
        for (std::size_t i = 0; i < cols.size(); ++i)
            out_ << cols[i] << (i + 1 < cols.size() ? "," : "\n");
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    }

    void row(std::initializer_list<double> cells) {
        std::vector<std::string> s;
        s.reserve(cells.size());
        for (double v : cells) s.push_back(fmt(v));
        row(s);
    }

  private:
    std::ofstream out_;
};

std::string sanitize(std::string text) {
    for (auto& ch : text)
        if (ch == ',' || ch == '\n') ch = ';';
    return text;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return v;
}

// ---- config <-> json --------------------------------------------------------

std::string family_name(NoiseFamily f) {
    switch (f) {
        case NoiseFamily::Uniform: return "uniform";
        case NoiseFamily::VonMises: return "von-mises";
        case NoiseFamily::Composite: return "composite";
    }
    return "?";
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["scenario"] = {
        {"ap", {c.scenario.ap_pos.x, c.scenario.ap_pos.y, c.scenario.ap_pos.z}},
        {"user", {c.scenario.user_pos.x, c.scenario.user_pos.y, c.scenario.user_pos.z}},
        {"ris_center",
         {c.scenario.ris_center.x, c.scenario.ris_center.y, c.scenario.ris_center.z}},
        {"pitch_x", c.scenario.pitch_x},
        {"pitch_y", c.scenario.pitch_y},
        {"pixels", c.scenario.pixel_count},
        {"carrier_hz", c.scenario.carrier_hz},
        {"tx_power_w", c.scenario.tx_power_w},
        {"noise_power_w", c.scenario.noise_power_w},
        {"pattern",
         c.scenario.pattern == PixelPattern::Cosine ? "cosine" : "isotropic"}};
    j["pda"] = {{"steepness", c.pda.steepness},
                {"floor", c.pda.floor_amplitude},
                {"offset", c.pda.offset}};
    j["noise"] = {{"family", family_name(c.noise.family)},
                  {"tau", c.noise.tau},
                  {"kappa", c.noise.kappa},
                  {"iota", c.noise.iota},
                  {"pda_has_error", c.noise.pda_has_error}};
    j["circuit"] = {{"l_bottom_h", c.circuit.circuit.inductance_bottom},
                    {"l_top_h", c.circuit.circuit.inductance_top},
                    {"r_ohm", c.circuit.circuit.resistance},
                    {"z0_ohm", c.circuit.circuit.z0},
                    {"c_min_f", c.circuit.c_min},
                    {"c_max_f", c.circuit.c_max},
                    {"points", c.circuit.points}};
    j["experiment"] = {{"kind", to_string(c.kind)},
                       {"axis", to_string(c.sweep_axis)},
                       {"realizations", c.realizations}};
    if (c.prop) j["experiment"]["prop"] = to_string(*c.prop);
    if (!c.sweep_grid.empty()) j["experiment"]["grid"] = c.sweep_grid;
    j["seed"] = c.seed.master_seed;
    return j;
}

void expand_flat_keys(json& j) {
    std::vector<std::string> flat;
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key().find('.') != std::string::npos) flat.push_back(it.key());
    for (const auto& key : flat) {
        json value = j[key];
        j.erase(key);
        json* node = &j;
        std::size_t start = 0;
        for (;;) {
            const std::size_t dot = key.find('.', start);
            const std::string part = key.substr(start, dot - start);
            if (dot == std::string::npos) {
                (*node)[part] = value;
                break;
            }
            node = &(*node)[part];
            start = dot + 1;
        }
    }
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void apply_json(ExperimentConfig& c, const json& root) {
    if (root.contains("scale") && root["scale"] == "desk") c = desk_scale(c);

    if (root.contains("scenario")) {
        const json& s = root["scenario"];
        auto vec3 = [](const json& a) {
            return Vec3{a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
        };
        if (s.contains("ap")) c.scenario.ap_pos = vec3(s["ap"]);
        if (s.contains("user")) c.scenario.user_pos = vec3(s["user"]);
        if (s.contains("ris_center")) c.scenario.ris_center = vec3(s["ris_center"]);
        if (s.contains("carrier_hz")) c.scenario.carrier_hz = s["carrier_hz"];
        if (s.contains("pitch_x")) c.scenario.pitch_x = s["pitch_x"];
        if (s.contains("pitch_y")) c.scenario.pitch_y = s["pitch_y"];
        if (s.contains("pitch_m"))
            c.scenario.pitch_x = c.scenario.pitch_y = s["pitch_m"];
        if (s.contains("pitch_lambda"))
            c.scenario.pitch_x = c.scenario.pitch_y =
                s["pitch_lambda"].get<double>() * c.scenario.wavelength();
        if (s.contains("pixels")) c.scenario.pixel_count = s["pixels"];
        if (s.contains("tx_power_w")) c.scenario.tx_power_w = s["tx_power_w"];
        if (s.contains("tx_power_dbm"))
            c.scenario.tx_power_w = dbm_to_watt(s["tx_power_dbm"]);
        if (s.contains("noise_w")) c.scenario.noise_power_w = s["noise_w"];
        if (s.contains("noise_dbm"))
            c.scenario.noise_power_w = dbm_to_watt(s["noise_dbm"]);
        if (s.contains("pattern"))
            c.scenario.pattern = s["pattern"] == "isotropic" ? PixelPattern::Isotropic
                                                             : PixelPattern::Cosine;
    }
    if (root.contains("pda")) {
        const json& p = root["pda"];
        if (p.contains("steepness")) c.pda.steepness = p["steepness"];
        if (p.contains("floor")) c.pda.floor_amplitude = p["floor"];
        if (p.contains("offset")) c.pda.offset = p["offset"];
        if (p.contains("offset_pi")) c.pda.offset = p["offset_pi"].get<double>() * kPi;
    }
    if (root.contains("noise")) {
        const json& n = root["noise"];
        if (n.contains("family")) {
            const std::string f = n["family"];
            if (f == "uniform") c.noise.family = NoiseFamily::Uniform;
            else if (f == "von-mises") c.noise.family = NoiseFamily::VonMises;
            else if (f == "composite") c.noise.family = NoiseFamily::Composite;
            else throw std::invalid_argument("config: unknown noise family " + f);
        }
        if (n.contains("tau")) c.noise.tau = n["tau"];
        if (n.contains("tau_pi")) c.noise.tau = n["tau_pi"].get<double>() * kPi;
        if (n.contains("kappa")) c.noise.kappa = n["kappa"];
        if (n.contains("iota")) c.noise.iota = n["iota"];
        if (n.contains("pda_has_error")) c.noise.pda_has_error = n["pda_has_error"];
    }
    if (root.contains("circuit")) {
        const json& q = root["circuit"];
        if (q.contains("l_bottom_h")) c.circuit.circuit.inductance_bottom = q["l_bottom_h"];
        if (q.contains("l_top_h")) c.circuit.circuit.inductance_top = q["l_top_h"];
        if (q.contains("r_ohm")) c.circuit.circuit.resistance = q["r_ohm"];
        if (q.contains("z0_ohm")) c.circuit.circuit.z0 = q["z0_ohm"];
        if (q.contains("c_min_f")) c.circuit.c_min = q["c_min_f"];
        if (q.contains("c_max_f")) c.circuit.c_max = q["c_max_f"];
        if (q.contains("points")) c.circuit.points = q["points"];
    }
    if (root.contains("experiment")) {
        const json& e = root["experiment"];
        if (e.contains("kind")) {
            const auto kind = experiment_from_string(e["kind"]);
            if (!kind)
                throw std::invalid_argument("config: unknown experiment kind " +
                                            e["kind"].get<std::string>());
            c.kind = *kind;
        }
        if (e.contains("prop")) {
            const auto prop = prop_from_string(e["prop"]);
            if (!prop)
                throw std::invalid_argument("config: unknown closed-form id " +
                                            e["prop"].get<std::string>());
            c.prop = prop;
        }
        if (e.contains("axis")) {
            const auto axis = sweep_axis_from_string(e["axis"]);
            if (!axis)
                throw std::invalid_argument("config: unknown sweep axis " +
                                            e["axis"].get<std::string>());
            c.sweep_axis = *axis;
        }
        if (e.contains("grid")) {
            if (e["grid"].is_array()) {
                c.sweep_grid = e["grid"].get<std::vector<double>>();
            } else {
                const json& g = e["grid"];
                c.sweep_grid = linspace(g.at("from"), g.at("to"), g.at("points"));
            }
        }
        if (e.contains("realizations")) c.realizations = e["realizations"];
    }
    if (root.contains("seed")) c.seed.master_seed = root["seed"];
    if (root.contains("output_dir"))
        c.output_dir = root["output_dir"].get<std::string>();
}

// ---- individual experiments -------------------------------------------------

using FileList = std::vector<std::string>;

void write_se_rows(CsvWriter& csv, double value, const SweepRow& row) {
    const SeReport& r = row.report;
    std::vector<std::string> cells = {
        fmt(value),        fmt(r.se_mc),         fmt(r.se_mc_std),
        fmt(r.se_lower),   fmt(r.se_lower_upper), fmt(r.se_mid),
        fmt(r.se_mid_upper), fmt(r.se_peak),     fmt(r.se_peak_upper),
        fmt(r.gap_lower),  fmt(r.gap_mid),       fmt(r.gap_peak),
        row.skipped ? "0" : (r.chain_ok ? "1" : "0"),
        row.skipped ? "1" : "0",
        sanitize(row.skip_reason)};
    csv.row(cells);
}

const std::vector<std::string> kSeColumns = {
    "value",        "se_mc",         "se_mc_std",   "se_lower", "se_lower_upper",
    "se_mid",       "se_mid_upper",  "se_peak",     "se_peak_upper", "gap_lower",
    "gap_mid",      "gap_peak",      "chain_ok",    "skipped",  "reason"};

void run_pda_curve(const ExperimentConfig& c, const std::filesystem::path& dir,
                   FileList& files) {
    const auto& sweep = c.circuit;
    std::vector<double> phases, amps;
    CsvWriter csv(dir / "pda_curve.csv",
                  {"capacitance_f", "phase", "amplitude", "re", "im", "model_amplitude"});
    std::vector<std::array<double, 5>> rows;
    for (int i = 0; i < sweep.points; ++i) {
        CircuitParams p = sweep.circuit;
        p.capacitance = sweep.c_min + (sweep.c_max - sweep.c_min) *
                                          static_cast<double>(i) / (sweep.points - 1);
        const auto refl = circuit_reflection(p);
        const double phase = std::atan2(refl.imag(), refl.real());
        phases.push_back(phase);
        amps.push_back(std::abs(refl));
        rows.push_back({p.capacitance, phase, std::abs(refl), refl.real(), refl.imag()});
    }
    const PdaFit fit = fit_pda_to_circuit(phases, amps, c.pda);
    for (const auto& r : rows)
        csv.row({r[0], r[1], r[2], r[3], r[4], reflection_amplitude(r[1], fit.params)});
    files.push_back("pda_curve.csv");

    CsvWriter fit_csv(dir / "pda_fit.csv",
                      {"steepness", "floor", "offset", "max_abs_dev", "rms_dev"});
    fit_csv.row({fit.params.steepness, fit.params.floor_amplitude, fit.params.offset,
                 fit.max_abs_deviation, fit.rms_deviation});
    files.push_back("pda_fit.csv");

    // Amplitude families over the parameter ranges the model spans.
    CsvWriter fam(dir / "pda_families.csv", {"steepness", "floor", "offset", "phi", "amplitude"});
    const auto grid = linspace(-kPi, kPi, 257);
    for (double a : {1.0, 1.6, 2.0, 4.0})
        for (double b : {0.2, 0.5, 0.9}) {
            PdaParams p = c.pda;
            p.steepness = a;
            p.floor_amplitude = b;
            for (double phi : grid)
                fam.row({a, b, p.offset, phi, reflection_amplitude(phi, p)});
        }
    files.push_back("pda_families.csv");
}

void run_feasible_set(const ExperimentConfig& c, const std::filesystem::path& dir,
                      FileList& files) {
    CsvWriter csv(dir / "feasible_set.csv", {"variant", "phi", "re", "im"});
    const int res = 1024;
    auto emit = [&](const std::string& label, const NoiseSpec* noise) {
        const FeasibleSet fs = feasible_set(c.pda, noise, res);
        for (int i = 0; i < res; ++i) {
            const double phi = -kPi + 2.0 * kPi * i / res;
            csv.row({label, fmt(phi), fmt(fs.points[i][0]), fmt(fs.points[i][1])});
        }
        return fs.area;
    };
    CsvWriter areas(dir / "feasible_areas.csv", {"variant", "area"});
    areas.row({std::string("noiseless"), fmt(emit("noiseless", nullptr))});
    areas.row({std::string("configured-noise"), fmt(emit("configured-noise", &c.noise))});
    files.push_back("feasible_set.csv");
    files.push_back("feasible_areas.csv");

    // Area versus the PDA/PSE error coupling, at the configured noise level.
    CsvWriter vs_iota(dir / "feasible_areas_vs_iota.csv", {"iota", "area"});
    for (double iota : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        NoiseSpec n = c.noise;
        if (n.family == NoiseFamily::Composite) n.family = NoiseFamily::Uniform;
        if (n.family == NoiseFamily::Uniform && n.tau <= 0.0) n.tau = kPi / 4.0;
        n.iota = iota;
        n.pda_has_error = true;
        vs_iota.row({iota, feasible_set(c.pda, &n, 512).area});
    }
    files.push_back("feasible_areas_vs_iota.csv");
}

void run_rp_validate(const ExperimentConfig& c, PropId prop,
                     const std::filesystem::path& dir, FileList& files) {
    const PdaParams& pda = c.pda;
    const std::vector<double> phi_grid = {pda.phi_lower(), 0.0, kPi / 4.0, pda.offset,
                                          pda.phi_upper()};
    std::vector<double> taus, kappas;
    switch (prop) {
        case PropId::P31: case PropId::P33: case PropId::P35: case PropId::P37:
            taus = {0.0, kPi / 8.0, kPi / 4.0, 3.0 * kPi / 8.0, kPi / 2.0};
            kappas = {0.0};
            break;
        case PropId::P32: case PropId::P34: case PropId::P36: case PropId::P38:
            taus = {0.0};
            kappas = {1.0, 1.3, 1.6, 2.0, 5.0, 8.0};
            break;
        case PropId::P39:
            taus = {0.0, kPi / 8.0, kPi / 4.0};
            kappas = {1.6, 2.0, 5.0, 8.0};
            break;
        case PropId::P310:
            taus = {0.0, kPi / 8.0, kPi / 4.0};
            kappas = {1.0, 2.0, 5.0, 8.0};
            break;
    }

    const std::string name = "rp_validate_" + to_string(prop) + ".csv";
    CsvWriter csv(dir / name,
                  {"phi", "tau", "kappa", "gamma_closed", "gamma_closed_peak",
                   "gamma_oracle", "gamma_mc", "mc_std", "abs_err_closed"});
    const ReflectionCase rcase = case_for_prop(prop);
    const std::size_t mc_samples = std::max<std::size_t>(c.realizations * 40, 20000);
    std::size_t stream = 0;
    for (double tau : taus) {
        for (double kappa : kappas) {
            const NoiseSpec noise = noise_template_for_prop(prop, tau, kappa);
            for (double phi : phi_grid) {
                const auto closed = remaining_power_closed_form(prop, pda, noise, phi);
                const auto peak = remaining_power_closed_form_upper(prop, pda, noise);
                const auto oracle = remaining_power_oracle(rcase, pda, noise, phi);
                const auto mc = remaining_power_mc_pooled(
                    rcase, pda, noise, phi, mc_samples, c.seed.substream(7000 + stream));
                csv.row({phi, tau, kappa, closed.gamma, peak.gamma, oracle.gamma,
                         mc.gamma, mc.error_estimate,
                         std::abs(closed.gamma - oracle.gamma)});
                ++stream;
            }
        }
    }
    files.push_back(name);
}

void run_convergence(const ExperimentConfig& c, const std::filesystem::path& dir,
                     FileList& files) {
    CsvWriter csv(dir / "convergence.csv",
                  {"family", "tau", "kappa", "iota", "pixels", "gamma_m", "gamma_limit",
                   "gap", "std_error"});
    const std::vector<std::size_t> pixel_grid = {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
    const std::size_t realizations = std::min<std::size_t>(c.realizations, 200);
    std::size_t stream = 0;
    struct Setting { NoiseFamily family; double level; };
    const std::vector<Setting> settings = {
        {NoiseFamily::Uniform, kPi / 8.0}, {NoiseFamily::Uniform, kPi / 4.0},
        {NoiseFamily::Uniform, kPi / 2.0}, {NoiseFamily::VonMises, 1.0},
        {NoiseFamily::VonMises, 2.0},      {NoiseFamily::VonMises, 5.0}};
    for (const auto& s : settings) {
        for (double iota : {0.0, 1.0}) {
            NoiseSpec noise;
            noise.family = s.family;
            noise.tau = s.family == NoiseFamily::Uniform ? s.level : 0.0;
            noise.kappa = s.family == NoiseFamily::VonMises ? s.level : 0.0;
            noise.iota = iota;
            const auto rows = gamma_convergence_study(c.pda, noise, pixel_grid,
                                                      realizations,
                                                      c.seed.substream(50000 + stream));
            for (const auto& r : rows)
                csv.row({static_cast<double>(s.family == NoiseFamily::Uniform ? 0 : 1),
                         noise.tau, noise.kappa, iota, static_cast<double>(r.pixels),
                         r.gamma_m, r.gamma_limit, r.gap, r.std_error});
            stream += 100;
        }
    }
    files.push_back("convergence.csv");
}

void write_matrix(const std::filesystem::path& path, std::size_t side,
                  const std::vector<double>& values) {
    std::ofstream out(path);
    out << "# schema=1\n";
    for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t ccol = 0; ccol < side; ++ccol)
            out << fmt(values[r * side + ccol]) << (ccol + 1 < side ? "," : "\n");
    }
}

void run_fixed_ris(const ExperimentConfig& c, const std::filesystem::path& dir,
                   FileList& files) {
    const auto pixels = build_grid(c.scenario);
    const std::size_t side = c.scenario.grid_side();

    // Per-pixel geometry table.
    {
        CsvWriter csv(dir / "pixels.csv", {"m", "x", "y", "dist_ap", "dist_user", "phi",
                                           "amp_ap", "amp_user"});
        for (const auto& px : pixels)
            csv.row({static_cast<double>(px.index), px.position.x, px.position.y,
                     px.dist_ap, px.dist_user, px.designed_phase,
                     link_amplitude(px, c.scenario, LinkSide::Ap),
                     link_amplitude(px, c.scenario, LinkSide::User)});
        files.push_back("pixels.csv");
    }

    // Designed-phase histogram (32 bins) and heatmap.
    std::vector<std::size_t> phase_bins(32, 0);
    std::vector<double> phases(pixels.size()), gamma_proxy(pixels.size());
    for (const auto& px : pixels) {
        phases[px.index] = px.designed_phase;
        int b = static_cast<int>((px.designed_phase + kPi) / (2.0 * kPi) * 32.0);
        b = std::clamp(b, 0, 31);
        phase_bins[static_cast<std::size_t>(b)]++;
        const double amp = reflection_amplitude(px.designed_phase, c.pda);
        gamma_proxy[px.index] = amp * amp;
    }
    {
        CsvWriter csv(dir / "phase_histogram.csv", {"bin_lo", "bin_hi", "count"});
        for (int b = 0; b < 32; ++b)
            csv.row({-kPi + 2.0 * kPi * b / 32.0, -kPi + 2.0 * kPi * (b + 1) / 32.0,
                     static_cast<double>(phase_bins[b])});
        files.push_back("phase_histogram.csv");
    }
    write_matrix(dir / "phase_heatmap.csv", side, phases);
    files.push_back("phase_heatmap.csv");

    // Error-free per-pixel remaining-power proxy amp(phi)^2 (U-shaped).
    {
        const double b2 = c.pda.floor_amplitude * c.pda.floor_amplitude;
        std::vector<std::size_t> bins(10, 0);
        for (double g : gamma_proxy) {
            int b = static_cast<int>((g - b2) / (1.0 - b2) * 10.0);
            bins[static_cast<std::size_t>(std::clamp(b, 0, 9))]++;
        }
        CsvWriter csv(dir / "gamma_proxy_histogram.csv", {"bin_lo", "bin_hi", "count"});
        for (int i = 0; i < 10; ++i)
            csv.row({b2 + (1.0 - b2) * i / 10.0, b2 + (1.0 - b2) * (i + 1) / 10.0,
                     static_cast<double>(bins[i])});
        files.push_back("gamma_proxy_histogram.csv");
    }

    // Per-pixel closed-form remaining power under the configured noise.
    if (c.prop) {
        std::vector<double> g(pixels.size());
        for (const auto& px : pixels)
            g[px.index] =
                remaining_power_closed_form(*c.prop, c.pda, c.noise, px.designed_phase)
                    .gamma;
        write_matrix(dir / "gamma_heatmap.csv", side, g);
        files.push_back("gamma_heatmap.csv");

        CsvWriter pdf(dir / "gamma_pdf_vs_noise.csv", {"tau", "kappa", "bin_lo", "bin_hi", "count"});
        std::vector<NoiseSpec> levels;
        if (c.noise.family == NoiseFamily::VonMises) {
            for (double kap : {2.0, 5.0, 8.0}) {
                NoiseSpec n = c.noise;
                n.kappa = kap;
                n.tau = 0.0;  // not part of this family
                levels.push_back(n);
            }
        } else {
            for (double tau : {kPi / 8.0, kPi / 4.0, kPi / 2.0}) {
                NoiseSpec n = c.noise;
                n.tau = tau;
                if (n.family == NoiseFamily::Uniform) n.kappa = 0.0;
                levels.push_back(n);
            }
        }
        for (const auto& n : levels) {
            std::vector<std::size_t> bins(32, 0);
            for (const auto& px : pixels) {
                const double g1 =
                    remaining_power_closed_form(*c.prop, c.pda, n, px.designed_phase).gamma;
                bins[static_cast<std::size_t>(
                    std::clamp(static_cast<int>(g1 * 32.0), 0, 31))]++;
            }
            for (int i = 0; i < 32; ++i)
                pdf.row({n.tau, n.kappa, i / 32.0, (i + 1) / 32.0,
                         static_cast<double>(bins[i])});
        }
        files.push_back("gamma_pdf_vs_noise.csv");
    }

    // Bound chain and Monte Carlo at the configured pitch, then the pitch sweep.
    SeChainOptions opt;
    opt.mc_realizations = c.realizations;
    opt.seed = c.seed.substream(900000);
    {
        CsvWriter csv(dir / "se_point.csv", kSeColumns);
        SweepRow row;
        row.value = c.scenario.pitch_x;
        row.report = se_chain(c.scenario, c.pda, c.noise, c.prop, opt);
        write_se_rows(csv, row.value, row);
        files.push_back("se_point.csv");
    }
    {
        const double lam = c.scenario.wavelength();
        const std::vector<double> pitches = {lam / 2.0, lam / 4.0, lam / 8.0, lam / 16.0};
        const auto rows = se_sweep(c.scenario, c.pda, c.noise, c.prop, SweepAxis::Pitch,
                                   pitches, opt);
        CsvWriter csv(dir / "se_vs_pitch.csv", kSeColumns);
        for (const auto& r : rows) write_se_rows(csv, r.value / lam, r);
        files.push_back("se_vs_pitch.csv");
    }
}

void run_move_x(const ExperimentConfig& c, const std::filesystem::path& dir,
                FileList& files) {
    std::vector<double> grid = c.sweep_grid;
    if (grid.empty()) grid = linspace(-8.0, 8.0, 17);
    SeChainOptions opt;
    opt.mc_realizations = c.realizations;
    opt.seed = c.seed.substream(910000);
    const auto rows =
        se_sweep(c.scenario, c.pda, c.noise, c.prop, SweepAxis::RisX, grid, opt);
    CsvWriter csv(dir / "move_x.csv", kSeColumns);
    for (const auto& r : rows) write_se_rows(csv, r.value, r);
    files.push_back("move_x.csv");

    // Phase field at the sweep end, for the displaced-pattern comparison.
    Scenario sc = c.scenario;
    sc.ris_center.x = grid.back();
    const auto pixels = build_grid(sc);
    std::vector<double> phases(pixels.size());
    for (const auto& px : pixels) phases[px.index] = px.designed_phase;
    write_matrix(dir / "phase_heatmap_x_end.csv", sc.grid_side(), phases);
    files.push_back("phase_heatmap_x_end.csv");
}

void run_move_z(const ExperimentConfig& c, const std::filesystem::path& dir,
                FileList& files) {
    std::vector<double> grid = c.sweep_grid;
    if (grid.empty()) grid = linspace(-20.0, 5.0, 11);
    SeChainOptions opt;
    opt.mc_realizations = c.realizations;
    opt.seed = c.seed.substream(920000);
    for (PixelPattern pattern : {PixelPattern::Cosine, PixelPattern::Isotropic}) {
        Scenario sc = c.scenario;
        sc.pattern = pattern;
        const auto rows = se_sweep(sc, c.pda, c.noise, c.prop, SweepAxis::RisZ, grid, opt);
        const std::string name = pattern == PixelPattern::Cosine ? "move_z_cosine.csv"
                                                                 : "move_z_isotropic.csv";
        CsvWriter csv(dir / name, kSeColumns);
        for (const auto& r : rows) write_se_rows(csv, r.value, r);
        files.push_back(name);
    }
}

void run_param_sweep(const ExperimentConfig& c, const std::filesystem::path& dir,
                     FileList& files) {
    std::vector<double> grid = c.sweep_grid;
    if (grid.empty()) {
        const double lam = c.scenario.wavelength();
        switch (c.sweep_axis) {
            case SweepAxis::RisX: grid = linspace(-8.0, 8.0, 17); break;
            case SweepAxis::RisZ: grid = linspace(-20.0, 5.0, 11); break;
            case SweepAxis::Pitch: grid = {lam / 2, lam / 4, lam / 8, lam / 16}; break;
            case SweepAxis::Iota: grid = {0.0, 0.25, 0.5, 0.75, 1.0}; break;
            case SweepAxis::Steepness: grid = {1.0, 1.5, 2.0, 3.0}; break;
            case SweepAxis::Floor: grid = linspace(0.1, 0.9, 9); break;
            case SweepAxis::Offset: grid = {0.2 * kPi, 0.3 * kPi, 0.43 * kPi, 0.5 * kPi}; break;
            case SweepAxis::Tau: grid = linspace(0.0, kPi / 2.0, 9); break;
            case SweepAxis::Kappa: grid = {1.0, 2.0, 3.0, 5.0, 8.0}; break;
        }
    }
    SeChainOptions opt;
    opt.seed = c.seed.substream(930000);
    const auto rows =
        se_sweep(c.scenario, c.pda, c.noise, c.prop, c.sweep_axis, grid, opt);
    const std::string name = "sweep_" + to_string(c.sweep_axis) + ".csv";
    CsvWriter csv(dir / name, kSeColumns);
    for (const auto& r : rows) write_se_rows(csv, r.value, r);
    files.push_back(name);
}

void run_paper_figs(const ExperimentConfig& c, const std::filesystem::path& dir,
                    FileList& files) {
    run_pda_curve(c, dir, files);
    run_feasible_set(c, dir, files);
    for (PropId prop :
         {PropId::P31, PropId::P32, PropId::P33, PropId::P34, PropId::P35, PropId::P36,
          PropId::P37, PropId::P38, PropId::P39, PropId::P310})
        run_rp_validate(c, prop, dir, files);
    run_convergence(c, dir, files);
    run_fixed_ris(c, dir, files);
    run_move_x(c, dir, files);
    run_move_z(c, dir, files);
    ExperimentConfig iota_cfg = c;
    iota_cfg.sweep_axis = SweepAxis::Iota;
    iota_cfg.sweep_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    run_param_sweep(iota_cfg, dir, files);
}

}  // namespace

// ---- public API ------------------------------------------------------------

std::optional<ExperimentKind> experiment_from_string(const std::string& name) {
    if (name == "pda-curve") return ExperimentKind::PdaCurve;
    if (name == "feasible-set") return ExperimentKind::FeasibleSet;
    if (name == "rp-validate" || name == "rp") return ExperimentKind::RpValidate;
    if (name == "converge" || name == "convergence") return ExperimentKind::Convergence;
    if (name == "fixed-ris" || name == "channel") return ExperimentKind::FixedRis;
    if (name == "move-x") return ExperimentKind::MoveX;
    if (name == "move-z") return ExperimentKind::MoveZ;
    if (name == "param-sweep" || name == "sweep") return ExperimentKind::ParamSweep;
    if (name == "paper-figs") return ExperimentKind::PaperFigs;
    return std::nullopt;
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::PdaCurve: return "pda-curve";
        case ExperimentKind::FeasibleSet: return "feasible-set";
        case ExperimentKind::RpValidate: return "rp-validate";
        case ExperimentKind::Convergence: return "convergence";
        case ExperimentKind::FixedRis: return "fixed-ris";
        case ExperimentKind::MoveX: return "move-x";
        case ExperimentKind::MoveZ: return "move-z";
        case ExperimentKind::ParamSweep: return "param-sweep";
        case ExperimentKind::PaperFigs: return "paper-figs";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    std::string problems;
    auto add = [&problems](const std::string& msg) {
        if (!problems.empty()) problems += "; ";
        problems += msg;
    };
    try {
        scenario.validate();
    } catch (const std::exception& e) {
        add(e.what());
    }
    try {
        pda.validate();
    } catch (const std::exception& e) {
        add(e.what());
    }
    try {
        noise.validate();
    } catch (const std::exception& e) {
        add(e.what());
    }
    try {
        circuit.circuit.validate();
    } catch (const std::exception& e) {
        add(e.what());
    }
    if (!(circuit.c_min > 0.0 && circuit.c_max > circuit.c_min))
        add("circuit sweep range must satisfy 0 < c_min < c_max");
    if (circuit.points < 2) add("circuit sweep needs at least 2 points");
    if (realizations == 0) add("realizations must be >= 1");
    if (!problems.empty()) throw std::invalid_argument("config invalid: " + problems);
}

ExperimentConfig default_paper_config() {
    ExperimentConfig c;
    c.scenario.ap_pos = {-20.0, 15.0, 8.0};
    c.scenario.user_pos = {20.0, 1.5, 8.0};
    c.scenario.ris_center = {0.0, 10.0, 0.0};
    c.scenario.carrier_hz = 2.4e9;
    c.scenario.pixel_count = 200 * 200;
    c.scenario.pitch_x = c.scenario.pitch_y = c.scenario.wavelength() / 2.0;
    c.scenario.tx_power_w = dbm_to_watt(20.0);
    c.scenario.noise_power_w = dbm_to_watt(-80.0);
    c.pda = PdaParams{1.0, 0.2, 0.43 * kPi};
    c.noise.family = NoiseFamily::Composite;
    c.noise.tau = kPi / 8.0;
    c.noise.kappa = 8.0;
    c.noise.iota = 0.0;
    c.noise.pda_has_error = true;
    c.prop = PropId::P310;
    c.realizations = 5000;
    return c;
}

ExperimentConfig desk_scale(ExperimentConfig c) {
    c.scenario.pixel_count = 50 * 50;
    c.scenario.pitch_x = c.scenario.pitch_y = 1.9 * c.scenario.wavelength();
    c.realizations = 500;
    return c;
}

ExperimentConfig load_config_text(const std::string& json_text) {
    json root = json::parse(json_text);
    expand_flat_keys(root);
    ExperimentConfig c = default_paper_config();
    apply_json(c, root);
    return c;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return load_config_text(ss.str());
}

std::string config_canonical_json(const ExperimentConfig& config) {
    return to_json(config).dump();
}

std::string config_hash(const ExperimentConfig& config) {
    return hex64(fnv1a(config_canonical_json(config)));
}

RunManifest run(const ExperimentConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    std::filesystem::create_directories(config.output_dir);

    RunManifest manifest;
    manifest.config_hash = config_hash(config);
    switch (config.kind) {
        case ExperimentKind::PdaCurve:
            run_pda_curve(config, config.output_dir, manifest.files);
            break;
        case ExperimentKind::FeasibleSet:
            run_feasible_set(config, config.output_dir, manifest.files);
            break;
        case ExperimentKind::RpValidate:
            if (config.prop) {
                run_rp_validate(config, *config.prop, config.output_dir, manifest.files);
            } else {
                for (PropId prop : {PropId::P31, PropId::P32, PropId::P33, PropId::P34,
                                    PropId::P35, PropId::P36, PropId::P37, PropId::P38,
                                    PropId::P39, PropId::P310})
                    run_rp_validate(config, prop, config.output_dir, manifest.files);
            }
            break;
        case ExperimentKind::Convergence:
            run_convergence(config, config.output_dir, manifest.files);
            break;
        case ExperimentKind::FixedRis:
            run_fixed_ris(config, config.output_dir, manifest.files);
            break;
        case ExperimentKind::MoveX:
            run_move_x(config, config.output_dir, manifest.files);
            break;
        case ExperimentKind::MoveZ:
            run_move_z(config, config.output_dir, manifest.files);
            break;
        case ExperimentKind::ParamSweep:
            run_param_sweep(config, config.output_dir, manifest.files);
            break;
        case ExperimentKind::PaperFigs:
            run_paper_figs(config, config.output_dir, manifest.files);
            break;
    }

    const auto stop = std::chrono::steady_clock::now();
    manifest.wall_time_s = std::chrono::duration<double>(stop - start).count();

    json j;
    j["schema"] = 1;
    j["config_hash"] = manifest.config_hash;
    j["git_describe"] = kGitDescribe;
    j["seed"] = config.seed.master_seed;
    j["wall_time_s"] = manifest.wall_time_s;
    j["files"] = manifest.files;
    j["config"] = to_json(config);
    std::ofstream out(config.output_dir / "manifest.json");
    out << j.dump(2) << "\n";
    return manifest;
}

}  // namespace ris
