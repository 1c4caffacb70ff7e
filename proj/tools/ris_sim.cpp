// ris-sim: near-field RIS remaining-power and spectral-efficiency simulator.
//
// Subcommands map onto the experiment kinds; every run writes CSV tables plus
// a manifest.json into --out. See README.md for the config schema.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "ris/experiment.hpp"

namespace {

struct CommonArgs {
    std::string config_file;
    std::string out_dir;
    long long seed = -1;
    bool desk = false;
    bool full = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_file, "JSON config file");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "master seed");
    cmd->add_flag("--desk", args.desk, "desk-scale geometry (50^2 pixels)");
    cmd->add_flag("--full", args.full, "paper-scale geometry (200^2 pixels)");
}

ris::ExperimentConfig make_config(const CommonArgs& args, bool desk_default) {
    ris::ExperimentConfig cfg;
    if (!args.config_file.empty()) {
        cfg = ris::load_config_file(args.config_file);
    } else {
        cfg = ris::default_paper_config();
        if (desk_default) cfg = ris::desk_scale(cfg);
    }
    if (args.desk) cfg = ris::desk_scale(cfg);
    if (args.full) {
        const auto keep_kind = cfg.kind;
        auto paper = ris::default_paper_config();
        paper.kind = keep_kind;
        paper.seed = cfg.seed;
        paper.output_dir = cfg.output_dir;
        cfg = paper;
    }
    if (args.seed >= 0) cfg.seed.master_seed = static_cast<std::uint64_t>(args.seed);
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    return cfg;
}

int execute(ris::ExperimentConfig cfg) {
    const auto manifest = ris::run(cfg);
    std::printf("wrote %zu file(s) to %s (config %s, %.2f s)\n", manifest.files.size(),
                cfg.output_dir.string().c_str(), manifest.config_hash.c_str(),
                manifest.wall_time_s);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"near-field RIS pixel-noise and spectral-efficiency simulator"};
    app.require_subcommand(1);

    CommonArgs pda_args, feas_args, rp_args, conv_args, chan_args, se_args, sweep_args,
        figs_args;

    auto* pda_cmd = app.add_subcommand("pda-curve", "circuit sweep and amplitude model fit");
    add_common(pda_cmd, pda_args);

    auto* feas_cmd =
        app.add_subcommand("feasible-set", "reflection-coefficient loci and areas");
    add_common(feas_cmd, feas_args);

    auto* rp_cmd = app.add_subcommand(
        "rp", "remaining power: closed forms vs oracle vs Monte Carlo");
    add_common(rp_cmd, rp_args);
    std::string rp_prop, rp_case, rp_family;
    double rp_phi = 0.0, rp_tau = -1.0, rp_kappa = -1.0, rp_iota = -1.0;
    long long rp_pixels = -1, rp_realizations = -1;
    rp_cmd->add_option("--prop", rp_prop, "closed form to validate (3.1 .. 3.10)");
    rp_cmd->add_option("--case", rp_case,
                       "reflection regime: constant|error-free|single-error|dual-error");
    rp_cmd->add_option("--family", rp_family, "noise family: uniform|von-mises|composite");
    rp_cmd->add_option("--phi", rp_phi, "designed phase (radians)");
    rp_cmd->add_option("--tau", rp_tau, "uniform half-width (radians)");
    rp_cmd->add_option("--kappa", rp_kappa, "von Mises concentration");
    rp_cmd->add_option("--iota", rp_iota, "PDA/PSE error correlation");
    rp_cmd->add_option("--pixels", rp_pixels, "Monte Carlo pixel count");
    rp_cmd->add_option("--realizations", rp_realizations, "Monte Carlo realizations");

    auto* conv_cmd =
        app.add_subcommand("converge", "finite-M convergence to the analytic limit");
    add_common(conv_cmd, conv_args);

    auto* chan_cmd = app.add_subcommand(
        "channel", "fixed-deployment channel: phase/remaining-power fields");
    add_common(chan_cmd, chan_args);

    auto* se_cmd = app.add_subcommand("se", "spectral-efficiency bound chain");
    add_common(se_cmd, se_args);
    std::string se_prop, se_pattern;
    se_cmd->add_option("--prop", se_prop, "closed form for Gamma (3.3 .. 3.10)");
    se_cmd->add_option("--pattern", se_pattern, "pixel pattern: cosine|isotropic");

    auto* sweep_cmd = app.add_subcommand("sweep", "bound chain along a parameter axis");
    add_common(sweep_cmd, sweep_args);
    std::string sweep_axis = "x_ris";
    double sweep_from = 0.0, sweep_to = 0.0;
    int sweep_points = 0;
    sweep_cmd->add_option("--axis", sweep_axis,
                          "x_ris|z_ris|pitch|iota|a|b|c|tau|kappa");
    sweep_cmd->add_option("--from", sweep_from, "grid start");
    sweep_cmd->add_option("--to", sweep_to, "grid end");
    sweep_cmd->add_option("--points", sweep_points, "grid size");

    auto* figs_cmd = app.add_subcommand(
        "paper-figs", "full evaluation suite (desk scale unless --full)");
    add_common(figs_cmd, figs_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (pda_cmd->parsed()) {
            auto cfg = make_config(pda_args, true);
            cfg.kind = ris::ExperimentKind::PdaCurve;
            return execute(cfg);
        }
        if (feas_cmd->parsed()) {
            auto cfg = make_config(feas_args, true);
            cfg.kind = ris::ExperimentKind::FeasibleSet;
            return execute(cfg);
        }
        if (rp_cmd->parsed()) {
            auto cfg = make_config(rp_args, true);
            cfg.kind = ris::ExperimentKind::RpValidate;
            if (!rp_prop.empty()) {
                const auto prop = ris::prop_from_string(rp_prop);
                if (!prop) {
                    std::fprintf(stderr, "unknown closed-form id: %s\n", rp_prop.c_str());
                    return 2;
                }
                cfg.prop = prop;
            }
            if (!rp_family.empty()) {
                if (rp_family == "uniform") cfg.noise.family = ris::NoiseFamily::Uniform;
                else if (rp_family == "von-mises") cfg.noise.family = ris::NoiseFamily::VonMises;
                else if (rp_family == "composite") cfg.noise.family = ris::NoiseFamily::Composite;
                else {
                    std::fprintf(stderr, "unknown family: %s\n", rp_family.c_str());
                    return 2;
                }
            }
            if (rp_tau >= 0.0) cfg.noise.tau = rp_tau;
            if (rp_kappa >= 0.0) cfg.noise.kappa = rp_kappa;
            if (rp_iota >= 0.0) cfg.noise.iota = rp_iota;
            if (rp_realizations > 0) cfg.realizations = static_cast<std::size_t>(rp_realizations);

            // One-off point query (no CSV) when an explicit regime is given.
            if (!rp_case.empty()) {
                ris::ReflectionCase rcase;
                if (rp_case == "constant") rcase = ris::ReflectionCase::constant(1.0);
                else if (rp_case == "error-free") rcase = ris::ReflectionCase::error_free();
                else if (rp_case == "single-error") rcase = ris::ReflectionCase::single_error();
                else if (rp_case == "dual-error") rcase = ris::ReflectionCase::dual_error();
                else {
                    std::fprintf(stderr, "unknown case: %s\n", rp_case.c_str());
                    return 2;
                }
                const std::size_t pixels =
                    rp_pixels > 0 ? static_cast<std::size_t>(rp_pixels) : 1000;
                const auto mc = ris::remaining_power_mc(rcase, cfg.pda, cfg.noise, rp_phi,
                                                        pixels, cfg.realizations, cfg.seed);
                const auto oracle =
                    ris::remaining_power_oracle(rcase, cfg.pda, cfg.noise, rp_phi);
                std::printf("gamma_mc=%.8f (+/- %.2e)  gamma_oracle=%.8f\n", mc.gamma,
                            mc.error_estimate, oracle.gamma);
                if (cfg.prop) {
                    const auto closed = ris::remaining_power_closed_form(
                        *cfg.prop, cfg.pda, cfg.noise, rp_phi);
                    std::printf("gamma_closed[%s]=%.8f\n",
                                ris::to_string(*cfg.prop).c_str(), closed.gamma);
                }
                return 0;
            }
            return execute(cfg);
        }
        if (conv_cmd->parsed()) {
            auto cfg = make_config(conv_args, true);
            cfg.kind = ris::ExperimentKind::Convergence;
            return execute(cfg);
        }
        if (chan_cmd->parsed()) {
            auto cfg = make_config(chan_args, true);
            cfg.kind = ris::ExperimentKind::FixedRis;
            return execute(cfg);
        }
        if (se_cmd->parsed()) {
            auto cfg = make_config(se_args, true);
            cfg.kind = ris::ExperimentKind::FixedRis;
            if (!se_prop.empty()) {
                const auto prop = ris::prop_from_string(se_prop);
                if (!prop) {
                    std::fprintf(stderr, "unknown closed-form id: %s\n", se_prop.c_str());
                    return 2;
                }
                cfg.prop = prop;
                // align the noise regime with the selected closed form,
                // keeping the configured error levels
                cfg.noise =
                    ris::noise_template_for_prop(*prop, cfg.noise.tau, cfg.noise.kappa);
            }
            if (se_pattern == "isotropic") cfg.scenario.pattern = ris::PixelPattern::Isotropic;
            return execute(cfg);
        }
        if (sweep_cmd->parsed()) {
            auto cfg = make_config(sweep_args, true);
            cfg.kind = ris::ExperimentKind::ParamSweep;
            if (sweep_cmd->count("--axis") > 0) {
                const auto axis = ris::sweep_axis_from_string(sweep_axis);
                if (!axis) {
                    std::fprintf(stderr, "unknown sweep axis: %s\n", sweep_axis.c_str());
                    return 2;
                }
                // a grid loaded for a different axis would be nonsense here
                if (*axis != cfg.sweep_axis) cfg.sweep_grid.clear();
                cfg.sweep_axis = *axis;
            }
            if (sweep_points > 0) {
                cfg.sweep_grid.clear();
                for (int i = 0; i < sweep_points; ++i)
                    cfg.sweep_grid.push_back(
                        sweep_points == 1
                            ? sweep_from
                            : sweep_from + (sweep_to - sweep_from) * i / (sweep_points - 1));
            }
            return execute(cfg);
        }
        if (figs_cmd->parsed()) {
            auto cfg = make_config(figs_args, true);
            cfg.kind = ris::ExperimentKind::PaperFigs;
            return execute(cfg);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
