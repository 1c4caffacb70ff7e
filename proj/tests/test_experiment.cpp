#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ris/experiment.hpp"

using namespace ris;
namespace fs = std::filesystem;

namespace {
constexpr double kPi = std::numbers::pi;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ris_test_" + name);
    fs::remove_all(dir);
    return dir;
}
}  // namespace

TEST_CASE("defaults carry the fixed evaluation setup") {
    const auto cfg = default_paper_config();
    CHECK(cfg.scenario.carrier_hz == 2.4e9);
    CHECK(cfg.scenario.ris_center.y == 10.0);
    CHECK(cfg.scenario.pixel_count == 40000);
    CHECK(cfg.scenario.tx_power_w == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(cfg.scenario.noise_power_w == doctest::Approx(1e-11).epsilon(1e-12));
    CHECK(cfg.realizations == 5000);
    CHECK(cfg.pda.offset == doctest::Approx(0.43 * kPi));
    const auto desk = desk_scale(cfg);
    CHECK(desk.scenario.pixel_count == 2500);
    CHECK(desk.realizations == 500);
}

TEST_CASE("config loading accepts nested and flat keys, dBm and pi units") {
    const std::string text = R"({
        "scale": "desk",
        "scenario": {"pixels": 400, "tx_power_dbm": 10, "pattern": "isotropic"},
        "noise": {"family": "uniform", "tau_pi": 0.25, "iota": 1.0},
        "pda.floor": 0.3,
        "experiment": {"kind": "move-x", "grid": {"from": -2, "to": 2, "points": 5}},
        "seed": 77
    })";
    const auto cfg = load_config_text(text);
    CHECK(cfg.scenario.pixel_count == 400);
    CHECK(cfg.scenario.tx_power_w == doctest::Approx(0.01));
    CHECK(cfg.scenario.pattern == PixelPattern::Isotropic);
    CHECK(cfg.noise.family == NoiseFamily::Uniform);
    CHECK(cfg.noise.tau == doctest::Approx(kPi / 4.0));
    CHECK(cfg.pda.floor_amplitude == 0.3);
    CHECK(cfg.kind == ExperimentKind::MoveX);
    CHECK(cfg.sweep_grid.size() == 5);
    CHECK(cfg.sweep_grid.front() == -2.0);
    CHECK(cfg.seed.master_seed == 77);
    CHECK_THROWS(load_config_text(R"({"noise": {"family": "bogus"}})"));
}

TEST_CASE("config hash tracks semantic changes only") {
    auto a = default_paper_config();
    auto b = a;
    CHECK(config_hash(a) == config_hash(b));
    b.noise.kappa += 1.0;
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.output_dir = "elsewhere";  // not semantic
    CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("validation aggregates every offending field") {
    auto cfg = default_paper_config();
    cfg.scenario.pixel_count = 7;
    cfg.pda.floor_amplitude = 2.0;
    cfg.noise.iota = 3.0;
    try {
        cfg.validate();
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("perfect square") != std::string::npos);
        CHECK(msg.find("floor_amplitude") != std::string::npos);
        CHECK(msg.find("iota") != std::string::npos);
    }
}

TEST_CASE("runs are reproducible byte for byte") {
    auto cfg = desk_scale(default_paper_config());
    cfg.kind = ExperimentKind::MoveX;
    cfg.scenario.pixel_count = 16 * 16;
    cfg.realizations = 20;
    cfg.sweep_grid = {-4.0, 0.0, 4.0};
    cfg.seed.master_seed = 31337;

    const fs::path d1 = temp_dir("rerun_a");
    const fs::path d2 = temp_dir("rerun_b");
    cfg.output_dir = d1;
    const auto m1 = run(cfg);
    cfg.output_dir = d2;
    const auto m2 = run(cfg);
    REQUIRE(m1.files == m2.files);
    CHECK(m1.config_hash == m2.config_hash);
    for (const auto& f : m1.files) {
        CHECK(slurp(d1 / f) == slurp(d2 / f));
        CHECK(!slurp(d1 / f).empty());
    }
    // manifest exists and names every file
    const std::string manifest = slurp(d1 / "manifest.json");
    for (const auto& f : m1.files) CHECK(manifest.find(f) != std::string::npos);
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("fixed-deployment experiment with a von Mises regime") {
    auto cfg = desk_scale(default_paper_config());
    cfg.kind = ExperimentKind::FixedRis;
    cfg.scenario.pixel_count = 16 * 16;
    cfg.realizations = 10;
    cfg.noise.family = NoiseFamily::VonMises;
    cfg.noise.kappa = 8.0;
    cfg.noise.iota = 0.0;
    cfg.prop = PropId::P38;
    const fs::path dir = temp_dir("fixed_vm");
    cfg.output_dir = dir;
    const auto manifest = run(cfg);
    for (const char* name : {"pixels.csv", "phase_histogram.csv", "gamma_heatmap.csv",
                             "gamma_pdf_vs_noise.csv", "se_vs_pitch.csv"})
        CHECK(std::find(manifest.files.begin(), manifest.files.end(), name) !=
              manifest.files.end());
    // the concentration sweep, not the half-width sweep, varies in the pdf file
    const std::string pdf = slurp(dir / "gamma_pdf_vs_noise.csv");
    CHECK(pdf.find("\n") != std::string::npos);
    std::istringstream ss(pdf);
    std::string line;
    std::getline(ss, line);  // schema
    std::getline(ss, line);  // header
    std::getline(ss, line);  // first row: tau,kappa,...
    CHECK(line.substr(0, 2) == "0,");
    fs::remove_all(dir);
}

TEST_CASE("pda-curve experiment emits the circuit sweep with a tight model fit") {
    auto cfg = desk_scale(default_paper_config());
    cfg.kind = ExperimentKind::PdaCurve;
    const fs::path dir = temp_dir("pda_curve");
    cfg.output_dir = dir;
    run(cfg);
    const std::string fit = slurp(dir / "pda_fit.csv");
    // schema line, header, then one row: steepness, floor, offset, max_dev, rms
    std::istringstream ss(fit);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "# schema=1");
    std::getline(ss, line);
    std::getline(ss, line);
    const auto last_comma = line.rfind(',');
    const double rms = std::stod(line.substr(last_comma + 1));
    CHECK(rms < 0.05);
    fs::remove_all(dir);
}
