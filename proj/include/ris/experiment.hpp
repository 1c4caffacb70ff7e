#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ris/nf_channel.hpp"
#include "ris/pda.hpp"
#include "ris/se_bounds.hpp"

namespace ris {

enum class ExperimentKind {
    PdaCurve,
    FeasibleSet,
    RpValidate,
    Convergence,
    FixedRis,
    MoveX,
    MoveZ,
    ParamSweep,
    PaperFigs,
};
std::optional<ExperimentKind> experiment_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);

// Capacitance sweep bounds for the circuit-model curve.
struct CircuitSweep {
    CircuitParams circuit;
    double c_min = 0.47e-12;
    double c_max = 2.35e-12;
    int points = 201;
};

struct ExperimentConfig {
    Scenario scenario;
    PdaParams pda;
    NoiseSpec noise;
    CircuitSweep circuit;
    ExperimentKind kind = ExperimentKind::PaperFigs;
    std::optional<PropId> prop;  // remaining-power closed form for SE chains
    SweepAxis sweep_axis = SweepAxis::RisX;
    std::vector<double> sweep_grid;
    std::size_t realizations = 5000;
    SeedSpec seed{20240101, 0};
    std::filesystem::path output_dir = "out";

    // Collects every invalid field into one std::invalid_argument message.
    void validate() const;
};

// The fixed evaluation setup: terminals at [-20,15,8] / [20,1.5,8], array
// center [0,10,0], 200^2 pixels at half-wavelength pitch, 2.4 GHz, 20 dBm
// transmit power, -80 dBm noise, amplitude model (1, 0.2, 0.43 pi),
// composite noise tau=pi/8, kappa=8, iota=0, 5000 realizations.
ExperimentConfig default_paper_config();

// Same setup scaled for quick runs: 50^2 pixels at 1.9-wavelength pitch
// (preserving the physical aperture, which the phase-uniformity statistics
// need) and 500 realizations.
ExperimentConfig desk_scale(ExperimentConfig config);

// JSON config loading; accepts nested objects and dotted flat keys.
ExperimentConfig load_config_text(const std::string& json_text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

// Canonical serialized form used for hashing and the manifest.
std::string config_canonical_json(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

struct RunManifest {
    std::string config_hash;
    std::vector<std::string> files;  // relative to output_dir
    double wall_time_s = 0.0;
};

// Executes the configured experiment, writing schema-versioned CSVs and a
// JSON manifest into output_dir. Re-running with the same config and seed
// reproduces every CSV byte for byte.
RunManifest run(const ExperimentConfig& config);

}  // namespace ris
