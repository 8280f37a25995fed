#pragma once

// Experiment configuration: a JSON document validated against a fixed schema.

#include "rqrc/cqed_drive.hpp"
#include "rqrc/datasets.hpp"
#include "rqrc/reservoir.hpp"

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace rqrc {

inline constexpr const char* kArtifactVersion = "rqrc-1.0.0";

struct DatasetSection {
    std::size_t n_train = 4000;
    std::size_t n_test = 1000;
    double turns = 1.5;
    double radius = 1.0;
    double noise_sd = 0.02;
};

struct EncodingSection {
    double a0 = 3.0;
    double delta_a_ratio = 0.1;
    double T = 2.0;
    int m = 4;
    /// Training bounding box is widened by this fraction of its span per side.
    double input_margin = 0.05;
};

struct ModesSection {
    int n_modes = 10;
    bool single_mode = false;
    double Omega = 1.0;
    double lambda = 0.1;
    int coherent_mode = 3;
    double alpha_re = 0.0;
    double alpha_im = 10.0;
};

struct ReservoirSection {
    double delta_T = 0.0;  ///< 0 selects T/2
    int steps_per_period = 200;
    int fock_cutoff = 180;
};

struct LearningSection {
    double l = 1e-6;
    bool standardize = false;
    int spectrum_highlight = 40;
};

struct SweepSection {
    std::vector<double> T{2.0};
    std::vector<double> a0{3.0};
    std::vector<int> m{4};
    std::vector<Kinematics> kinematics{Kinematics::relativistic, Kinematics::newtonian};
};

struct SeedSection {
    std::uint64_t dataset = 1;
    std::uint64_t split = 2;
};

struct DriveSection {
    DriveParams params = DriveParams::circuit_qed_example();
    /// Simulated profile in units of Omega: one encoded feature at a0 (1 + delta_a_ratio).
    double a0 = 2.0;
    double delta_a_ratio = 0.1;
    double T = 2.0;
    int m = 1;
    /// Encoded input in [0, 1]; 1 gives the largest acceleration a0 (1 + delta_a_ratio).
    double input = 1.0;
    int samples_per_period = 40;
};

struct ExperimentConfig {
    DatasetSection dataset;
    EncodingSection encoding;
    ModesSection modes;
    Kinematics kinematics = Kinematics::relativistic;
    Engine engine = Engine::gaussian;
    ReservoirSection reservoir;
    LearningSection learning;
    SweepSection sweep;
    SeedSection seeds;
    DriveSection drive;
    int workers = 1;
    std::string output_dir = "out";
    bool cache = true;

    /// Throws ConfigError on unknown keys, wrong types or invalid values.
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::filesystem::path& path);

    /// Fully resolved document (every default expanded).
    nlohmann::json to_json() const;

    /// Semantic checks shared by every command.
    void validate() const;

    ModeSet mode_set() const;
    SpiralParams spiral_params() const;
};

std::string to_string(Kinematics k);
Kinematics parse_kinematics(const std::string& s);
std::string to_string(Engine e);
Engine parse_engine(const std::string& s);

/// 64-bit FNV-1a, hex encoded; stable across platforms.
std::string stable_hash(std::string_view bytes);

/// Hash of the resolved configuration, without output_dir, workers and cache.
std::string config_hash(const ExperimentConfig& cfg);

nlohmann::json to_json(const ReservoirConfig& cfg);

}  // namespace rqrc
