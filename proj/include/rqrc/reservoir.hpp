#pragma once

// Input -> acceleration profile -> detector dynamics -> measured feature vector.

#include "rqrc/dense_engine.hpp"
#include "rqrc/encoding.hpp"
#include "rqrc/gaussian_engine.hpp"

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace rqrc {

enum class Engine { gaussian, dense_qubit };

struct ReservoirConfig {
    EncodingConfig encoding;
    ModeSet modes = ModeSet::cavity(10);
    Kinematics kinematics = Kinematics::relativistic;
    Engine engine = Engine::gaussian;
    /// Measurement interval Delta T; <= 0 selects T/2.
    double measurement_interval = 0.0;
    StepConfig step;
    /// Fock cutoff for the dense engine.
    int fock_cutoff = 180;

    double resolved_interval() const;
    /// Number of measurement times K_tot = total_duration / Delta T.
    std::size_t measurement_count() const;
    /// 3 K_tot + 1.
    std::size_t feature_dimension() const { return 3 * measurement_count() + 1; }
    /// tau_k = k Delta T for k = 1..K_tot.
    std::vector<double> measurement_times() const;

    /// Checks every sub-config plus Delta T | total duration.
    void validate() const;
};

/// (n_1, q_1, p_1, ..., n_K, q_K, p_K, 1). For the qubit engine the triple
/// is (pz, px, py).
struct FeatureVector {
    Eigen::VectorXd values;

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

/// Names of the feature rows: n_1, q_1, p_1, ..., bias.
std::vector<std::string> feature_names(const ReservoirConfig& cfg);

struct FeatureDiagnostics {
    double max_leakage = 0.0;
    double max_norm_drift = 0.0;
    double max_symplectic_error = 0.0;
    double min_position = 0.0;
    double max_position = 0.0;
    /// Detector left the cavity [0, L]; reported, not clamped.
    bool outside_cavity = false;
};

/// Feature vector for one input. Deterministic: identical inputs give
/// bit-identical output. Dense-engine leakage raises NumericalError.
FeatureVector features_for(std::span<const double> x, const ReservoirConfig& cfg,
                           FeatureDiagnostics* diagnostics = nullptr);

struct FeatureMatrix {
    Eigen::MatrixXd phi;  ///< one column per input, in input order
    FeatureDiagnostics worst;
    std::size_t outside_cavity = 0;
};

/// Columns features_for(points[j]) for every point, computed on `workers`
/// threads. Results are ordered by input index.
FeatureMatrix feature_matrix(std::span<const std::vector<double>> points,
                             const ReservoirConfig& cfg, int workers = 1);

}  // namespace rqrc
