#pragma once

// End-to-end pipeline shared by the command-line tool and the acceptance suite:
// dataset -> encoding ranges -> feature matrices (cached) -> ridge readout.

#include "rqrc/config.hpp"
#include "rqrc/learning.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace rqrc {

struct SplitData {
    LabeledDataset train;
    LabeledDataset test;
};

/// Spirals with n_train + n_test points, then the seeded split.
SplitData make_split(const ExperimentConfig& cfg);

/// Training bounding box widened by `margin` times its span on each side.
std::vector<InputRange> encoding_ranges(const LabeledDataset& train, double margin);

/// Reservoir for the given encoding axes; everything else from `cfg`.
ReservoirConfig reservoir_config(const ExperimentConfig& cfg, double a0, double T, int m,
                                 Kinematics kin, const std::vector<InputRange>& ranges);
ReservoirConfig reservoir_config(const ExperimentConfig& cfg,
                                 const std::vector<InputRange>& ranges);

/// Hash of the dataset content (coordinates at full precision and labels).
std::string dataset_hash(const LabeledDataset& ds);
std::string reservoir_hash(const ReservoirConfig& cfg);

/// On-disk feature matrices keyed by (dataset hash, reservoir hash).
class FeatureCache {
  public:
    explicit FeatureCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::filesystem::path path_for(const std::string& dataset_hash,
                                   const std::string& reservoir_hash) const;
    std::optional<FeatureMatrix> load(const std::string& dataset_hash,
                                      const std::string& reservoir_hash) const;
    void store(const std::string& dataset_hash, const std::string& reservoir_hash,
               const FeatureMatrix& fm) const;

  private:
    std::filesystem::path dir_;
};

/// Features of every point in `ds`, read from `cache` when present.
FeatureMatrix dataset_features(const LabeledDataset& ds, const ReservoirConfig& cfg, int workers,
                               const FeatureCache* cache);

DesignMatrix design(const Eigen::MatrixXd& phi, const LabeledDataset& ds);

struct RunResult {
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    TrainedModel model;
    std::optional<Standardizer> standardizer;
    KernelSpectrum spectrum;  ///< training Gram, threshold l
    Eigen::VectorXd train_scores;
    Eigen::VectorXd test_scores;
    FeatureDiagnostics worst;
    std::size_t outside_cavity = 0;
    double seconds = 0.0;  ///< wall time of the feature computation
};

/// Features for both splits, ridge fit on train, evaluation on both.
RunResult run_experiment(const SplitData& data, const ReservoirConfig& reservoir,
                         const LearningSection& learning, int workers, const FeatureCache* cache);

/// Writes a Eigen matrix as CSV (one row per sample) with a header.
void save_feature_csv(const Eigen::MatrixXd& phi, const std::vector<std::string>& names,
                      const std::filesystem::path& path, const std::string& comment);

}  // namespace rqrc
