#pragma once

// Linear readout: closed-form ridge regression, classification accuracy and
// the empirical kernel spectrum of the feature map.

#include "rqrc/reservoir.hpp"

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace rqrc {

/// Features as columns (one per sample) plus +-1 labels.
struct DesignMatrix {
    Eigen::MatrixXd phi;
    Eigen::VectorXd labels;

    std::size_t samples() const { return static_cast<std::size_t>(phi.cols()); }
    std::size_t features() const { return static_cast<std::size_t>(phi.rows()); }

    /// Throws DataError on shape mismatch, non-finite entries or labels not in {-1, +1}.
    void validate() const;
};

struct TrainedModel {
    Eigen::VectorXd weights;  ///< bias absorbed as the last feature
    double regularization = 0.0;
};

/// Minimiser of (1/2N) sum (y_i - w^T X_i)^2 + (l/2)|w|^2, i.e.
/// w = (Phi Phi^T + l N 1)^{-1} Phi y, solved by Cholesky.
TrainedModel train_ridge(const DesignMatrix& data, double regularization);

/// The ridge loss itself, for diagnostics and optimality checks.
double ridge_loss(const DesignMatrix& data, const Eigen::VectorXd& w, double regularization);

/// f = w^T X.
double predict(const TrainedModel& model, const Eigen::VectorXd& features);

/// sign(f) with sign(0) = +1.
int classify(const TrainedModel& model, const Eigen::VectorXd& features);

/// w^T X for every column.
Eigen::VectorXd predict_all(const TrainedModel& model, const Eigen::MatrixXd& phi);

/// Fraction of samples whose predicted class equals the label.
double accuracy(const TrainedModel& model, const DesignMatrix& data);

struct KernelSpectrum {
    /// Eigenvalues of Phi Phi^T / N, descending; values below 1e-12 * max are zero.
    std::vector<double> eigenvalues;
    double threshold = 0.0;
    /// #{gamma > threshold} on the raw spectrum.
    std::size_t effective_rank = 0;

    std::size_t nonzero_count() const;
    /// #{gamma / gamma_max > threshold}.
    std::size_t normalized_rank(double threshold) const;
};

/// Spectrum of Phi Phi^T / N with effective rank at `threshold`.
KernelSpectrum kernel_spectrum(const Eigen::MatrixXd& phi, double threshold);

/// Spectrum of the sample Gram matrix Phi^T Phi / N (same nonzero part).
std::vector<double> gram_spectrum(const Eigen::MatrixXd& phi);

/// k(x, x') = X(x')^T X(x).
double kernel(const FeatureVector& a, const FeatureVector& b);
double kernel(std::span<const double> x, std::span<const double> x_prime,
              const ReservoirConfig& cfg);

/// Per-feature z-scoring fitted on training columns; the bias row is left alone.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    static Standardizer fit(const Eigen::MatrixXd& phi);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& phi) const;
};

}  // namespace rqrc
