#include "rqrc/learning.hpp"

#include "rqrc/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace rqrc {

namespace {

constexpr double kZeroEigenvalue = 1e-12;

std::vector<double> sorted_spectrum(const Eigen::MatrixXd& sym)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("symmetric eigendecomposition failed");
    }
    std::vector<double> ev(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), std::greater<>());
    const double top = ev.empty() ? 0.0 : std::max(ev.front(), 0.0);
    for (auto& v : ev) {
        if (v < kZeroEigenvalue * top || v < 0.0) {
            v = 0.0;
        }
    }
    return ev;
}

}  // namespace

void DesignMatrix::validate() const
{
    if (phi.cols() != labels.size()) {
        throw DataError(fmt::format("design matrix has {} columns but {} labels", phi.cols(),
                                    labels.size()));
    }
    if (phi.cols() == 0) {
        throw DataError("design matrix has no samples");
    }
    if (!phi.allFinite()) {
        throw DataError("design matrix contains non-finite features");
    }
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1.0 && labels[i] != -1.0) {
            throw DataError(fmt::format("label {} is {}, expected +-1", i, labels[i]));
        }
    }
}

TrainedModel train_ridge(const DesignMatrix& data, double regularization)
{
    data.validate();
    if (!(regularization > 0.0) || !std::isfinite(regularization)) {
        throw ConfigError(fmt::format("regularization must be positive, got {}", regularization));
    }
    const auto n = static_cast<double>(data.samples());
    const auto d = data.phi.rows();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(data.phi);
    gram.diagonal().array() += regularization * n;
    const Eigen::VectorXd rhs = data.phi * data.labels;

    Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("regularised normal equations are not positive definite");
    }
    TrainedModel model;
    model.weights = llt.solve(rhs);
    model.regularization = regularization;
    if (!model.weights.allFinite()) {
        throw NumericalError("ridge solve produced non-finite weights");
    }
    return model;
}

double ridge_loss(const DesignMatrix& data, const Eigen::VectorXd& w, double regularization)
{
    const Eigen::VectorXd residual = data.labels - data.phi.transpose() * w;
    const auto n = static_cast<double>(data.samples());
    return residual.squaredNorm() / (2.0 * n) + 0.5 * regularization * w.squaredNorm();
}

double predict(const TrainedModel& model, const Eigen::VectorXd& features)
{
    if (features.size() != model.weights.size()) {
        throw DataError(fmt::format("feature vector of size {} for a model of size {}",
                                    features.size(), model.weights.size()));
    }
    return model.weights.dot(features);
}

int classify(const TrainedModel& model, const Eigen::VectorXd& features)
{
    return predict(model, features) >= 0.0 ? 1 : -1;
}

Eigen::VectorXd predict_all(const TrainedModel& model, const Eigen::MatrixXd& phi)
{
    if (phi.rows() != model.weights.size()) {
        throw DataError(fmt::format("feature matrix has {} rows for a model of size {}",
                                    phi.rows(), model.weights.size()));
    }
    return phi.transpose() * model.weights;
}

double accuracy(const TrainedModel& model, const DesignMatrix& data)
{
    if (data.samples() == 0) {
        throw DataError("accuracy of an empty dataset");
    }
    const auto f = predict_all(model, data.phi);
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double cls = f[i] >= 0.0 ? 1.0 : -1.0;
        correct += cls == data.labels[i] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(data.samples());
}

std::size_t KernelSpectrum::nonzero_count() const
{
    return static_cast<std::size_t>(
      std::count_if(eigenvalues.begin(), eigenvalues.end(), [](double v) { return v > 0.0; }));
}

std::size_t KernelSpectrum::normalized_rank(double t) const
{
    if (eigenvalues.empty() || eigenvalues.front() <= 0.0) {
        return 0;
    }
    const double top = eigenvalues.front();
    return static_cast<std::size_t>(std::count_if(
      eigenvalues.begin(), eigenvalues.end(), [&](double v) { return v / top > t; }));
}

KernelSpectrum kernel_spectrum(const Eigen::MatrixXd& phi, double threshold)
{
    if (phi.cols() == 0) {
        throw DataError("kernel spectrum of an empty design matrix");
    }
    const auto n = static_cast<double>(phi.cols());
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(phi.rows(), phi.rows());
    k.selfadjointView<Eigen::Lower>().rankUpdate(phi, 1.0 / n);
    k.triangularView<Eigen::StrictlyUpper>() = k.transpose();

    KernelSpectrum s;
    s.eigenvalues = sorted_spectrum(k);
    s.threshold = threshold;
    s.effective_rank = static_cast<std::size_t>(std::count_if(
      s.eigenvalues.begin(), s.eigenvalues.end(), [&](double v) { return v > threshold; }));
    return s;
}

std::vector<double> gram_spectrum(const Eigen::MatrixXd& phi)
{
    const auto n = static_cast<double>(phi.cols());
    const Eigen::MatrixXd g = phi.transpose() * phi / n;
    return sorted_spectrum(g);
}

double kernel(const FeatureVector& a, const FeatureVector& b)
{
    if (a.size() != b.size()) {
        throw DataError("kernel of feature vectors with different sizes");
    }
    return b.values.dot(a.values);
}

double kernel(std::span<const double> x, std::span<const double> x_prime,
              const ReservoirConfig& cfg)
{
    return kernel(features_for(x, cfg), features_for(x_prime, cfg));
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& phi)
{
    Standardizer s;
    const auto d = phi.rows();
    s.mean = phi.rowwise().mean();
    s.scale = Eigen::VectorXd::Ones(d);
    const auto n = static_cast<double>(std::max<Eigen::Index>(phi.cols(), 1));
    for (Eigen::Index i = 0; i < d; ++i) {
        const double var = (phi.row(i).array() - s.mean[i]).square().sum() / n;
        s.scale[i] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    // Bias row stays exactly 1.
    s.mean[d - 1] = 0.0;
    s.scale[d - 1] = 1.0;
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& phi) const
{
    if (phi.rows() != mean.size()) {
        throw DataError("standardizer fitted on a different feature dimension");
    }
    Eigen::MatrixXd out = phi.colwise() - mean;
    out.array().colwise() /= scale.array();
    return out;
}

}  // namespace rqrc
