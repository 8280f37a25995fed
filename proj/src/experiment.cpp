#include "rqrc/experiment.hpp"

#include "rqrc/error.hpp"

#include <chrono>
#include <cstring>
#include <fmt/format.h>
#include <fstream>

namespace rqrc {

namespace {

constexpr char kCacheMagic[8] = {'R', 'Q', 'R', 'C', 'F', 'M', '3', '\0'};

}  // namespace

SplitData make_split(const ExperimentConfig& cfg)
{
    const auto all = two_spirals(cfg.spiral_params());
    auto [train, test] = split(all, cfg.dataset.n_train, cfg.dataset.n_test, cfg.seeds.split);
    return {std::move(train), std::move(test)};
}

std::vector<InputRange> encoding_ranges(const LabeledDataset& train, double margin)
{
    auto box = train.bounding_box();
    for (auto& r : box) {
        const double pad = margin * (r.max - r.min);
        r.min -= pad;
        r.max += pad;
    }
    return box;
}

ReservoirConfig reservoir_config(const ExperimentConfig& cfg, double a0, double T, int m,
                                 Kinematics kin, const std::vector<InputRange>& ranges)
{
    ReservoirConfig r;
    r.encoding = EncodingConfig::with_ratio(a0, cfg.encoding.delta_a_ratio, T, m, ranges);
    r.modes = cfg.mode_set();
    r.kinematics = kin;
    r.engine = cfg.engine;
    r.measurement_interval = cfg.reservoir.delta_T;
    r.step.steps_per_period = cfg.reservoir.steps_per_period;
    r.fock_cutoff = cfg.reservoir.fock_cutoff;
    r.validate();
    return r;
}

ReservoirConfig reservoir_config(const ExperimentConfig& cfg, const std::vector<InputRange>& ranges)
{
    return reservoir_config(cfg, cfg.encoding.a0, cfg.encoding.T, cfg.encoding.m, cfg.kinematics,
                            ranges);
}

std::string dataset_hash(const LabeledDataset& ds)
{
    std::string bytes;
    bytes.reserve(ds.size() * 48);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        bytes += fmt::format("{:.17g},{:.17g},{}\n", ds.points[i][0], ds.points[i][1], ds.labels[i]);
    }
    return stable_hash(bytes);
}

std::string reservoir_hash(const ReservoirConfig& cfg)
{
    return stable_hash(to_json(cfg).dump());
}

std::filesystem::path FeatureCache::path_for(const std::string& dataset_hash,
                                             const std::string& reservoir_hash) const
{
    return dir_ / fmt::format("features-{}-{}.bin", dataset_hash, reservoir_hash);
}

std::optional<FeatureMatrix> FeatureCache::load(const std::string& dataset_hash,
                                                const std::string& reservoir_hash) const
{
    std::ifstream is(path_for(dataset_hash, reservoir_hash), std::ios::binary);
    if (!is) {
        return std::nullopt;
    }
    char magic[8];
    std::uint64_t rows = 0, cols = 0;
    is.read(magic, sizeof magic);
    is.read(reinterpret_cast<char*>(&rows), sizeof rows);
    is.read(reinterpret_cast<char*>(&cols), sizeof cols);
    if (!is || std::memcmp(magic, kCacheMagic, sizeof magic) != 0) {
        return std::nullopt;
    }
    FeatureMatrix fm;
    fm.phi.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    is.read(reinterpret_cast<char*>(fm.phi.data()),
            static_cast<std::streamsize>(rows * cols * sizeof(double)));
    double diag[5];
    std::uint64_t outside = 0;
    is.read(reinterpret_cast<char*>(diag), sizeof diag);
    is.read(reinterpret_cast<char*>(&outside), sizeof outside);
    if (!is) {
        return std::nullopt;
    }
    fm.worst = {diag[0], diag[1], diag[2], diag[3], diag[4], outside > 0};
    fm.outside_cavity = static_cast<std::size_t>(outside);
    return fm;
}

void FeatureCache::store(const std::string& dataset_hash, const std::string& reservoir_hash,
                         const FeatureMatrix& fm) const
{
    std::filesystem::create_directories(dir_);
    const auto target = path_for(dataset_hash, reservoir_hash);
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) {
            throw DataError(fmt::format("cannot write feature cache {}", tmp.string()));
        }
        const auto& phi = fm.phi;
        const std::uint64_t rows = static_cast<std::uint64_t>(phi.rows());
        const std::uint64_t cols = static_cast<std::uint64_t>(phi.cols());
        const double diag[5] = {fm.worst.max_leakage, fm.worst.max_norm_drift,
                                fm.worst.max_symplectic_error, fm.worst.min_position,
                                fm.worst.max_position};
        const std::uint64_t outside = fm.outside_cavity;
        os.write(kCacheMagic, sizeof kCacheMagic);
        os.write(reinterpret_cast<const char*>(&rows), sizeof rows);
        os.write(reinterpret_cast<const char*>(&cols), sizeof cols);
        os.write(reinterpret_cast<const char*>(phi.data()),
                 static_cast<std::streamsize>(rows * cols * sizeof(double)));
        os.write(reinterpret_cast<const char*>(diag), sizeof diag);
        os.write(reinterpret_cast<const char*>(&outside), sizeof outside);
        if (!os) {
            throw DataError(fmt::format("write to {} failed", tmp.string()));
        }
    }
    std::filesystem::rename(tmp, target);
}

FeatureMatrix dataset_features(const LabeledDataset& ds, const ReservoirConfig& cfg, int workers,
                               const FeatureCache* cache)
{
    std::string dh, rh;
    if (cache) {
        dh = dataset_hash(ds);
        rh = reservoir_hash(cfg);
        if (auto fm = cache->load(dh, rh);
            fm && fm->phi.rows() == static_cast<Eigen::Index>(cfg.feature_dimension()) &&
            fm->phi.cols() == static_cast<Eigen::Index>(ds.size())) {
            return std::move(*fm);
        }
    }
    const auto inputs = ds.inputs();
    auto fm = feature_matrix(inputs, cfg, workers);
    if (cache) {
        cache->store(dh, rh, fm);
    }
    return fm;
}

DesignMatrix design(const Eigen::MatrixXd& phi, const LabeledDataset& ds)
{
    DesignMatrix d;
    d.phi = phi;
    d.labels.resize(static_cast<Eigen::Index>(ds.size()));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        d.labels[static_cast<Eigen::Index>(i)] = ds.labels[i];
    }
    return d;
}

RunResult run_experiment(const SplitData& data, const ReservoirConfig& reservoir,
                         const LearningSection& learning, int workers, const FeatureCache* cache)
{
    RunResult r;
    const auto t0 = std::chrono::steady_clock::now();
    auto train = dataset_features(data.train, reservoir, workers, cache);
    auto test = dataset_features(data.test, reservoir, workers, cache);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    r.worst = train.worst;
    r.worst.max_leakage = std::max(r.worst.max_leakage, test.worst.max_leakage);
    r.worst.max_norm_drift = std::max(r.worst.max_norm_drift, test.worst.max_norm_drift);
    r.worst.max_symplectic_error =
      std::max(r.worst.max_symplectic_error, test.worst.max_symplectic_error);
    r.worst.min_position = std::min(r.worst.min_position, test.worst.min_position);
    r.worst.max_position = std::max(r.worst.max_position, test.worst.max_position);
    r.outside_cavity = train.outside_cavity + test.outside_cavity;
    r.worst.outside_cavity = r.outside_cavity > 0;

    if (learning.standardize) {
        r.standardizer = Standardizer::fit(train.phi);
        train.phi = r.standardizer->apply(train.phi);
        test.phi = r.standardizer->apply(test.phi);
    }
    const auto dtrain = design(train.phi, data.train);
    const auto dtest = design(test.phi, data.test);
    r.model = train_ridge(dtrain, learning.l);
    r.train_accuracy = accuracy(r.model, dtrain);
    r.test_accuracy = accuracy(r.model, dtest);
    r.train_scores = predict_all(r.model, dtrain.phi);
    r.test_scores = predict_all(r.model, dtest.phi);
    r.spectrum = kernel_spectrum(train.phi, learning.l);
    return r;
}

void save_feature_csv(const Eigen::MatrixXd& phi, const std::vector<std::string>& names,
                      const std::filesystem::path& path, const std::string& comment)
{
    if (names.size() != static_cast<std::size_t>(phi.rows())) {
        throw DataError("feature names do not match the matrix");
    }
    std::ofstream os(path);
    if (!os) {
        throw DataError(fmt::format("cannot open {} for writing", path.string()));
    }
    if (!comment.empty()) {
        os << "# " << comment << '\n';
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        os << (i ? "," : "") << names[i];
    }
    os << '\n';
    for (Eigen::Index j = 0; j < phi.cols(); ++j) {
        for (Eigen::Index i = 0; i < phi.rows(); ++i) {
            os << (i ? "," : "") << fmt::format("{:.17g}", phi(i, j));
        }
        os << '\n';
    }
    if (!os) {
        throw DataError(fmt::format("write to {} failed", path.string()));
    }
}

}  // namespace rqrc
