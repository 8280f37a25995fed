#include "rqrc/error.hpp"
#include "rqrc/reservoir.hpp"

#include <cmath>
#include <doctest.h>
#include <random>

using namespace rqrc;

namespace {

ReservoirConfig config(double a0, double T, int m, Kinematics kin)
{
    ReservoirConfig cfg;
    cfg.encoding = EncodingConfig::with_ratio(a0, 0.1, T, m, {{-1.0, 1.0}, {-1.0, 1.0}});
    cfg.kinematics = kin;
    return cfg;
}

std::vector<std::vector<double>> random_inputs(int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> xs;
    for (int i = 0; i < n; ++i) {
        xs.push_back({u(rng), u(rng)});
    }
    return xs;
}

}  // namespace

TEST_CASE("measurement schedule and layout")
{
    auto cfg = config(3.0, 2.0, 4, Kinematics::relativistic);
    CHECK(cfg.measurement_count() == 32);
    CHECK(cfg.feature_dimension() == 97);
    const auto times = cfg.measurement_times();
    CHECK(times.front() == doctest::Approx(1.0));
    CHECK(times.back() == cfg.encoding.total_duration());
    const auto names = feature_names(cfg);
    CHECK(names.size() == 97);
    CHECK(names[0] == "n_1");
    CHECK(names[2] == "p_1");
    CHECK(names.back() == "bias");
    cfg.engine = Engine::dense_qubit;
    CHECK(feature_names(cfg)[0] == "pz_1");

    cfg.measurement_interval = 0.7;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.measurement_interval = 2.0;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.measurement_count() == 16);

    cfg.fock_cutoff = 100;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("decoupled reservoir gives zero features and a unit bias")
{
    auto cfg = config(2.0, 1.0, 1, Kinematics::relativistic);
    cfg.modes.coupling = 0.0;
    const std::vector<double> x{0.1, -0.4};
    const auto fv = features_for(x, cfg);
    CHECK(fv.size() == cfg.feature_dimension());
    CHECK(fv.values.head(fv.values.size() - 1).isZero());
    CHECK(fv.values[fv.values.size() - 1] == 1.0);
}

TEST_CASE("features are deterministic and independent of worker count")
{
    const auto cfg = config(1.0, 1.0, 2, Kinematics::relativistic);
    const auto xs = random_inputs(6, 4);
    const auto a = features_for(xs[0], cfg);
    const auto b = features_for(xs[0], cfg);
    CHECK(a.values == b.values);

    const auto one = feature_matrix(xs, cfg, 1);
    const auto three = feature_matrix(xs, cfg, 3);
    CHECK(one.phi == three.phi);
    for (std::size_t j = 0; j < xs.size(); ++j) {
        CHECK(one.phi.col(static_cast<Eigen::Index>(j)) == features_for(xs[j], cfg).values);
    }
}

TEST_CASE("relativistic and Newtonian features diverge, except at tiny acceleration")
{
    const std::vector<double> x{0.3, -0.6};
    const auto rel = features_for(x, config(1.0, 1.0, 1, Kinematics::relativistic));
    const auto newt = features_for(x, config(1.0, 1.0, 1, Kinematics::newtonian));
    CHECK((rel.values - newt.values).lpNorm<Eigen::Infinity>() > 1e-3);

    const auto rel0 = features_for(x, config(1e-3, 1.0, 1, Kinematics::relativistic));
    const auto newt0 = features_for(x, config(1e-3, 1.0, 1, Kinematics::newtonian));
    CHECK((rel0.values - newt0.values).lpNorm<Eigen::Infinity>() < 1e-5);
}

TEST_CASE("leaving the cavity is flagged, not clamped")
{
    const std::vector<double> x{1.0, 1.0};
    FeatureDiagnostics d;
    features_for(x, config(5.0, 2.0, 1, Kinematics::relativistic), &d);
    CHECK(d.outside_cavity);
    CHECK(d.max_position > 3.0 * M_PI);
    features_for(x, config(1.0, 2.0, 1, Kinematics::relativistic), &d);
    CHECK_FALSE(d.outside_cavity);
    CHECK(d.max_symplectic_error < kMaxSymplecticError);
}

TEST_CASE("qubit engine features")
{
    auto cfg = config(2.0, 1.0, 1, Kinematics::relativistic);
    cfg.engine = Engine::dense_qubit;
    const std::vector<double> x{0.2, 0.5};
    FeatureDiagnostics d;
    const auto fv = features_for(x, cfg, &d);
    CHECK(fv.values.allFinite());
    CHECK(d.max_leakage < 1e-6);
    CHECK(d.max_norm_drift < 1e-8);
    for (std::size_t k = 0; k < cfg.measurement_count(); ++k) {
        const double pz = fv.values[static_cast<Eigen::Index>(3 * k)];
        CHECK(pz >= 0.0);
        CHECK(pz <= 1.0);
    }
}

TEST_CASE("repeated encodings add new information only relativistically")
{
    // Regress the second repetition's features on the first one's (plus bias);
    // the relativistic residual must dominate the Newtonian one.
    const auto xs = random_inputs(60, 9);
    auto residual = [&](Kinematics kin) {
        const auto cfg = config(2.0, 2.0, 2, kin);
        const auto phi = feature_matrix(xs, cfg, 1).phi;
        const Eigen::Index half = (phi.rows() - 1) / 2;
        Eigen::MatrixXd first(half + 1, phi.cols());
        first.topRows(half) = phi.topRows(half);
        first.row(half).setOnes();
        const Eigen::MatrixXd second = phi.middleRows(half, half);
        const Eigen::MatrixXd coef =
          first.transpose().completeOrthogonalDecomposition().solve(second.transpose());
        return (second - coef.transpose() * first).norm();
    };
    const double rel = residual(Kinematics::relativistic);
    const double newt = residual(Kinematics::newtonian);
    INFO("relativistic residual ", rel, ", Newtonian residual ", newt);
    CHECK(rel >= 10.0 * newt);
}
