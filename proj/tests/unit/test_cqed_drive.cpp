#include "rqrc/cqed_drive.hpp"
#include "rqrc/encoding.hpp"
#include "rqrc/error.hpp"

#include <cmath>
#include <doctest.h>
#include <numbers>

using namespace rqrc;

namespace {

// Slow enough that a fine grid resolves every oscillation cheaply.
DriveParams toy()
{
    DriveParams p;
    p.omega0 = 10.0;
    p.epsilon = 12.0;
    p.detector_frequency = 1.0;
    p.g = 1.0;
    p.eta = 0.01;
    return p;
}

Worldline worldline(double a0, double T, int m, Kinematics kin = Kinematics::relativistic)
{
    const auto enc = EncodingConfig::with_ratio(a0, 0.1, T, m, {{0.0, 1.0}, {0.0, 1.0}});
    return Worldline(encode(std::vector<double>{0.3, 0.8}, enc), kin);
}

}  // namespace

TEST_CASE("drive tones")
{
    const auto p = DriveParams::circuit_qed_example();
    const auto f = drive_frequencies(p);
    CHECK(f.plus == doctest::Approx(2099.0));
    CHECK(f.minus == doctest::Approx(99.0));

    auto bad = p;
    bad.epsilon = 1000.5;
    CHECK_THROWS_AS(drive_frequencies(bad), ConfigError);
}

TEST_CASE("parameter checks")
{
    auto p = DriveParams::circuit_qed_example();
    CHECK(p.g == doctest::Approx(10.0 / std::sqrt(3.0 * std::numbers::pi)));
    p.eta = 0.1;
    CHECK_THROWS_AS(p.check(), ConfigError);
    p.eta = 0.07;
    CHECK_FALSE(p.check().empty());
    p.eta = 0.01;
    p.omega0 = -1.0;
    CHECK_THROWS_AS(p.check(), ConfigError);
}

TEST_CASE("phases follow the detector's rest frame")
{
    const auto p = toy();
    const auto wl = worldline(2.0, 1.0, 1);
    for (double tau : {0.0, 0.4, 1.3, 3.1}) {
        const auto w = wl.at(tau);
        const auto ph = phase_modulation(wl, p, tau);
        CHECK(ph.theta_plus == doctest::Approx(w.t + w.x).epsilon(1e-14));
        CHECK(ph.theta_minus == doctest::Approx(w.t - w.x).epsilon(1e-14));
        // For omega_n = k_n the rates are e^{+-xi}.
        CHECK(ph.rate_plus == doctest::Approx(std::exp(w.xi)).epsilon(1e-13));
        CHECK(ph.rate_minus == doctest::Approx(std::exp(-w.xi)).epsilon(1e-13));
        CHECK(ph.rate_plus + ph.rate_minus == doctest::Approx(2.0 * std::cosh(w.xi)).epsilon(1e-13));
        CHECK(ph.rate_plus - ph.rate_minus == doctest::Approx(2.0 * std::sinh(w.xi)).epsilon(1e-13));
    }
    const auto inertial = Worldline(AccelerationProfile({{0.0, 2.0}}), Kinematics::relativistic);
    const auto ph = phase_modulation(inertial, p, 1.5);
    CHECK(ph.theta_plus == doctest::Approx(1.5));
    CHECK(ph.theta_minus == doctest::Approx(1.5));
}

TEST_CASE("phase rates match finite differences")
{
    auto p = toy();
    p.mode_frequency = 1.3;
    p.mode_wavenumber = 0.7;
    for (auto kin : {Kinematics::relativistic, Kinematics::newtonian}) {
        const auto wl = worldline(1.5, 1.0, 2, kin);
        const double h = 1e-6;
        for (double tau : {0.2, 1.1, 2.6, 3.7}) {
            const auto mid = phase_modulation(wl, p, tau);
            const auto hi = phase_modulation(wl, p, tau + h);
            const auto lo = phase_modulation(wl, p, tau - h);
            CHECK((hi.theta_plus - lo.theta_plus) / (2 * h) == doctest::Approx(mid.rate_plus).epsilon(1e-7));
            CHECK((hi.theta_minus - lo.theta_minus) / (2 * h) == doctest::Approx(mid.rate_minus).epsilon(1e-7));
        }
    }
}

TEST_CASE("zeta integrates back to F")
{
    const auto p = toy();
    const auto wl = worldline(2.0, 1.0, 1);
    const auto grid = drive_grid(p, wl, 4000);
    const auto s = drive_waveform(p, wl, grid);
    REQUIRE(s.size() == grid.size());
    CHECK(s.tau.back() == doctest::Approx(wl.profile().total_duration()));
    double acc = 0.0, worst = 0.0, scale = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        acc += 0.5 * (s.zeta_exact[i] + s.zeta_exact[i - 1]) * (s.tau[i] - s.tau[i - 1]);
        worst = std::max(worst, std::abs(s.f[0] + acc - s.f[i]));
        scale = std::max(scale, std::abs(s.f[i]));
    }
    CHECK(worst < 1e-4 * std::max(1.0, scale));
    // F vanishes at tau = 0: the two phases coincide there.
    CHECK(std::abs(s.f[0]) < 1e-15);
}

TEST_CASE("slow approximation and modulation bounds")
{
    const auto p = DriveParams::circuit_qed_example();
    const auto wl = worldline(2.0, 2.0, 1);
    const auto s = drive_waveform(p, wl, drive_grid(p, wl, 40));
    const auto tones = drive_frequencies(p);
    double rate = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        rate = std::max({rate, std::abs(s.rate_plus[i]), std::abs(s.rate_minus[i])});
        // The neglected terms are the phase rates times unit-bounded sines.
        CHECK(std::abs(s.zeta_exact[i] - s.zeta_slow[i]) <=
              2.0 * (std::abs(s.rate_plus[i]) + std::abs(s.rate_minus[i])) + 1e-9);
    }
    CHECK(s.max_rate == rate);
    CHECK(s.modulation_ratio == doctest::Approx(rate / tones.minus));
    CHECK(s.max_rate <= 10.0 * p.detector_frequency);
}

TEST_CASE("grid handling")
{
    const auto p = toy();
    const auto empty = Worldline(AccelerationProfile(std::vector<Segment>{}), Kinematics::relativistic);
    CHECK(drive_grid(p, empty).empty());
    CHECK(drive_waveform(p, empty, std::vector<double>{}).size() == 0);

    const auto wl = worldline(1.0, 1.0, 1);
    const double period = 2.0 * std::numbers::pi / drive_frequencies(p).plus;
    CHECK_NOTHROW(drive_waveform(p, wl, drive_grid(p, wl, 20)));
    const std::vector<double> coarse{0.0, period / 10.0};
    CHECK_THROWS_AS(drive_waveform(p, wl, coarse), ConfigError);
}

TEST_CASE("effective coupling check")
{
    const auto p = DriveParams::circuit_qed_example();
    const auto ok = effective_coupling_check(p, ModeSet::single_mode(1.0, 0.1, 3, {0.0, 10.0}));
    CHECK(ok.match);
    CHECK(ok.ratio == doctest::Approx(1.0).epsilon(1e-9));
    // lambda / sqrt(L omega_3) with L = 3 pi, omega_3 = 1.
    CHECK(ok.simulated == doctest::Approx(0.1 / std::sqrt(3.0 * std::numbers::pi)));

    const auto twice = effective_coupling_check(p, ModeSet::single_mode(1.0, 0.2, 3, {0.0, 10.0}));
    CHECK_FALSE(twice.match);
    CHECK(twice.ratio == doctest::Approx(2.0));
    CHECK(twice.message.find("mismatch") != std::string::npos);

    auto off = p;
    off.eta = 0.0;
    const auto zero = effective_coupling_check(off, ModeSet::single_mode());
    CHECK(zero.zero_coupling);
    CHECK_FALSE(zero.match);
}
