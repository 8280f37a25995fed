#include "rqrc/error.hpp"
#include "rqrc/worldline.hpp"

#include <cmath>
#include <doctest.h>
#include <functional>
#include <random>

using namespace rqrc;

namespace {

// Composite Simpson rule with n (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b, int n)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

AccelerationProfile random_profile(std::mt19937_64& rng, int segments)
{
    std::uniform_real_distribution<double> acc(-3.0, 3.0), dur(0.1, 1.5);
    std::vector<Segment> segs;
    for (int i = 0; i < segments; ++i) {
        segs.push_back({acc(rng), dur(rng)});
    }
    return AccelerationProfile(segs);
}

}  // namespace

TEST_CASE("rapidity integrates the acceleration")
{
    const AccelerationProfile one({{2.0, 1.0}});
    CHECK(rapidity(one, 1.0) == doctest::Approx(2.0));
    CHECK(rapidity(one, 0.0) == 0.0);

    const AccelerationProfile pair({{3.0, 1.0}, {-3.0, 1.0}});
    CHECK(std::abs(rapidity(pair, 2.0)) < 1e-15);
    CHECK(rapidity(pair, 1.5) == doctest::Approx(1.5));
}

TEST_CASE("out-of-range proper time is rejected")
{
    const AccelerationProfile p({{1.0, 2.0}});
    CHECK_THROWS_AS(rapidity(p, -1e-3), RangeError);
    CHECK_THROWS_AS(evaluate(p, 2.001, Kinematics::relativistic), RangeError);
    CHECK_NOTHROW(evaluate(p, 2.0, Kinematics::newtonian));
}

TEST_CASE("profiles reject non-positive durations")
{
    CHECK_THROWS_AS(AccelerationProfile({{1.0, 0.0}}), ConfigError);
    CHECK_THROWS_AS(AccelerationProfile({{1.0, -1.0}}), ConfigError);
    CHECK_THROWS_AS(AccelerationProfile({{NAN, 1.0}}), ConfigError);
}

TEST_CASE("constant acceleration gives the Rindler hyperbola")
{
    const AccelerationProfile p({{2.0, 1.0}});
    const auto w = evaluate(p, 1.0, Kinematics::relativistic);
    CHECK(w.x == doctest::Approx((std::cosh(2.0) - 1.0) / 2.0).epsilon(1e-14));
    CHECK(w.t == doctest::Approx(std::sinh(2.0) / 2.0).epsilon(1e-14));
    CHECK(w.x == doctest::Approx(1.3811).epsilon(1e-4));
    CHECK(w.t == doctest::Approx(1.8134).epsilon(1e-4));

    const auto n = evaluate(p, 1.0, Kinematics::newtonian);
    CHECK(n.x == doctest::Approx(1.0));
    CHECK(n.t == 1.0);
}

TEST_CASE("inertial rest")
{
    const AccelerationProfile p({{0.0, 5.0}});
    for (auto mode : {Kinematics::relativistic, Kinematics::newtonian}) {
        const auto w = evaluate(p, 5.0, mode);
        CHECK(w.x == 0.0);
        CHECK(w.t == doctest::Approx(5.0));
    }
}

TEST_CASE("closed forms match Simpson quadrature of the world-line integrals")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const auto p = random_profile(rng, 6);
        const Worldline rel(p, Kinematics::relativistic);
        const Worldline newt(p, Kinematics::newtonian);
        // Integrate panel by panel so every Simpson panel is smooth.
        double t = 0.0, x = 0.0, xn = 0.0;
        const auto b = p.boundaries();
        for (std::size_t s = 0; s < p.size(); ++s) {
            auto xi = [&](double tau) { return rapidity(p, std::min(tau, b.back())); };
            t += simpson([&](double u) { return std::cosh(xi(u)); }, b[s], b[s + 1], 2000);
            x += simpson([&](double u) { return std::sinh(xi(u)); }, b[s], b[s + 1], 2000);
            xn += simpson(xi, b[s], b[s + 1], 2000);
            const auto w = rel.at(b[s + 1]);
            CHECK(std::abs(w.t - t) < 1e-10 * std::max(1.0, std::abs(t)));
            CHECK(std::abs(w.x - x) < 1e-10 * std::max(1.0, std::abs(x)));
            CHECK(std::abs(newt.at(b[s + 1]).x - xn) < 1e-10 * std::max(1.0, std::abs(xn)));
            CHECK(newt.at(b[s + 1]).t == doctest::Approx(b[s + 1]).epsilon(1e-15));
        }
    }
}

TEST_CASE("four-velocity normalization on a dense grid")
{
    std::mt19937_64 rng(3);
    const auto p = random_profile(rng, 10);
    const Worldline wl(p, Kinematics::relativistic);
    const double total = p.total_duration();
    double worst = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double xi = wl.at(std::min(total, total * i / 10000.0)).xi;
        worst = std::max(worst, std::abs(std::cosh(xi) * std::cosh(xi) - std::sinh(xi) * std::sinh(xi) - 1.0));
    }
    CHECK(worst < 1e-12);

    // Derivatives of the closed forms: dt/dtau = cosh xi, dx/dtau = sinh xi.
    const double h = 1e-6;
    for (double tau : {0.3, 1.7, 2.9, total - 0.2}) {
        const auto w = wl.at(tau);
        const double dt = (wl.at(tau + h).t - wl.at(tau - h).t) / (2 * h);
        const double dx = (wl.at(tau + h).x - wl.at(tau - h).x) / (2 * h);
        CHECK(dt == doctest::Approx(std::cosh(w.xi)).epsilon(1e-7));
        CHECK(dt * dt - dx * dx == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("continuity across segment boundaries")
{
    std::mt19937_64 rng(5);
    const auto p = random_profile(rng, 8);
    for (auto mode : {Kinematics::relativistic, Kinematics::newtonian}) {
        const Worldline wl(p, mode);
        const auto b = p.boundaries();
        for (std::size_t s = 1; s + 1 < b.size(); ++s) {
            const auto left = wl.in_segment(s - 1, b[s]);
            const auto right = wl.in_segment(s, b[s]);
            CHECK(std::abs(left.x - right.x) < 1e-12);
            CHECK(std::abs(left.t - right.t) < 1e-12);
            CHECK(std::abs(left.xi - right.xi) < 1e-12);
        }
    }
}

TEST_CASE("Newtonian limit at small acceleration")
{
    const AccelerationProfile p({{1e-3, 1.0}, {-1e-3, 1.0}, {-1e-3, 1.0}, {1e-3, 1.0}});
    const Worldline rel(p, Kinematics::relativistic);
    const Worldline newt(p, Kinematics::newtonian);
    for (double tau = 0.0; tau <= 4.0; tau += 0.25) {
        CHECK(std::abs(rel.at(tau).x - newt.at(tau).x) < 1e-6);
    }
}

TEST_CASE("zero acceleration uses the linear branch after a boost")
{
    const AccelerationProfile p({{1.0, 1.0}, {0.0, 2.0}});
    const auto w = evaluate(p, 3.0, Kinematics::relativistic);
    CHECK(w.x == doctest::Approx(std::cosh(1.0) - 1.0 + 2.0 * std::sinh(1.0)).epsilon(1e-14));
    CHECK(w.t == doctest::Approx(std::sinh(1.0) + 2.0 * std::cosh(1.0)).epsilon(1e-14));
}

TEST_CASE("position range includes turning points")
{
    // Rapidity crosses zero inside the second segment, where x peaks.
    const AccelerationProfile p({{1.0, 1.0}, {-1.0, 3.0}});
    for (auto mode : {Kinematics::relativistic, Kinematics::newtonian}) {
        const Worldline wl(p, mode);
        double lo = 0.0, hi = 0.0;
        for (int i = 0; i <= 40000; ++i) {
            const double x = wl.at(4.0 * i / 40000.0).x;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        const auto [rlo, rhi] = wl.position_range();
        CHECK(rlo == doctest::Approx(lo).epsilon(1e-8));
        CHECK(rhi == doctest::Approx(hi).epsilon(1e-8));
        CHECK(rhi >= hi);
    }
}

TEST_CASE("max rapidity is attained at a boundary")
{
    const AccelerationProfile p({{2.0, 1.0}, {-1.0, 5.0}});
    const Worldline wl(p, Kinematics::relativistic);
    CHECK(wl.max_abs_rapidity() == doctest::Approx(3.0));
}

TEST_CASE("general initial conditions shift the world line")
{
    const AccelerationProfile p({{1.0, 1.0}});
    const Worldline wl(p, Kinematics::relativistic, {1.0, 2.0, 0.5});
    const auto w = wl.at(1.0);
    CHECK(w.xi == doctest::Approx(1.5));
    CHECK(w.x == doctest::Approx(2.0 + std::cosh(1.5) - std::cosh(0.5)).epsilon(1e-14));
    CHECK(w.t == doctest::Approx(1.0 + std::sinh(1.5) - std::sinh(0.5)).epsilon(1e-14));
}
