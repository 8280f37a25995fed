#include "rqrc/worldline.hpp"

#include "rqrc/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace rqrc {

namespace {

// Below this |a| a segment is treated as inertial.
constexpr double kInertialThreshold = 1e-12;

WorldlinePoint advance(const WorldlinePoint& start, const Segment& seg, double tau,
                       Kinematics mode)
{
    const double dtau = tau - start.tau;
    const double a = seg.acceleration;
    WorldlinePoint p;
    p.tau = tau;
    p.xi = start.xi + a * dtau;

    if (mode == Kinematics::newtonian) {
        p.x = start.x + start.xi * dtau + 0.5 * a * dtau * dtau;
        p.t = start.t + dtau;
        return p;
    }

    if (std::abs(a) < kInertialThreshold) {
        p.x = start.x + dtau * std::sinh(start.xi);
        p.t = start.t + dtau * std::cosh(start.xi);
        return p;
    }

    // cosh/sinh differences in product form; avoids cancellation for small a*dtau.
    const double half_sum = 0.5 * (p.xi + start.xi);
    const double half_diff = std::sinh(0.5 * a * dtau);
    p.x = start.x + 2.0 * std::sinh(half_sum) * half_diff / a;
    p.t = start.t + 2.0 * std::cosh(half_sum) * half_diff / a;
    return p;
}

}  // namespace

AccelerationProfile::AccelerationProfile(std::vector<Segment> segments)
    : segments_(std::move(segments))
{
    boundaries_.reserve(segments_.size() + 1);
    double tau = 0.0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
            throw ConfigError(
              fmt::format("segment {} has non-positive or non-finite duration {}", i, s.duration));
        }
        if (!std::isfinite(s.acceleration)) {
            throw ConfigError(fmt::format("segment {} has non-finite acceleration", i));
        }
        tau += s.duration;
        boundaries_.push_back(tau);
    }
}

std::size_t AccelerationProfile::segment_index(double tau) const
{
    const double total = total_duration();
    if (segments_.empty() || !(tau >= 0.0) || tau > total) {
        throw RangeError(fmt::format("proper time {} outside [0, {}]", tau, total));
    }
    // First boundary strictly greater than tau ends the containing segment.
    auto it = std::upper_bound(boundaries_.begin() + 1, boundaries_.end(), tau);
    if (it == boundaries_.end()) {
        return segments_.size() - 1;
    }
    return static_cast<std::size_t>(it - boundaries_.begin()) - 1;
}

double AccelerationProfile::max_abs_acceleration() const
{
    double m = 0.0;
    for (const auto& s : segments_) {
        m = std::max(m, std::abs(s.acceleration));
    }
    return m;
}

Worldline::Worldline(AccelerationProfile profile, Kinematics mode, InitialConditions initial)
    : profile_(std::move(profile)), mode_(mode)
{
    starts_.reserve(profile_.size() + 1);
    WorldlinePoint p{0.0, initial.t0, initial.x0, initial.xi0};
    starts_.push_back(p);
    const auto bounds = profile_.boundaries();
    for (std::size_t i = 0; i < profile_.size(); ++i) {
        p = advance(p, profile_.segments()[i], bounds[i + 1], mode_);
        starts_.push_back(p);
    }
}

WorldlinePoint Worldline::at(double tau) const
{
    if (profile_.empty()) {
        if (tau == 0.0) {
            return starts_.front();
        }
        throw RangeError(fmt::format("proper time {} outside empty profile", tau));
    }
    return in_segment(profile_.segment_index(tau), tau);
}

WorldlinePoint Worldline::in_segment(std::size_t segment, double tau) const
{
    return advance(starts_[segment], profile_.segments()[segment], tau, mode_);
}

double Worldline::max_abs_rapidity() const
{
    double m = 0.0;
    for (const auto& p : starts_) {
        m = std::max(m, std::abs(p.xi));
    }
    return m;
}

std::pair<double, double> Worldline::position_range() const
{
    double lo = starts_.front().x;
    double hi = lo;
    for (std::size_t i = 0; i < profile_.size(); ++i) {
        const auto& s = starts_[i];
        const auto& e = starts_[i + 1];
        lo = std::min({lo, s.x, e.x});
        hi = std::max({hi, s.x, e.x});
        // Turning point where the velocity changes sign inside the segment.
        if ((s.xi < 0.0 && e.xi > 0.0) || (s.xi > 0.0 && e.xi < 0.0)) {
            const double a = profile_.segments()[i].acceleration;
            const auto turn = in_segment(i, s.tau - s.xi / a);
            lo = std::min(lo, turn.x);
            hi = std::max(hi, turn.x);
        }
    }
    return {lo, hi};
}

double rapidity(const AccelerationProfile& profile, double tau)
{
    return Worldline(profile, Kinematics::newtonian).rapidity(tau);
}

WorldlinePoint evaluate(const AccelerationProfile& profile, double tau, Kinematics mode)
{
    return Worldline(profile, mode).at(tau);
}

}  // namespace rqrc
