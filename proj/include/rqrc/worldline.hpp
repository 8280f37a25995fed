#pragma once

// World lines of a detector with piecewise-constant proper acceleration in
// 1+1D Minkowski spacetime (metric diag(+1,-1), c = 1).

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace rqrc {

enum class Kinematics { relativistic, newtonian };

/// One piece of constant proper acceleration lasting `duration` of proper time.
struct Segment {
    double acceleration = 0.0;
    double duration = 0.0;
};

/// Ordered list of constant-acceleration segments starting at tau = 0.
class AccelerationProfile {
  public:
    AccelerationProfile() = default;
    explicit AccelerationProfile(std::vector<Segment> segments);

    std::span<const Segment> segments() const { return segments_; }
    std::size_t size() const { return segments_.size(); }
    bool empty() const { return segments_.empty(); }
    double total_duration() const { return boundaries_.back(); }

    /// Proper-time grid tau_0 = 0 < tau_1 < ... < tau_K (size() + 1 entries).
    std::span<const double> boundaries() const { return boundaries_; }

    /// Index of the segment containing tau; the final boundary belongs to the
    /// last segment. Throws RangeError outside [0, total_duration].
    std::size_t segment_index(double tau) const;

    double max_abs_acceleration() const;

  private:
    std::vector<Segment> segments_;
    std::vector<double> boundaries_{0.0};
};

struct WorldlinePoint {
    double tau = 0.0;
    double t = 0.0;
    double x = 0.0;
    double xi = 0.0;  ///< rapidity
};

/// Initial data (t0, x0, xi0). Rest at the origin unless a caller needs more.
struct InitialConditions {
    double t0 = 0.0;
    double x0 = 0.0;
    double xi0 = 0.0;
};

/// Closed-form world line for a fixed profile. Segment start states are
/// precomputed so each evaluation is O(log K).
class Worldline {
  public:
    Worldline(AccelerationProfile profile, Kinematics mode, InitialConditions initial = {});

    const AccelerationProfile& profile() const { return profile_; }
    Kinematics kinematics() const { return mode_; }

    WorldlinePoint at(double tau) const;

    /// Evaluate inside a known segment (no search). tau must lie in that
    /// segment's closed interval.
    WorldlinePoint in_segment(std::size_t segment, double tau) const;

    double rapidity(double tau) const { return at(tau).xi; }

    /// Largest |xi| reached anywhere on the profile (attained at boundaries).
    double max_abs_rapidity() const;

    /// (min x, max x) over the whole profile.
    std::pair<double, double> position_range() const;

  private:
    AccelerationProfile profile_;
    Kinematics mode_;
    std::vector<WorldlinePoint> starts_;
};

/// xi(tau) = integral of a over [0, tau], for a detector starting at rest.
double rapidity(const AccelerationProfile& profile, double tau);

/// World-line point for a detector initially at rest at the origin.
WorldlinePoint evaluate(const AccelerationProfile& profile, double tau, Kinematics mode);

}  // namespace rqrc
