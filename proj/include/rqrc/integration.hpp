#pragma once

// Fixed-step classical RK4 over a world-line-aligned proper-time grid.

#include "rqrc/worldline.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace rqrc {

/// A run of equal RK4 steps that never crosses a segment boundary.
struct StepInterval {
    double begin = 0.0;
    double end = 0.0;
    std::size_t segment = 0;
    int steps = 1;
    /// Index into the sample-time list reached at `end`, or -1.
    long sample = -1;
};

struct StepPlan {
    std::vector<StepInterval> intervals;
    /// Sample times equal to 0 (served before the first step).
    std::vector<std::size_t> initial_samples;
    long total_steps() const;
};

/// Split every segment of `wl` into ceil(steps_per_period * duration * rate / 2pi)
/// equal steps, then cut the grid at each sample time. Sample times must be
/// sorted and inside [0, total_duration]; segments resolved with fewer than
/// `min_steps` steps raise ConfigError.
StepPlan plan_steps(const Worldline& wl, double phase_rate, int steps_per_period,
                    std::span<const double> sample_times, int min_steps);

/// Integrate dy/dtau = f(tau, y) with classical RK4 along `plan`.
///
/// Model must provide
///   Coeffs at(std::size_t segment, double tau) const;
///   void apply(const Coeffs&, const State& y, State& dy) const;
/// Coefficients are evaluated once per distinct stage time.
template <class State, class Model, class OnSample>
void integrate_rk4(const StepPlan& plan, const Model& model, State& y, OnSample&& on_sample)
{
    for (auto idx : plan.initial_samples) {
        on_sample(idx, y);
    }
    State k1 = y, k2 = y, k3 = y, k4 = y, tmp = y;
    for (const auto& iv : plan.intervals) {
        const double h = (iv.end - iv.begin) / iv.steps;
        auto c_begin = model.at(iv.segment, iv.begin);
        for (int s = 0; s < iv.steps; ++s) {
            const double tau = iv.begin + s * h;
            const double tau_end = (s + 1 == iv.steps) ? iv.end : tau + h;
            const auto c_mid = model.at(iv.segment, tau + 0.5 * h);
            auto c_end = model.at(iv.segment, tau_end);

            model.apply(c_begin, y, k1);
            tmp = y + (0.5 * h) * k1;
            model.apply(c_mid, tmp, k2);
            tmp = y + (0.5 * h) * k2;
            model.apply(c_mid, tmp, k3);
            tmp = y + h * k3;
            model.apply(c_end, tmp, k4);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

            c_begin = std::move(c_end);
        }
        if (iv.sample >= 0) {
            on_sample(static_cast<std::size_t>(iv.sample), y);
        }
    }
}

}  // namespace rqrc
