#include "rqrc/integration.hpp"

#include "rqrc/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace rqrc {

long StepPlan::total_steps() const
{
    long n = 0;
    for (const auto& iv : intervals) {
        n += iv.steps;
    }
    return n;
}

StepPlan plan_steps(const Worldline& wl, double phase_rate, int steps_per_period,
                    std::span<const double> sample_times, int min_steps)
{
    const auto& profile = wl.profile();
    const double total = profile.empty() ? 0.0 : profile.total_duration();
    if (!std::is_sorted(sample_times.begin(), sample_times.end())) {
        throw ConfigError("sample times must be sorted");
    }
    for (double s : sample_times) {
        if (!(s >= 0.0) || s > total * (1.0 + 1e-12)) {
            throw RangeError(fmt::format("sample time {} outside [0, {}]", s, total));
        }
    }
    if (!(phase_rate > 0.0) || !std::isfinite(phase_rate)) {
        throw ConfigError(fmt::format("phase rate must be positive, got {}", phase_rate));
    }

    StepPlan plan;
    std::size_t next = 0;
    // Snap tolerance for sample times that coincide with grid nodes.
    const double eps = 1e-12 * std::max(1.0, total);
    while (next < sample_times.size() && sample_times[next] <= eps) {
        plan.initial_samples.push_back(next++);
    }

    const auto bounds = profile.boundaries();
    for (std::size_t seg = 0; seg < profile.size(); ++seg) {
        const double begin = bounds[seg];
        const double end = bounds[seg + 1];
        const double duration = end - begin;
        const double periods = duration * phase_rate / (2.0 * std::numbers::pi);
        const long n_seg = static_cast<long>(std::ceil(steps_per_period * periods));
        if (n_seg < min_steps) {
            throw ConfigError(fmt::format(
              "segment {} resolved with {} RK4 steps, minimum is {}", seg, n_seg, min_steps));
        }
        const double h = duration / static_cast<double>(n_seg);

        double cursor = begin;
        auto push = [&](double stop, long sample) {
            const double len = stop - cursor;
            int steps = static_cast<int>(std::max(1.0, std::ceil(len / h - 1e-9)));
            plan.intervals.push_back({cursor, stop, seg, steps, sample});
            cursor = stop;
        };
        while (next < sample_times.size() && sample_times[next] < end - eps) {
            const double s = sample_times[next];
            if (s - cursor > eps) {
                push(s, static_cast<long>(next));
            } else {
                // Coincides with the previous node: reuse it.
                if (plan.intervals.empty()) {
                    plan.initial_samples.push_back(next);
                } else if (plan.intervals.back().sample < 0) {
                    plan.intervals.back().sample = static_cast<long>(next);
                } else {
                    // Duplicate sample time; zero-length interval keeps ordering simple.
                    plan.intervals.push_back({cursor, cursor, seg, 1, static_cast<long>(next)});
                }
            }
            ++next;
        }
        long sample = -1;
        if (next < sample_times.size() && sample_times[next] <= end + eps) {
            sample = static_cast<long>(next++);
        }
        push(end, sample);
        // Additional duplicates of the same boundary time.
        while (next < sample_times.size() && sample_times[next] <= end + eps) {
            plan.intervals.push_back({end, end, seg, 1, static_cast<long>(next++)});
        }
    }
    return plan;
}

}  // namespace rqrc
