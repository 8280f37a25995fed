#include "rqrc/encoding.hpp"

#include "rqrc/error.hpp"

#include <cmath>
#include <fmt/format.h>

namespace rqrc {

namespace {
constexpr double kRangeTolerance = 1e-9;
}

EncodingConfig EncodingConfig::with_ratio(double a0, double ratio, double period,
                                          int repetitions, std::vector<InputRange> ranges)
{
    EncodingConfig cfg;
    cfg.a0 = a0;
    cfg.delta_a = ratio * a0;
    cfg.period = period;
    cfg.repetitions = repetitions;
    cfg.input_ranges = std::move(ranges);
    return cfg;
}

void EncodingConfig::validate() const
{
    if (!(a0 > 0.0) || !std::isfinite(a0)) {
        throw ConfigError(fmt::format("encoding: a0 must be positive, got {}", a0));
    }
    if (!(delta_a >= 0.0) || !std::isfinite(delta_a)) {
        throw ConfigError(fmt::format("encoding: delta_a must be non-negative, got {}", delta_a));
    }
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw ConfigError(fmt::format("encoding: T must be positive, got {}", period));
    }
    if (repetitions < 1) {
        throw ConfigError(fmt::format("encoding: m must be >= 1, got {}", repetitions));
    }
    for (std::size_t i = 0; i < input_ranges.size(); ++i) {
        const auto& r = input_ranges[i];
        if (!(r.min < r.max)) {
            throw ConfigError(
              fmt::format("encoding: degenerate input range {} [{}, {}]", i, r.min, r.max));
        }
    }
}

double EncodingConfig::total_duration() const
{
    return 2.0 * static_cast<double>(dimension()) * period * repetitions;
}

std::vector<double> map_input(std::span<const double> x, const EncodingConfig& cfg)
{
    cfg.validate();
    if (x.size() != cfg.dimension()) {
        throw EncodingError(
          fmt::format("input has {} coordinates, encoding expects {}", x.size(), cfg.dimension()));
    }
    std::vector<double> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto& r = cfg.input_ranges[i];
        if (!std::isfinite(x[i]) || x[i] < r.min - kRangeTolerance ||
            x[i] > r.max + kRangeTolerance) {
            throw EncodingError(
              fmt::format("input coordinate {} = {} outside [{}, {}]", i, x[i], r.min, r.max));
        }
        a[i] = cfg.a0 + cfg.delta_a * (x[i] - r.min) / (r.max - r.min);
    }
    return a;
}

AccelerationProfile build_profile(std::span<const double> accelerations,
                                  const EncodingConfig& cfg)
{
    cfg.validate();
    for (double a : accelerations) {
        if (!(a > 0.0)) {
            throw ConfigError(fmt::format("build_profile: accelerations must be positive, got {}", a));
        }
    }
    const double half = 0.5 * cfg.period;
    std::vector<Segment> segments;
    segments.reserve(4 * accelerations.size() * static_cast<std::size_t>(cfg.repetitions));
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        for (double a : accelerations) {
            segments.push_back({a, half});
            segments.push_back({-a, half});
            segments.push_back({-a, half});
            segments.push_back({a, half});
        }
    }
    return AccelerationProfile(std::move(segments));
}

AccelerationProfile encode(std::span<const double> x, const EncodingConfig& cfg)
{
    const auto a = map_input(x, cfg);
    return build_profile(a, cfg);
}

}  // namespace rqrc
