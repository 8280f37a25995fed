#pragma once

// Input feature vector -> proper-acceleration schedule.

#include "rqrc/worldline.hpp"

#include <span>
#include <vector>

namespace rqrc {

struct InputRange {
    double min = 0.0;
    double max = 1.0;
};

struct EncodingConfig {
    double a0 = 1.0;       ///< base acceleration
    double delta_a = 0.1;  ///< acceleration span
    double period = 2.0;   ///< T; each of the four pieces per feature lasts T/2
    int repetitions = 4;   ///< m
    std::vector<InputRange> input_ranges;

    /// delta_a = ratio * a0, the usual way the span is quoted.
    static EncodingConfig with_ratio(double a0, double ratio, double period, int repetitions,
                                     std::vector<InputRange> ranges);

    /// Throws ConfigError on a0 <= 0, delta_a < 0, T <= 0, m < 1 or a degenerate range.
    void validate() const;

    std::size_t dimension() const { return input_ranges.size(); }
    double total_duration() const;  ///< 2 N T m
};

/// Affine map of each coordinate onto [a0, a0 + delta_a]. Inputs beyond
/// their range by more than 1e-9 raise EncodingError.
std::vector<double> map_input(std::span<const double> x, const EncodingConfig& cfg);

/// m repetitions of (a_1, -a_1, -a_1, a_1, ..., a_N, -a_N, -a_N, a_N), each piece T/2.
AccelerationProfile build_profile(std::span<const double> accelerations, const EncodingConfig& cfg);

/// map_input followed by build_profile.
AccelerationProfile encode(std::span<const double> x, const EncodingConfig& cfg);

}  // namespace rqrc
