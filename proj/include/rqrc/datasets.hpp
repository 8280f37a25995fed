#pragma once

// Two-spiral benchmark generation, seeded splits and CSV persistence.

#include "rqrc/encoding.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace rqrc {

/// Portable random stream: std::mt19937_64 bits with explicit transforms, so
/// a seed produces the same numbers on every standard library.
class PortableRng {
  public:
    explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }
    /// Uniform in (0, 1].
    double uniform_open_closed();
    /// Uniform in [0, 1).
    double uniform();
    /// Standard normal (Box-Muller, both variates used).
    double normal();
    /// Uniform integer in [0, bound), unbiased.
    std::uint64_t below(std::uint64_t bound);

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct SpiralParams {
    std::size_t count = 5000;
    double turns = 1.5;
    double radius = 1.0;
    double noise_sd = 0.02;
    std::uint64_t seed = 1;
};

struct LabeledDataset {
    std::vector<std::array<double, 2>> points;
    std::vector<int> labels;

    std::size_t size() const { return points.size(); }
    /// Points as vectors, the form the reservoir consumes.
    std::vector<std::vector<double>> inputs() const;
    /// Per-coordinate bounding box.
    std::vector<InputRange> bounding_box() const;
};

/// Pairs of points on two interlocking Archimedean spirals. Each pair shares
/// theta = 2 pi turns sqrt(u), u ~ U(0,1]; branch s = +1 / -1 is
/// s (r sin theta, r cos theta) with r = radius theta / (2 pi turns), plus
/// independent N(0, noise_sd^2) noise per coordinate.
LabeledDataset two_spirals(const SpiralParams& params);

/// Seeded shuffle, then the first n_train / next n_test points.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, std::size_t n_train,
                                                std::size_t n_test, std::uint64_t seed);

/// CSV with header x1,x2,label, values printed with 17 significant digits.
/// Lines starting with '#' are comments.
void save_csv(const LabeledDataset& ds, const std::filesystem::path& path,
              const std::string& comment = {});
LabeledDataset load_csv(const std::filesystem::path& path);

}  // namespace rqrc
