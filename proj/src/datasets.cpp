#include "rqrc/datasets.hpp"

#include "rqrc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <numbers>

namespace rqrc {

double PortableRng::uniform_open_closed()
{
    return static_cast<double>((bits() >> 11) + 1) * 0x1.0p-53;
}

double PortableRng::uniform()
{
    return static_cast<double>(bits() >> 11) * 0x1.0p-53;
}

double PortableRng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_open_closed();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phase = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phase);
    has_spare_ = true;
    return r * std::cos(phase);
}

std::uint64_t PortableRng::below(std::uint64_t bound)
{
    if (bound == 0) {
        throw ConfigError("PortableRng::below(0)");
    }
    // Rejection keeps the draw exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
        v = bits();
    } while (v >= limit);
    return v % bound;
}

std::vector<std::vector<double>> LabeledDataset::inputs() const
{
    std::vector<std::vector<double>> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        out.push_back({p[0], p[1]});
    }
    return out;
}

std::vector<InputRange> LabeledDataset::bounding_box() const
{
    if (points.empty()) {
        throw DataError("bounding box of an empty dataset");
    }
    std::vector<InputRange> box(2, {std::numeric_limits<double>::infinity(),
                                    -std::numeric_limits<double>::infinity()});
    for (const auto& p : points) {
        for (std::size_t d = 0; d < 2; ++d) {
            box[d].min = std::min(box[d].min, p[d]);
            box[d].max = std::max(box[d].max, p[d]);
        }
    }
    return box;
}

LabeledDataset two_spirals(const SpiralParams& params)
{
    if (params.count < 2 || params.count % 2 != 0) {
        throw ConfigError(fmt::format("spiral count must be even and >= 2, got {}", params.count));
    }
    if (!(params.turns > 0.0) || !(params.radius > 0.0) || !(params.noise_sd >= 0.0)) {
        throw ConfigError("spiral turns and radius must be positive, noise_sd non-negative");
    }
    PortableRng rng(params.seed);
    const double sweep = 2.0 * std::numbers::pi * params.turns;
    LabeledDataset ds;
    ds.points.reserve(params.count);
    ds.labels.reserve(params.count);
    for (std::size_t i = 0; i < params.count / 2; ++i) {
        const double theta = sweep * std::sqrt(rng.uniform_open_closed());
        const double r = params.radius * theta / sweep;
        for (int s : {1, -1}) {
            double x1 = s * r * std::sin(theta);
            double x2 = s * r * std::cos(theta);
            if (params.noise_sd > 0.0) {
                x1 += params.noise_sd * rng.normal();
                x2 += params.noise_sd * rng.normal();
            }
            ds.points.push_back({x1, x2});
            ds.labels.push_back(s);
        }
    }
    return ds;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, std::size_t n_train,
                                                std::size_t n_test, std::uint64_t seed)
{
    if (n_train + n_test > ds.size()) {
        throw ConfigError(fmt::format("split of {} + {} from a dataset of {}", n_train, n_test,
                                      ds.size()));
    }
    std::vector<std::size_t> order(ds.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    PortableRng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }
    std::pair<LabeledDataset, LabeledDataset> out;
    for (std::size_t k = 0; k < n_train + n_test; ++k) {
        auto& dst = k < n_train ? out.first : out.second;
        dst.points.push_back(ds.points[order[k]]);
        dst.labels.push_back(ds.labels[order[k]]);
    }
    return out;
}

void save_csv(const LabeledDataset& ds, const std::filesystem::path& path,
              const std::string& comment)
{
    std::ofstream os(path);
    if (!os) {
        throw DataError(fmt::format("cannot open {} for writing", path.string()));
    }
    if (!comment.empty()) {
        os << "# " << comment << '\n';
    }
    os << "x1,x2,label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        os << fmt::format("{:.17g},{:.17g},{}\n", ds.points[i][0], ds.points[i][1], ds.labels[i]);
    }
    if (!os) {
        throw DataError(fmt::format("write to {} failed", path.string()));
    }
}

namespace {

double parse_double(std::string_view field, std::size_t line)
{
    double v = 0.0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw DataError(fmt::format("line {}: cannot parse number '{}'", line, field));
    }
    return v;
}

}  // namespace

LabeledDataset load_csv(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) {
        throw DataError(fmt::format("cannot open {}", path.string()));
    }
    LabeledDataset ds;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header) {
            if (line != "x1,x2,label") {
                throw DataError(
                  fmt::format("line {}: expected header 'x1,x2,label', got '{}'", lineno, line));
            }
            header = true;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
            throw DataError(fmt::format("line {}: expected 3 fields", lineno));
        }
        const std::string_view sv(line);
        const double x1 = parse_double(sv.substr(0, c1), lineno);
        const double x2 = parse_double(sv.substr(c1 + 1, c2 - c1 - 1), lineno);
        const double lab = parse_double(sv.substr(c2 + 1), lineno);
        if (lab != 1.0 && lab != -1.0) {
            throw DataError(fmt::format("line {}: label must be +1 or -1", lineno));
        }
        ds.points.push_back({x1, x2});
        ds.labels.push_back(static_cast<int>(lab));
    }
    if (!header) {
        throw DataError(fmt::format("{}: missing header", path.string()));
    }
    return ds;
}

}  // namespace rqrc
