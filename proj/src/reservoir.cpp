#include "rqrc/reservoir.hpp"

#include "rqrc/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <mutex>
#include <thread>

namespace rqrc {

double ReservoirConfig::resolved_interval() const
{
    return measurement_interval > 0.0 ? measurement_interval : 0.5 * encoding.period;
}

std::size_t ReservoirConfig::measurement_count() const
{
    const double ratio = encoding.total_duration() / resolved_interval();
    return static_cast<std::size_t>(std::llround(ratio));
}

std::vector<double> ReservoirConfig::measurement_times() const
{
    const std::size_t k_tot = measurement_count();
    const double dt = resolved_interval();
    std::vector<double> times(k_tot);
    for (std::size_t k = 1; k <= k_tot; ++k) {
        times[k - 1] = static_cast<double>(k) * dt;
    }
    if (!times.empty()) {
        times.back() = encoding.total_duration();
    }
    return times;
}

void ReservoirConfig::validate() const
{
    encoding.validate();
    modes.validate();
    rqrc::validate(step);
    if (encoding.dimension() == 0) {
        throw ConfigError("reservoir: encoding has no input dimensions");
    }
    if (!std::isfinite(measurement_interval)) {
        throw ConfigError("reservoir: measurement interval must be finite");
    }
    const double ratio = encoding.total_duration() / resolved_interval();
    const double k = std::round(ratio);
    if (k < 1.0 || std::abs(ratio - k) * resolved_interval() > 1e-12 * std::max(1.0, encoding.total_duration())) {
        throw ConfigError(fmt::format("reservoir: Delta T = {} does not divide total duration {}",
                                      resolved_interval(), encoding.total_duration()));
    }
    if (engine == Engine::dense_qubit) {
        const double r = std::abs(modes.alpha);
        if (fock_cutoff < 3 || fock_cutoff < r * r + 8.0 * r) {
            throw ConfigError(fmt::format("reservoir: Fock cutoff {} too small for |alpha| = {}",
                                          fock_cutoff, r));
        }
    }
}

std::vector<std::string> feature_names(const ReservoirConfig& cfg)
{
    const bool qubit = cfg.engine == Engine::dense_qubit;
    std::vector<std::string> names;
    const std::size_t k_tot = cfg.measurement_count();
    names.reserve(3 * k_tot + 1);
    for (std::size_t k = 1; k <= k_tot; ++k) {
        names.push_back(fmt::format("{}_{}", qubit ? "pz" : "n", k));
        names.push_back(fmt::format("{}_{}", qubit ? "px" : "q", k));
        names.push_back(fmt::format("{}_{}", qubit ? "py" : "p", k));
    }
    names.emplace_back("bias");
    return names;
}

FeatureVector features_for(std::span<const double> x, const ReservoirConfig& cfg,
                           FeatureDiagnostics* diagnostics)
{
    cfg.validate();
    const auto profile = encode(x, cfg.encoding);
    const auto times = cfg.measurement_times();
    const std::size_t k_tot = times.size();

    FeatureDiagnostics diag;
    {
        const Worldline wl(profile, cfg.kinematics);
        const auto [lo, hi] = wl.position_range();
        diag.min_position = lo;
        diag.max_position = hi;
        diag.outside_cavity = lo < 0.0 - 1e-12 || hi > cfg.modes.cavity_length;
    }

    FeatureVector fv;
    fv.values.resize(static_cast<Eigen::Index>(3 * k_tot + 1));
    auto put = [&](std::size_t k, double a, double b, double c) {
        const auto i = static_cast<Eigen::Index>(3 * k);
        fv.values[i] = a;
        fv.values[i + 1] = b;
        fv.values[i + 2] = c;
    };

    if (cfg.engine == Engine::gaussian) {
        const auto obs = detector_trajectory(cfg.modes, profile, cfg.kinematics, cfg.step, times);
        for (std::size_t k = 0; k < k_tot; ++k) {
            put(k, obs[k].n, obs[k].q, obs[k].p);
            diag.max_symplectic_error = std::max(diag.max_symplectic_error, obs[k].commutator_error);
        }
        if (diag.max_symplectic_error > kMaxSymplecticError) {
            throw NumericalError(fmt::format(
              "symplecticity breach: |[b, b^dag] - 1| = {:.3e} exceeds {:.0e}; raise steps_per_period",
              diag.max_symplectic_error, kMaxSymplecticError));
        }
    } else {
        const auto& m = cfg.modes;
        const auto single =
          ModeSet::single_mode(m.detector_frequency, m.coupling, m.coherent_mode, m.alpha);
        const DetectorKind kind = TwoLevel{};
        const auto psi0 = dense_initial(kind, m.alpha, cfg.fock_cutoff);
        const auto run =
          dense_propagate(psi0, kind, single, profile, cfg.kinematics, cfg.step, times);
        diag.max_leakage = run.max_leakage;
        diag.max_norm_drift = run.max_norm_drift;
        if (!run.valid) {
            throw NumericalError(fmt::format(
              "Fock leakage {:.3e} exceeds {:.0e} (cutoff {}); raise fock_cutoff",
              run.max_leakage, kMaxLeakage, cfg.fock_cutoff));
        }
        for (std::size_t k = 0; k < k_tot; ++k) {
            const auto f = qubit_features(run.snapshots[k], kind);
            put(k, f.pz, f.px, f.py);
        }
    }
    fv.values[static_cast<Eigen::Index>(3 * k_tot)] = 1.0;

    if (!fv.values.allFinite()) {
        throw NumericalError("non-finite feature produced");
    }
    if (diagnostics) {
        *diagnostics = diag;
    }
    return fv;
}

FeatureMatrix feature_matrix(std::span<const std::vector<double>> points,
                             const ReservoirConfig& cfg, int workers)
{
    cfg.validate();
    const auto n = points.size();
    FeatureMatrix out;
    out.phi.resize(static_cast<Eigen::Index>(cfg.feature_dimension()),
                   static_cast<Eigen::Index>(n));
    std::vector<FeatureDiagnostics> diags(n);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= n) {
                return;
            }
            try {
                const auto fv = features_for(points[j], cfg, &diags[j]);
                out.phi.col(static_cast<Eigen::Index>(j)) = fv.values;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(n);
                return;
            }
        }
    };

    const int threads = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    for (const auto& d : diags) {
        out.worst.max_leakage = std::max(out.worst.max_leakage, d.max_leakage);
        out.worst.max_norm_drift = std::max(out.worst.max_norm_drift, d.max_norm_drift);
        out.worst.max_symplectic_error = std::max(out.worst.max_symplectic_error, d.max_symplectic_error);
        out.worst.min_position = std::min(out.worst.min_position, d.min_position);
        out.worst.max_position = std::max(out.worst.max_position, d.max_position);
        out.outside_cavity += d.outside_cavity ? 1 : 0;
    }
    out.worst.outside_cavity = out.outside_cavity > 0;
    return out;
}

}  // namespace rqrc
