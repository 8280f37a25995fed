#include "rqrc/dense_engine.hpp"

#include "rqrc/error.hpp"
#include "rqrc/integration.hpp"

#include <cmath>
#include <fmt/format.h>

namespace rqrc {

namespace {

constexpr cplx kI{0.0, 1.0};

class DenseModel {
  public:
    DenseModel(const ModeSet& modes, const Worldline& wl, int levels, int n_max)
        : modes_(modes), wl_(wl), levels_(levels), fock_(n_max + 1)
    {
        sqrt_.resize(static_cast<std::size_t>(std::max(levels, fock_) + 1));
        for (std::size_t i = 0; i < sqrt_.size(); ++i) {
            sqrt_[i] = std::sqrt(static_cast<double>(i));
        }
    }

    ModeCoupling at(std::size_t segment, double tau) const
    {
        return mode_couplings(modes_, wl_.in_segment(segment, tau)).front();
    }

    // H = B (c1 a + c2 a^dag) + B^dag (conj(c1) a^dag + conj(c2) a),  dy = -i H y.
    void apply(const ModeCoupling& c, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) const
    {
        dy.setZero(y.size());
        const cplx c1 = c.rotating_pair;
        const cplx c2 = c.counter_pair;
        const cplx c1c = std::conj(c1);
        const cplx c2c = std::conj(c2);
        const cplx* in = y.data();
        cplx* out = dy.data();
        const int f = fock_;
        for (int j = 0; j < levels_; ++j) {
            const cplx* row = in + j * f;
            if (j >= 1) {
                // B lowers j -> j-1 with weight sqrt(j).
                cplx* dst = out + (j - 1) * f;
                const double w = sqrt_[static_cast<std::size_t>(j)];
                for (int n = 0; n < f; ++n) {
                    cplx v = 0.0;
                    if (n + 1 < f) v += c1 * sqrt_[static_cast<std::size_t>(n + 1)] * row[n + 1];
                    if (n >= 1) v += c2 * sqrt_[static_cast<std::size_t>(n)] * row[n - 1];
                    dst[n] += -kI * w * v;
                }
            }
            if (j + 1 < levels_) {
                cplx* dst = out + (j + 1) * f;
                const double w = sqrt_[static_cast<std::size_t>(j + 1)];
                for (int n = 0; n < f; ++n) {
                    cplx v = 0.0;
                    if (n >= 1) v += c1c * sqrt_[static_cast<std::size_t>(n)] * row[n - 1];
                    if (n + 1 < f) v += c2c * sqrt_[static_cast<std::size_t>(n + 1)] * row[n + 1];
                    dst[n] += -kI * w * v;
                }
            }
        }
    }

  private:
    const ModeSet& modes_;
    const Worldline& wl_;
    int levels_;
    int fock_;
    std::vector<double> sqrt_;
};

/// <b> and <b^dag b> of the detector (b truncated to the state's levels).
std::pair<cplx, double> detector_moments(const DenseState& s)
{
    cplx lower = 0.0;
    double number = 0.0;
    for (int j = 0; j < s.levels; ++j) {
        for (int n = 0; n <= s.n_max; ++n) {
            const cplx a = s.at(j, n);
            number += j * std::norm(a);
            if (j >= 1) {
                lower += std::sqrt(static_cast<double>(j)) * std::conj(s.at(j - 1, n)) * a;
            }
        }
    }
    return {lower, number};
}

}  // namespace

int detector_levels(const DetectorKind& kind)
{
    if (std::holds_alternative<TwoLevel>(kind)) {
        return 2;
    }
    const int d = std::get<Harmonic>(kind).levels;
    if (d < 2) {
        throw ConfigError(fmt::format("harmonic detector needs >= 2 levels, got {}", d));
    }
    return d;
}

double DenseState::leakage() const
{
    double p = 0.0;
    for (int j = 0; j < levels; ++j) {
        for (int n = std::max(0, n_max - 2); n <= n_max; ++n) {
            p += std::norm(at(j, n));
        }
    }
    return p;
}

double coherent_truncation_loss(cplx alpha, int n_max)
{
    // Poisson weights by recursion: p_0 = e^{-|a|^2}, p_n = p_{n-1} |a|^2 / n.
    const double mean = std::norm(alpha);
    double p = std::exp(-mean);
    double kept = p;
    for (int n = 1; n <= n_max; ++n) {
        p *= mean / n;
        kept += p;
    }
    return std::max(0.0, 1.0 - kept);
}

DenseState dense_initial(const DetectorKind& kind, cplx alpha, int n_max)
{
    const double r = std::abs(alpha);
    if (n_max < 3 || n_max < r * r + 8.0 * r) {
        throw ConfigError(fmt::format(
          "Fock cutoff {} below coherent-state tail criterion |alpha|^2 + 8|alpha| = {} (min 3)",
          n_max, r * r + 8.0 * r));
    }
    DenseState s;
    s.levels = detector_levels(kind);
    s.n_max = n_max;
    s.amplitudes = Eigen::VectorXcd::Zero(s.levels * (n_max + 1));
    cplx c = std::exp(-0.5 * r * r);
    s.at(0, 0) = c;
    for (int n = 1; n <= n_max; ++n) {
        c *= alpha / std::sqrt(static_cast<double>(n));
        s.at(0, n) = c;
    }
    s.amplitudes.normalize();
    return s;
}

DenseRun dense_propagate(const DenseState& state, const DetectorKind& kind, const ModeSet& modes,
                         const AccelerationProfile& profile, Kinematics mode,
                         const StepConfig& cfg, std::span<const double> sample_times)
{
    modes.validate();
    validate(cfg);
    if (modes.size() != 1) {
        throw ConfigError(fmt::format("dense engine simulates one field mode, got {}", modes.size()));
    }
    const int levels = detector_levels(kind);
    if (state.levels != levels ||
        state.amplitudes.size() != static_cast<Eigen::Index>(levels) * (state.n_max + 1)) {
        throw ConfigError("dense state does not match the detector kind");
    }

    const Worldline wl(profile, mode);
    const double omega = modes.max_frequency();
    const double g_max = std::abs(modes.coupling) / std::sqrt(modes.cavity_length * omega);
    const double ladder = std::sqrt(static_cast<double>(state.n_max + 1)) *
                          std::sqrt(static_cast<double>(levels - 1));
    const double rate = std::max(fastest_phase_rate(modes.detector_frequency, omega, wl),
                                 2.0 * g_max * ladder);
    const auto plan =
      plan_steps(wl, rate, cfg.steps_per_period, sample_times, kMinStepsPerSegment);

    DenseRun run;
    run.snapshots.resize(sample_times.size());
    const double norm0 = state.norm();
    Eigen::VectorXcd y = state.amplitudes;
    DenseModel model(modes, wl, levels, state.n_max);
    integrate_rk4(plan, model, y, [&](std::size_t idx, const Eigen::VectorXcd& v) {
        DenseState snap{v, levels, state.n_max};
        run.max_leakage = std::max(run.max_leakage, snap.leakage());
        run.max_norm_drift = std::max(run.max_norm_drift, std::abs(snap.norm() - norm0));
        run.snapshots[idx] = std::move(snap);
    });
    run.valid = run.max_leakage < kMaxLeakage;
    return run;
}

DetectorObservables harmonic_observables(const DenseState& state)
{
    const auto [beta, number] = detector_moments(state);
    return {number, std::sqrt(2.0) * beta.real(), std::sqrt(2.0) * beta.imag()};
}

QubitFeatures qubit_features(const DenseState& state, const DetectorKind& kind)
{
    if (!std::holds_alternative<TwoLevel>(kind) || state.levels != 2) {
        throw ConfigError("qubit_features requires a two-level detector");
    }
    const auto [lower, excited] = detector_moments(state);
    // <sigma-> = lower; sigma_x-like = 2 Re/sqrt2, sigma_y-like = 2 Im/sqrt2.
    return {excited, std::sqrt(2.0) * lower.real(), std::sqrt(2.0) * lower.imag()};
}

}  // namespace rqrc
