#include "rqrc/gaussian_engine.hpp"

#include "rqrc/error.hpp"
#include "rqrc/integration.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace rqrc {

namespace {

constexpr cplx kI{0.0, 1.0};

/// Nonzero entries of the generator M = -i Omega F_sym, per field slot s
/// (1-based in Psi, 0-based here). D = N + 1 is the offset of the creation block.
///   M[0][s]   = -i conj(c2)   M[0][D+s]   = -i conj(c1)
///   M[D][s]   =  i c1         M[D][D+s]   =  i c2
///   M[s][0]   = -i c2         M[s][D]     = -i conj(c1)
///   M[D+s][0] =  i c1         M[D+s][D]   =  i conj(c2)
struct Generator {
    std::vector<cplx> c1;
    std::vector<cplx> c2;
};

class GaussianModel {
  public:
    GaussianModel(const ModeSet& modes, const Worldline& wl) : modes_(modes), wl_(wl) {}

    Generator at(std::size_t segment, double tau) const
    {
        const auto wp = wl_.in_segment(segment, tau);
        const auto couplings = mode_couplings(modes_, wp);
        Generator g;
        g.c1.reserve(couplings.size());
        g.c2.reserve(couplings.size());
        for (const auto& c : couplings) {
            g.c1.push_back(c.rotating_pair);
            g.c2.push_back(c.counter_pair);
        }
        return g;
    }

    /// dy = M y, column by column.
    void apply(const Generator& g, const Eigen::MatrixXcd& y, Eigen::MatrixXcd& dy) const
    {
        const Eigen::Index n = static_cast<Eigen::Index>(g.c1.size());
        const Eigen::Index d = n + 1;
        dy.resize(y.rows(), y.cols());
        for (Eigen::Index col = 0; col < y.cols(); ++col) {
            const cplx* x = y.col(col).data();
            cplx* out = dy.col(col).data();
            const cplx xb = x[0];
            const cplx xbd = x[d];
            cplx acc0 = 0.0;
            cplx accd = 0.0;
            for (Eigen::Index s = 0; s < n; ++s) {
                const cplx c1 = g.c1[s];
                const cplx c2 = g.c2[s];
                const cplx c1c = std::conj(c1);
                const cplx c2c = std::conj(c2);
                const cplx xa = x[1 + s];
                const cplx xad = x[d + 1 + s];
                acc0 += c2c * xa + c1c * xad;
                accd += c1 * xa + c2 * xad;
                out[1 + s] = -kI * (c2 * xb + c1c * xbd);
                out[d + 1 + s] = kI * (c1 * xb + c2c * xbd);
            }
            out[0] = -kI * acc0;
            out[d] = kI * accd;
        }
    }

  private:
    const ModeSet& modes_;
    const Worldline& wl_;
};

StepPlan make_plan(const ModeSet& modes, const Worldline& wl, const StepConfig& cfg,
                   std::span<const double> sample_times)
{
    validate(cfg);
    const double rate = fastest_phase_rate(modes.detector_frequency, modes.max_frequency(), wl);
    return plan_steps(wl, rate, cfg.steps_per_period, sample_times, kMinStepsPerSegment);
}

}  // namespace

ModeSet ModeSet::cavity(int n_modes, double detector_frequency, double coupling,
                        int coherent_mode, cplx alpha)
{
    if (n_modes < 1) {
        throw ConfigError(fmt::format("cavity needs at least one mode, got {}", n_modes));
    }
    if (coherent_mode < 1) {
        throw ConfigError(fmt::format("coherent mode must be >= 1, got {}", coherent_mode));
    }
    ModeSet m;
    m.detector_frequency = detector_frequency;
    m.cavity_length = coherent_mode * std::numbers::pi / detector_frequency;
    m.coupling = coupling;
    m.coherent_mode = coherent_mode;
    m.alpha = alpha;
    m.mode_numbers.resize(static_cast<std::size_t>(n_modes));
    for (int n = 1; n <= n_modes; ++n) {
        m.mode_numbers[static_cast<std::size_t>(n - 1)] = n;
    }
    return m;
}

ModeSet ModeSet::single_mode(double detector_frequency, double coupling, int coherent_mode,
                             cplx alpha)
{
    auto m = cavity(1, detector_frequency, coupling, coherent_mode, alpha);
    m.mode_numbers = {coherent_mode};
    return m;
}

double ModeSet::frequency(int n) const
{
    return n * std::numbers::pi / cavity_length;
}

double ModeSet::max_frequency() const
{
    int n_max = 0;
    for (int n : mode_numbers) {
        n_max = std::max(n_max, n);
    }
    return frequency(n_max);
}

std::optional<std::size_t> ModeSet::coherent_slot() const
{
    for (std::size_t i = 0; i < mode_numbers.size(); ++i) {
        if (mode_numbers[i] == coherent_mode) {
            return i + 1;
        }
    }
    return std::nullopt;
}

void ModeSet::validate() const
{
    if (!(cavity_length > 0.0) || !std::isfinite(cavity_length)) {
        throw ConfigError(fmt::format("cavity length must be positive, got {}", cavity_length));
    }
    if (!(detector_frequency > 0.0) || !std::isfinite(detector_frequency)) {
        throw ConfigError(
          fmt::format("detector frequency must be positive, got {}", detector_frequency));
    }
    if (!std::isfinite(coupling)) {
        throw ConfigError("coupling must be finite");
    }
    if (mode_numbers.empty()) {
        throw ConfigError("mode set is empty");
    }
    auto sorted = mode_numbers;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 1 || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ConfigError("mode numbers must be positive and distinct");
    }
    if (coherent_mode < 1) {
        throw ConfigError(fmt::format("coherent mode must be >= 1, got {}", coherent_mode));
    }
    const double resonance = frequency(coherent_mode);
    if (std::abs(resonance - detector_frequency) > 1e-9 * detector_frequency) {
        throw ConfigError(fmt::format(
          "detector frequency {} is not resonant with cavity mode {} (omega = {})",
          detector_frequency, coherent_mode, resonance));
    }
    if (alpha != cplx{0.0, 0.0} && !coherent_slot()) {
        throw ConfigError(
          fmt::format("coherent mode {} is not among the simulated modes", coherent_mode));
    }
}

Eigen::MatrixXd symplectic_form(std::size_t n_modes)
{
    const auto d = static_cast<Eigen::Index>(n_modes + 1);
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    omega.topRightCorner(d, d).setIdentity();
    omega.bottomLeftCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
    return omega;
}

Eigen::MatrixXd conjugation_swap(std::size_t n_modes)
{
    const auto d = static_cast<Eigen::Index>(n_modes + 1);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    x.topRightCorner(d, d).setIdentity();
    x.bottomLeftCorner(d, d).setIdentity();
    return x;
}

GaussianState initial_state(const ModeSet& modes)
{
    modes.validate();
    const auto d = static_cast<Eigen::Index>(modes.size() + 1);
    GaussianState s;
    s.mean = Eigen::VectorXcd::Zero(2 * d);
    s.cov = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
    // <a_k a_k^dag> = 1 for vacuum and coherent modes alike.
    s.cov.topRightCorner(d, d).setIdentity();
    if (auto slot = modes.coherent_slot()) {
        const auto k = static_cast<Eigen::Index>(*slot);
        s.mean[k] = modes.alpha;
        s.mean[d + k] = std::conj(modes.alpha);
    }
    return s;
}

std::vector<ModeCoupling> mode_couplings(const ModeSet& modes, const WorldlinePoint& wp)
{
    std::vector<ModeCoupling> out;
    out.reserve(modes.size());
    const cplx detector_phase = std::polar(1.0, -modes.detector_frequency * wp.tau);
    for (int n : modes.mode_numbers) {
        const double omega = modes.frequency(n);
        const double k = omega;
        const double g =
          modes.coupling * std::sin(k * wp.x) / std::sqrt(modes.cavity_length * omega);
        const cplx field_phase = std::polar(1.0, -omega * wp.t);
        const cplx gd = g * detector_phase;
        out.push_back({gd * field_phase, gd * std::conj(field_phase)});
    }
    return out;
}

Eigen::MatrixXcd hamiltonian_fsym(const ModeSet& modes, const WorldlinePoint& wp)
{
    const auto couplings = mode_couplings(modes, wp);
    const auto d = static_cast<Eigen::Index>(modes.size() + 1);
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
    for (Eigen::Index s = 1; s < d; ++s) {
        const auto& c = couplings[static_cast<std::size_t>(s - 1)];
        // Each term c Psi_i Psi_j contributes c/2 to F_ij and F_ji, so F_sym carries c.
        f(0, s) = f(s, 0) = c.rotating_pair;                         // b a_s
        f(0, d + s) = f(d + s, 0) = c.counter_pair;                  // b a_s^dag
        f(d, d + s) = f(d + s, d) = std::conj(c.rotating_pair);      // b^dag a_s^dag
        f(d, s) = f(s, d) = std::conj(c.counter_pair);               // b^dag a_s
    }
    return f;
}

double fastest_phase_rate(double detector_frequency, double max_field_frequency,
                          const Worldline& wl)
{
    const double dilation =
      wl.kinematics() == Kinematics::relativistic ? std::cosh(wl.max_abs_rapidity()) : 1.0;
    return detector_frequency + max_field_frequency * dilation;
}

void validate(const StepConfig& cfg)
{
    if (cfg.steps_per_period < kMinStepsPerSegment) {
        throw ConfigError(fmt::format("steps_per_period must be >= {}, got {}",
                                      kMinStepsPerSegment, cfg.steps_per_period));
    }
}

std::vector<Propagator> propagate(const ModeSet& modes, const AccelerationProfile& profile,
                                  Kinematics mode, const StepConfig& cfg,
                                  std::span<const double> sample_times)
{
    modes.validate();
    const Worldline wl(profile, mode);
    const auto plan = make_plan(modes, wl, cfg, sample_times);
    const auto dim = static_cast<Eigen::Index>(modes.dimension());

    std::vector<Propagator> out(sample_times.size());
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Identity(dim, dim);
    GaussianModel model(modes, wl);
    integrate_rk4(plan, model, s, [&](std::size_t idx, const Eigen::MatrixXcd& y) {
        out[idx] = Propagator{sample_times[idx], y};
    });
    return out;
}

GaussianState evolve(const GaussianState& state, const Propagator& s)
{
    const auto dim = s.matrix.rows();
    if (s.matrix.cols() != dim || state.mean.size() != dim || state.cov.rows() != dim ||
        state.cov.cols() != dim) {
        throw DataError(fmt::format("evolve: propagator of size {} does not match state of size {}",
                                    dim, state.mean.size()));
    }
    GaussianState out;
    out.mean = s.matrix * state.mean;
    out.cov = s.matrix * state.cov * s.matrix.transpose();
    return out;
}

DetectorObservables detector_observables(const GaussianState& state)
{
    const auto d = state.mean.size() / 2;
    const cplx beta = state.mean[0];
    DetectorObservables o;
    o.q = std::sqrt(2.0) * beta.real();
    o.p = std::sqrt(2.0) * beta.imag();
    o.n = state.cov(d, 0).real() + std::norm(beta);
    return o;
}

std::vector<DetectorObservables> detector_trajectory(const ModeSet& modes,
                                                     const AccelerationProfile& profile,
                                                     Kinematics mode, const StepConfig& cfg,
                                                     std::span<const double> sample_times)
{
    modes.validate();
    const Worldline wl(profile, mode);
    const auto plan = make_plan(modes, wl, cfg, sample_times);
    const auto d = static_cast<Eigen::Index>(modes.size() + 1);

    // Only the annihilation-block columns of S are integrated; the creation
    // block follows from S = X conj(S) X. For vacuum-like initial covariance
    //   <b^dag b> - |beta|^2 = sum_k |S[D][k]|^2,  beta = S[0][c] alpha + conj(S[D][c]) conj(alpha).
    Eigen::MatrixXcd cols = Eigen::MatrixXcd::Identity(2 * d, d);
    const auto slot = modes.coherent_slot();
    const cplx alpha = slot ? modes.alpha : cplx{0.0, 0.0};
    const auto c = static_cast<Eigen::Index>(slot.value_or(0));

    std::vector<DetectorObservables> out(sample_times.size());
    GaussianModel model(modes, wl);
    integrate_rk4(plan, model, cols, [&](std::size_t idx, const Eigen::MatrixXcd& y) {
        const cplx beta = y(0, c) * alpha + std::conj(y(d, c)) * std::conj(alpha);
        DetectorObservables o;
        o.q = std::sqrt(2.0) * beta.real();
        o.p = std::sqrt(2.0) * beta.imag();
        o.n = y.row(d).squaredNorm() + std::norm(beta);
        // Row 0 of S is (S[0][:d], conj S[d][:d]); [b, b^dag] = |u|^2 - |v|^2.
        o.commutator_error = std::abs(y.row(0).squaredNorm() - y.row(d).squaredNorm() - 1.0);
        out[idx] = o;
    });
    return out;
}

}  // namespace rqrc
