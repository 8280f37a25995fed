#include "rqrc/cqed_drive.hpp"

#include "rqrc/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <numbers>

namespace rqrc {

DriveParams DriveParams::circuit_qed_example()
{
    DriveParams p;
    p.omega0 = 1000.0;
    p.epsilon = 1100.0;
    p.detector_frequency = 1.0;
    p.g = 10.0 / std::sqrt(3.0 * std::numbers::pi);
    p.eta = 0.01;
    p.mode_frequency = 1.0;
    p.mode_wavenumber = 1.0;
    return p;
}

std::vector<std::string> DriveParams::check() const
{
    for (double v : {omega0, epsilon, detector_frequency, mode_frequency, mode_wavenumber}) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ConfigError("drive: frequencies must be positive and finite");
        }
    }
    if (!(eta >= 0.0) || eta >= 0.1) {
        throw ConfigError(fmt::format("drive: eta = {} outside [0, 0.1)", eta));
    }
    if (!(g >= 0.0) || !std::isfinite(g)) {
        throw ConfigError("drive: g must be non-negative");
    }
    std::vector<std::string> warnings;
    if (eta > 0.05) {
        warnings.push_back(fmt::format("eta = {} is not small; first-order drive expansion is poor", eta));
    }
    if (g > 0.0) {
        const double ratio = std::min({epsilon, omega0, std::abs(epsilon - omega0),
                                       epsilon + omega0}) / g;
        if (ratio < 50.0) {
            warnings.push_back(fmt::format(
              "rotating-wave margin min(epsilon, omega0, |epsilon +- omega0|)/g = {:.3g} < 50", ratio));
        }
    }
    return warnings;
}

DriveFrequencies drive_frequencies(const DriveParams& p)
{
    const DriveFrequencies f{p.epsilon + p.omega0 - p.detector_frequency,
                             p.epsilon - p.omega0 - p.detector_frequency};
    if (!(f.plus > 0.0) || !(f.minus > 0.0)) {
        throw ConfigError(fmt::format("drive tones must be positive: omega+ = {}, omega- = {}",
                                      f.plus, f.minus));
    }
    return f;
}

PhaseModulation phase_modulation(const Worldline& wl, const DriveParams& p, double tau)
{
    const auto wp = wl.at(tau);
    // dt/dtau and dx/dtau
    const bool rel = wl.kinematics() == Kinematics::relativistic;
    const double ch = rel ? std::cosh(wp.xi) : 1.0;
    const double sh = rel ? std::sinh(wp.xi) : wp.xi;
    return {p.mode_frequency * wp.t + p.mode_wavenumber * wp.x,
            p.mode_frequency * wp.t - p.mode_wavenumber * wp.x,
            p.mode_frequency * ch + p.mode_wavenumber * sh,
            p.mode_frequency * ch - p.mode_wavenumber * sh};
}

std::vector<double> drive_grid(const DriveParams& p, const Worldline& wl, int samples_per_period)
{
    const auto& profile = wl.profile();
    if (profile.empty()) {
        return {};
    }
    const auto tones = drive_frequencies(p);
    const double period = 2.0 * std::numbers::pi / tones.plus;
    const double total = profile.total_duration();
    const auto n = static_cast<std::size_t>(std::ceil(total / period * samples_per_period));
    std::vector<double> grid(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        grid[i] = total * static_cast<double>(i) / static_cast<double>(n);
    }
    return grid;
}

DriveSignal drive_waveform(const DriveParams& p, const Worldline& wl,
                           std::span<const double> tau_grid)
{
    p.check();
    const auto tones = drive_frequencies(p);
    DriveSignal s;
    if (tau_grid.empty()) {
        return s;
    }
    const double max_spacing = 2.0 * std::numbers::pi / tones.plus / 20.0;
    for (std::size_t i = 1; i < tau_grid.size(); ++i) {
        if (tau_grid[i] - tau_grid[i - 1] > max_spacing * (1.0 + 1e-12)) {
            throw ConfigError(fmt::format(
              "drive grid spacing {} exceeds {} (20 samples per omega+ period)",
              tau_grid[i] - tau_grid[i - 1], max_spacing));
        }
    }

    const std::size_t n = tau_grid.size();
    for (auto* v : {&s.tau, &s.theta_plus, &s.theta_minus, &s.rate_plus, &s.rate_minus,
                    &s.f_plus, &s.f_minus, &s.f, &s.zeta_exact, &s.zeta_slow}) {
        v->resize(n);
    }
    const double wp = tones.plus;
    const double wm = tones.minus;
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = tau_grid[i];
        const auto ph = phase_modulation(wl, p, tau);
        // F+ = cos(w+ tau - th-) - cos(w+ tau - th+),  F- = cos(w- tau + th+) - cos(w- tau + th-)
        const double a1 = wp * tau - ph.theta_minus;
        const double a2 = wp * tau - ph.theta_plus;
        const double b1 = wm * tau + ph.theta_plus;
        const double b2 = wm * tau + ph.theta_minus;
        s.tau[i] = tau;
        s.theta_plus[i] = ph.theta_plus;
        s.theta_minus[i] = ph.theta_minus;
        s.rate_plus[i] = ph.rate_plus;
        s.rate_minus[i] = ph.rate_minus;
        s.f_plus[i] = std::cos(a1) - std::cos(a2);
        s.f_minus[i] = std::cos(b1) - std::cos(b2);
        s.f[i] = s.f_plus[i] + s.f_minus[i];
        s.zeta_exact[i] = -std::sin(a1) * (wp - ph.rate_minus) + std::sin(a2) * (wp - ph.rate_plus)
                          - std::sin(b1) * (wm + ph.rate_plus) + std::sin(b2) * (wm + ph.rate_minus);
        s.zeta_slow[i] = -wp * std::sin(a1) + wp * std::sin(a2) - wm * std::sin(b1) + wm * std::sin(b2);

        s.max_slow_residual = std::max(s.max_slow_residual, std::abs(s.zeta_exact[i] - s.zeta_slow[i]));
        s.max_rate = std::max({s.max_rate, std::abs(ph.rate_plus), std::abs(ph.rate_minus)});
    }
    s.modulation_ratio = s.max_rate / std::min(wp, wm);
    return s;
}

CouplingReport effective_coupling_check(const DriveParams& p, const ModeSet& modes)
{
    modes.validate();
    const double omega_n = modes.frequency(modes.coherent_mode);
    CouplingReport r;
    r.simulated = modes.coupling / std::sqrt(modes.cavity_length * omega_n);
    r.drive = p.g * p.eta / p.detector_frequency;
    r.zero_coupling = r.drive == 0.0;
    if (r.zero_coupling) {
        r.ratio = std::numeric_limits<double>::infinity();
        r.match = false;
        r.message = "drive produces zero effective coupling (g eta = 0)";
        return r;
    }
    r.ratio = r.simulated / r.drive;
    r.match = std::abs(r.ratio - 1.0) <= 1e-6;
    r.message = r.match ? "match"
                        : fmt::format("mismatch: lambda/sqrt(L omega_n) = {:.9g}, g eta/Omega = {:.9g} (ratio {:.6g})",
                                      r.simulated, r.drive, r.ratio);
    return r;
}

void save_drive_csv(const DriveSignal& s, const DriveParams& p, const std::filesystem::path& path,
                    const std::string& comment)
{
    std::ofstream os(path);
    if (!os) {
        throw DataError(fmt::format("cannot open {} for writing", path.string()));
    }
    if (!comment.empty()) {
        os << "# " << comment << '\n';
    }
    os << fmt::format("# tau in {}, rates and zeta in {}\n", p.time_unit, p.frequency_unit);
    os << "tau,theta_plus,theta_minus,theta_dot_plus,theta_dot_minus,F,zeta_exact,zeta_slow\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                          s.tau[i], s.theta_plus[i], s.theta_minus[i], s.rate_plus[i],
                          s.rate_minus[i], s.f[i], s.zeta_exact[i], s.zeta_slow[i]);
    }
}

}  // namespace rqrc
