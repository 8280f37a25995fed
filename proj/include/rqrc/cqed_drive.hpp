#pragma once

// Circuit-QED drive waveforms that reproduce a detector world line: an
// artificial atom (frequency epsilon) coupled to a cavity (omega0) with a
// modulated frequency shift eta * zeta(tau) b^dag b.

#include "rqrc/gaussian_engine.hpp"
#include "rqrc/worldline.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rqrc {

/// All frequencies share `frequency_unit`, times the reciprocal `time_unit`.
struct DriveParams {
    double omega0 = 1000.0;      ///< cavity frequency
    double epsilon = 1100.0;     ///< atom energy
    double detector_frequency = 1.0;  ///< simulated Omega
    double g = 0.0;              ///< atom-cavity coupling
    double eta = 0.01;           ///< drive strength
    double mode_frequency = 1.0; ///< simulated omega_n
    double mode_wavenumber = 1.0;///< simulated k_n
    std::string frequency_unit = "MHz";
    std::string time_unit = "us";

    /// Reference parameter set: omega0 = 1 GHz, epsilon = 1.1 GHz, Omega = 1 MHz,
    /// g = 10/sqrt(3 pi) MHz, eta = 0.01, omega_n = k_n = Omega (in MHz / us).
    static DriveParams circuit_qed_example();

    /// Throws ConfigError for eta >= 0.1 or non-positive frequencies; returns
    /// warnings for eta > 0.05 and (epsilon, omega0, |epsilon +- omega0|) / g < 50.
    std::vector<std::string> check() const;
};

struct DriveFrequencies {
    double plus = 0.0;   ///< epsilon + omega0 - Omega
    double minus = 0.0;  ///< epsilon - omega0 - Omega
};

/// Throws ConfigError when either tone is not positive.
DriveFrequencies drive_frequencies(const DriveParams& p);

struct PhaseModulation {
    double theta_plus = 0.0;   ///< omega_n t + k_n x
    double theta_minus = 0.0;  ///< omega_n t - k_n x
    double rate_plus = 0.0;    ///< d theta_+ / d tau
    double rate_minus = 0.0;   ///< d theta_- / d tau
};

PhaseModulation phase_modulation(const Worldline& wl, const DriveParams& p, double tau);

struct DriveSignal {
    std::vector<double> tau;
    std::vector<double> theta_plus, theta_minus;
    std::vector<double> rate_plus, rate_minus;
    std::vector<double> f_plus, f_minus, f;
    std::vector<double> zeta_exact, zeta_slow;

    /// max |zeta_exact - zeta_slow|
    double max_slow_residual = 0.0;
    /// max |theta_dot_+-| / min(omega_+, omega_-)
    double modulation_ratio = 0.0;
    /// max |theta_dot_+-|
    double max_rate = 0.0;

    std::size_t size() const { return tau.size(); }
};

/// Samples F_+-, F and zeta = dF/dtau (analytic) plus its four-sine slow
/// approximation on `tau_grid`. The grid needs >= 20 samples per 2 pi/omega_+;
/// otherwise ConfigError.
DriveSignal drive_waveform(const DriveParams& p, const Worldline& wl,
                           std::span<const double> tau_grid);

/// Uniform grid over the profile with `samples_per_period` points per 2 pi/omega_+.
std::vector<double> drive_grid(const DriveParams& p, const Worldline& wl,
                               int samples_per_period = 40);

struct CouplingReport {
    double simulated = 0.0;  ///< lambda / sqrt(L omega_n), in units of Omega
    double drive = 0.0;      ///< g eta / Omega
    double ratio = 0.0;      ///< simulated / drive
    bool zero_coupling = false;
    bool match = false;
    std::string message;
};

/// Checks g eta = lambda / sqrt(L omega_n) (relative 1e-6) for the coherent mode of `modes`.
CouplingReport effective_coupling_check(const DriveParams& p, const ModeSet& modes);

/// CSV: tau,theta_plus,theta_minus,theta_dot_plus,theta_dot_minus,F,zeta_exact,zeta_slow
void save_drive_csv(const DriveSignal& s, const DriveParams& p, const std::filesystem::path& path,
                    const std::string& comment = {});

}  // namespace rqrc
