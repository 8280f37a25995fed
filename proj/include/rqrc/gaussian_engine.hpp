#pragma once

// Gaussian-state evolution of a harmonic detector coupled to cavity field modes.
//
// Mode-operator ordering: Psi = (b, a_1..a_N, b^dag, a_1^dag..a_N^dag), so the
// detector occupies slot 0 and its conjugate slot N+1. The Heisenberg flow is
// dPsi/dtau = -i Omega F_sym(tau) Psi, with Omega = [[0, 1], [-1, 0]].

#include "rqrc/worldline.hpp"

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace rqrc {

using cplx = std::complex<double>;

/// Detector + cavity parameters. Frequencies are omega_n = k_n = n*pi/L.
struct ModeSet {
    double cavity_length = 0.0;       ///< L
    double detector_frequency = 1.0;  ///< Omega
    double coupling = 0.1;            ///< lambda
    std::vector<int> mode_numbers;    ///< simulated field modes n (positive, distinct)
    int coherent_mode = 3;            ///< mode initially in |alpha>
    cplx alpha{0.0, 10.0};

    /// Modes 1..n_modes with the detector resonant with `coherent_mode`
    /// (L = coherent_mode * pi / Omega).
    static ModeSet cavity(int n_modes, double detector_frequency = 1.0, double coupling = 0.1,
                          int coherent_mode = 3, cplx alpha = {0.0, 10.0});

    /// Same cavity, but only the coherent mode is simulated.
    static ModeSet single_mode(double detector_frequency = 1.0, double coupling = 0.1,
                               int coherent_mode = 3, cplx alpha = {0.0, 10.0});

    std::size_t size() const { return mode_numbers.size(); }
    std::size_t dimension() const { return 2 * (size() + 1); }
    double frequency(int n) const;
    double max_frequency() const;

    /// Slot (1..N) holding the coherent mode, if simulated.
    std::optional<std::size_t> coherent_slot() const;

    /// Throws ConfigError on invalid geometry or a broken resonance convention.
    void validate() const;
};

struct GaussianState {
    Eigen::VectorXcd mean;  ///< <Psi_i>
    Eigen::MatrixXcd cov;   ///< <Psi_i Psi_j> - <Psi_i><Psi_j>
};

/// Heisenberg-picture propagator Psi(tau) = S Psi(0).
struct Propagator {
    double tau = 0.0;
    Eigen::MatrixXcd matrix;
};

struct StepConfig {
    /// RK4 steps per shortest Hamiltonian period, applied per segment.
    int steps_per_period = 200;
};

/// Minimum number of RK4 steps any segment may be integrated with.
inline constexpr int kMinStepsPerSegment = 16;

/// Largest tolerated |[b, b^dag] - 1| along a propagated trajectory.
inline constexpr double kMaxSymplecticError = 1e-9;

struct DetectorObservables {
    double n = 0.0;  ///< <b^dag b>
    double q = 0.0;  ///< <(b + b^dag)/sqrt2>
    double p = 0.0;  ///< <i(b^dag - b)/sqrt2>
    /// |[b, b^dag] - 1| implied by the propagator (detector_trajectory only).
    double commutator_error = 0.0;
};

/// Block symplectic form [[0, 1], [-1, 0]] of size 2(N+1).
Eigen::MatrixXd symplectic_form(std::size_t n_modes);

/// Swap of annihilation and creation blocks.
Eigen::MatrixXd conjugation_swap(std::size_t n_modes);

/// Detector ground state, field vacuum except |alpha> in the coherent mode.
GaussianState initial_state(const ModeSet& modes);

/// Coefficients of the interaction Hamiltonian for one field mode at a
/// world-line point: H contains g*(b a e^{-i phi_+} + b a^dag e^{-i phi_-}) + h.c.
struct ModeCoupling {
    cplx rotating_pair;   ///< c1 = g e^{-i(Omega tau + omega t)}, multiplies b a_n
    cplx counter_pair;    ///< c2 = g e^{-i(Omega tau - omega t)}, multiplies b a_n^dag
};

/// Per-mode couplings for every simulated mode, in slot order.
std::vector<ModeCoupling> mode_couplings(const ModeSet& modes, const WorldlinePoint& wp);

/// Dense F_sym = F + F^T for H = Psi^T F Psi at a world-line point.
Eigen::MatrixXcd hamiltonian_fsym(const ModeSet& modes, const WorldlinePoint& wp);

/// Largest phase rate Omega + omega_n dt/dtau over the profile, used to size
/// RK4 steps (dt/dtau = cosh xi, or 1 for Newtonian kinematics).
double fastest_phase_rate(double detector_frequency, double max_field_frequency,
                          const Worldline& wl);

/// Throws ConfigError when steps_per_period < kMinStepsPerSegment.
void validate(const StepConfig& cfg);

/// S(tau_s) for each requested sample time, integrated in one RK4 pass.
std::vector<Propagator> propagate(const ModeSet& modes, const AccelerationProfile& profile,
                                  Kinematics mode, const StepConfig& cfg,
                                  std::span<const double> sample_times);

/// cov <- S cov S^T, mean <- S mean.
GaussianState evolve(const GaussianState& state, const Propagator& s);

DetectorObservables detector_observables(const GaussianState& state);

/// Detector observables at each sample time, without materialising the
/// full state. Equivalent to evolve + detector_observables on propagate().
std::vector<DetectorObservables> detector_trajectory(const ModeSet& modes,
                                                     const AccelerationProfile& profile,
                                                     Kinematics mode, const StepConfig& cfg,
                                                     std::span<const double> sample_times);

}  // namespace rqrc
