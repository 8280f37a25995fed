#pragma once

// State-vector evolution of a detector coupled to a single truncated cavity
// mode. Used for the two-level (qubit) detector, where the Gaussian
// formalism does not apply, and as a brute-force oracle for the harmonic case.

#include "rqrc/gaussian_engine.hpp"

#include <Eigen/Dense>
#include <variant>

namespace rqrc {

struct TwoLevel {};

struct Harmonic {
    int levels = 12;  ///< detector Fock cutoff d (levels 0..d-1)
};

using DetectorKind = std::variant<TwoLevel, Harmonic>;

int detector_levels(const DetectorKind& kind);

/// Amplitudes indexed by det_level * (n_max + 1) + fock_n.
struct DenseState {
    Eigen::VectorXcd amplitudes;
    int levels = 2;
    int n_max = 0;

    double norm() const { return amplitudes.norm(); }
    /// Probability in Fock levels n >= n_max - 2.
    double leakage() const;
    cplx& at(int level, int n) { return amplitudes[level * (n_max + 1) + n]; }
    cplx at(int level, int n) const { return amplitudes[level * (n_max + 1) + n]; }
};

/// Probability mass of a coherent state above n_max, before renormalisation.
double coherent_truncation_loss(cplx alpha, int n_max);

/// Detector ground state times a truncated, renormalised coherent state.
/// Requires n_max >= |alpha|^2 + 8|alpha| and n_max >= 3.
DenseState dense_initial(const DetectorKind& kind, cplx alpha, int n_max);

struct DenseRun {
    std::vector<DenseState> snapshots;
    double max_leakage = 0.0;
    double max_norm_drift = 0.0;
    bool valid = true;  ///< false when leakage reached kMaxLeakage
};

inline constexpr double kMaxLeakage = 1e-6;

/// Interaction-picture RK4 evolution along the world line. `modes` must
/// describe a single field mode.
DenseRun dense_propagate(const DenseState& state, const DetectorKind& kind, const ModeSet& modes,
                         const AccelerationProfile& profile, Kinematics mode,
                         const StepConfig& cfg, std::span<const double> sample_times);

/// (n, q, p) of a harmonic detector from its reduced moments.
DetectorObservables harmonic_observables(const DenseState& state);

struct QubitFeatures {
    double pz = 0.0;  ///< <sigma+ sigma->
    double px = 0.0;  ///< <sigma- + sigma+>/sqrt2
    double py = 0.0;  ///< <i(sigma+ - sigma-)>/sqrt2
};

/// Throws ConfigError unless `kind` is TwoLevel.
QubitFeatures qubit_features(const DenseState& state, const DetectorKind& kind);

}  // namespace rqrc
