#pragma once

#include <vector>

#include "clockwatch/clock_sim.hpp"

namespace clockwatch {

struct AdevPoint {
    double tau = 0.0;       // averaging time [s]
    double sigma_y = 0.0;   // Allan deviation
    std::size_t n_pairs = 0;  // second differences used
};

// Overlapping Allan deviation at the requested taus. Each tau must be an
// integer multiple of the trajectory dt; taus the series is too short for
// are skipped.
std::vector<AdevPoint> overlapping_adev(const PhaseTrajectory& phase,
                                        const std::vector<double>& taus);

// Closed-form ADEV of a NoiseSpec:
//   sigma_y^2(tau) = 3*wpm^2/tau^2 + q1/tau + q2*tau/3 + q3*tau^3/20.
// The white-PM term is the discrete-time approximation at the simulation
// rate (no analog bandwidth exists in simulation).
double analytic_adev(const NoiseSpec& spec, double tau);

struct DiffusionFit {
    NoiseSpec spec;
    double residual = 0.0;   // rms relative residual of sigma_y^2
    bool rank_deficient = false;
};

// Basis selection bits for fit_diffusion.
enum DiffusionBasis : unsigned {
    kFitWpm = 1u << 0,
    kFitWfm = 1u << 1,
    kFitRwfm = 1u << 2,
    kFitRwDrift = 1u << 3,
    kFitAll = 0xFu,
};

// Non-negative least squares of sigma_y^2 against the power-law basis;
// inverts an ADEV spec sheet into simulator coefficients. `basis` restricts
// the model (e.g. kFitWfm alone inverts a single-tau white-FM spec).
DiffusionFit fit_diffusion(const std::vector<AdevPoint>& points,
                           unsigned basis = kFitAll);

}  // namespace clockwatch
