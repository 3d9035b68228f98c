#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "clockwatch/clock_sim.hpp"

namespace clockwatch {

// Joint Kalman state of N free-running members, each (phase, frequency,
// drift) relative to the implicit ensemble timescale. The unobservable
// common mode is pinned by explicit re-centering: the weighted mean of each
// state component is held at zero.
struct EnsembleState {
    Eigen::VectorXd x;        // 3N stacked member states
    Eigen::MatrixXd P;        // 3N x 3N joint covariance
    Eigen::VectorXd weights;  // N inverse-variance weights, sum to 1
    std::vector<NoiseSpec> q; // per-member process noise
    std::size_t pivot = 0;    // member the phase meter compares against
    double epoch = 0.0;

    std::size_t size() const { return q.size(); }
    double member_phase(std::size_t i) const { return x(3 * i); }
};

EnsembleState make_ensemble(const std::vector<NoiseSpec>& members,
                            std::size_t pivot, const Eigen::Matrix3d& P0);

// Block-diagonal application of the three-state transition to every member.
EnsembleState ensemble_propagate(const EnsembleState& state, double tau);

// Subtract the weighted mean of each component from every member.
// Idempotent.
void recenter(EnsembleState& state);

// Joint update from star-topology phase differences member_i - pivot
// (one optional slot per member; the pivot slot and missing slots are
// skipped). Re-centers and recomputes inverse-variance weights afterwards.
EnsembleState ensemble_update(
    const EnsembleState& state,
    const std::vector<std::optional<double>>& diffs, double r);

// Per-member correction onto the ensemble timescale: -phase_i estimate.
// Weighted mean of corrections is zero after re-centering.
Eigen::VectorXd ensemble_time(const EnsembleState& state);

// Discrete PI servo steering the voltage-controlled output clock.
struct ServoState {
    double kp = 0.1;          // [1/s]
    double ki = 0.005;        // [1/s^2]
    double integrator = 0.0;  // accumulated error [s*s]
    double last_error = 0.0;  // [s]
    double control_out = 0.0; // commanded fractional frequency correction
    double slew_limit = 1e-6; // max |control_out| [s/s]
};

ServoState steer(const ServoState& servo, double error, double tau);

// DAC granularity of the VCOCXO control input.
inline constexpr double kControlQuantum = 1e-12;
double quantize_control(double control);

}  // namespace clockwatch
