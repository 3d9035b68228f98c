#pragma once

#include <Eigen/Dense>

#include "clockwatch/clock_sim.hpp"
#include "clockwatch/phase_meter.hpp"

namespace clockwatch {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

// Three-state clock tracker: phase [s], fractional frequency, drift [1/s],
// with non-uniform update intervals.
struct FilterState {
    Vec3 x_hat = Vec3::Zero();
    Mat3 P = Mat3::Zero();
    double t_last = 0.0;
    NoiseSpec q;
    double r = 0.0;  // measurement noise variance [s^2]
};

// Default wide prior: converges from cold start in < 100 epochs at 1 Hz.
Mat3 default_initial_covariance();

// Measurement variance implied by a meter config: quantization step^2/12
// plus jitter variance.
double meter_measurement_variance(const MeterConfig& cfg);

// State transition and process noise over an interval tau.
// Phi = [[1,tau,tau^2/2],[0,1,tau],[0,0,1]]; Q is the polynomial-integrator
// diffusion integral for (q1, q2, q3).
void transition(const NoiseSpec& q, double tau, Mat3& phi, Mat3& Q);

FilterState propagate(const FilterState& state, double to_epoch);

struct UpdateResult {
    FilterState state;
    double innovation = 0.0;      // measurement minus predicted phase [s]
    double innovation_var = 0.0;  // [s^2]
    bool skipped = false;         // invalid sample, state unchanged
};

// Scalar phase update, Joseph-form covariance. Propagate first if the
// sample epoch is ahead of state.t_last.
UpdateResult update(const FilterState& state, const PhaseSample& sample);

// Normalized innovation squared; chi-square(1) under model consistency.
double nis(double innovation, double innovation_var);

}  // namespace clockwatch
