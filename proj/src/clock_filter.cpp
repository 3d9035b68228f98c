#include "clockwatch/clock_filter.hpp"

#include <cmath>
#include <stdexcept>

namespace clockwatch {

Mat3 default_initial_covariance() {
    Mat3 p = Mat3::Zero();
    p(0, 0) = 1e-12;
    p(1, 1) = 1e-16;
    p(2, 2) = 1e-24;
    return p;
}

double meter_measurement_variance(const MeterConfig& cfg) {
    const double step = cfg.step();
    return step * step / 12.0 + cfg.pll_jitter_sigma * cfg.pll_jitter_sigma;
}

void transition(const NoiseSpec& q, double tau, Mat3& phi, Mat3& Q) {
    if (!(tau > 0.0)) throw std::invalid_argument("transition: tau <= 0");
    const double t2 = tau * tau;
    const double t3 = t2 * tau;
    const double t4 = t3 * tau;
    const double t5 = t4 * tau;

    phi << 1.0, tau, t2 / 2.0,
           0.0, 1.0, tau,
           0.0, 0.0, 1.0;

    Q(0, 0) = q.q1 * tau + q.q2 * t3 / 3.0 + q.q3 * t5 / 20.0;
    Q(0, 1) = q.q2 * t2 / 2.0 + q.q3 * t4 / 8.0;
    Q(0, 2) = q.q3 * t3 / 6.0;
    Q(1, 1) = q.q2 * tau + q.q3 * t3 / 3.0;
    Q(1, 2) = q.q3 * t2 / 2.0;
    Q(2, 2) = q.q3 * tau;
    Q(1, 0) = Q(0, 1);
    Q(2, 0) = Q(0, 2);
    Q(2, 1) = Q(1, 2);
}

FilterState propagate(const FilterState& state, double to_epoch) {
    if (!(to_epoch > state.t_last))
        throw std::invalid_argument("propagate: non-monotone epoch");
    const double tau = to_epoch - state.t_last;
    Mat3 phi, Q;
    transition(state.q, tau, phi, Q);
    FilterState out = state;
    out.x_hat = phi * state.x_hat;
    out.P = phi * state.P * phi.transpose() + Q;
    // keep symmetry exact
    out.P = ((out.P + out.P.transpose()) * 0.5).eval();
    out.t_last = to_epoch;
    return out;
}

UpdateResult update(const FilterState& state, const PhaseSample& sample) {
    UpdateResult res;
    if (!sample.valid) {
        res.state = state;
        res.skipped = true;
        return res;
    }
    if (sample.epoch < state.t_last)
        throw std::invalid_argument("update: sample epoch behind filter");
    const FilterState* st = &state;
    FilterState propagated;
    if (sample.epoch > state.t_last) {
        propagated = propagate(state, sample.epoch);
        st = &propagated;
    }
    if (!(st->r > 0.0)) throw std::runtime_error("update: r <= 0");

    const double nu = sample.offset - st->x_hat(0);
    const double S = st->P(0, 0) + st->r;
    if (!(S > 0.0)) throw std::runtime_error("update: innovation variance <= 0");
    const Vec3 K = st->P.col(0) / S;

    FilterState out = *st;
    out.x_hat = st->x_hat + K * nu;
    Mat3 ikh = Mat3::Identity();
    ikh.col(0) -= K;  // I - K H with H = [1 0 0]
    out.P = ikh * st->P * ikh.transpose() + st->r * K * K.transpose();
    out.P = ((out.P + out.P.transpose()) * 0.5).eval();

    res.state = out;
    res.innovation = nu;
    res.innovation_var = S;
    return res;
}

double nis(double innovation, double innovation_var) {
    if (!(innovation_var > 0.0))
        throw std::runtime_error("nis: innovation_var <= 0");
    return innovation * innovation / innovation_var;
}

}  // namespace clockwatch
