#include "clockwatch/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "clockwatch/clock_filter.hpp"

namespace clockwatch {

EnsembleState make_ensemble(const std::vector<NoiseSpec>& members,
                            std::size_t pivot, const Eigen::Matrix3d& P0) {
    if (members.empty()) throw std::invalid_argument("ensemble: no members");
    if (pivot >= members.size())
        throw std::invalid_argument("ensemble: pivot out of range");
    const auto n = members.size();
    EnsembleState st;
    st.q = members;
    st.pivot = pivot;
    st.x = Eigen::VectorXd::Zero(3 * static_cast<Eigen::Index>(n));
    st.P = Eigen::MatrixXd::Zero(3 * static_cast<Eigen::Index>(n),
                                 3 * static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        st.P.block<3, 3>(3 * static_cast<Eigen::Index>(i),
                         3 * static_cast<Eigen::Index>(i)) = P0;
    st.weights =
        Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / double(n));
    return st;
}

EnsembleState ensemble_propagate(const EnsembleState& state, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("ensemble_propagate: tau <= 0");
    EnsembleState out = state;
    Mat3 phi, Q;
    for (std::size_t i = 0; i < state.size(); ++i) {
        transition(state.q[i], tau, phi, Q);
        const auto b = 3 * static_cast<Eigen::Index>(i);
        out.x.segment<3>(b) = phi * state.x.segment<3>(b);
        // P <- Phi_blk P Phi_blk^T + Q_blk, applied without forming the
        // full block-diagonal matrix
        for (std::size_t j = 0; j < state.size(); ++j)
            out.P.block<3, 3>(b, 3 * static_cast<Eigen::Index>(j)) =
                phi * state.P.block<3, 3>(b, 3 * static_cast<Eigen::Index>(j));
    }
    Eigen::MatrixXd tmp = out.P;
    for (std::size_t j = 0; j < state.size(); ++j) {
        transition(state.q[j], tau, phi, Q);
        const auto b = 3 * static_cast<Eigen::Index>(j);
        for (std::size_t i = 0; i < state.size(); ++i)
            out.P.block<3, 3>(3 * static_cast<Eigen::Index>(i), b) =
                tmp.block<3, 3>(3 * static_cast<Eigen::Index>(i), b) *
                phi.transpose();
        out.P.block<3, 3>(b, b) += Q;
    }
    out.P = ((out.P + out.P.transpose()) * 0.5).eval();
    out.epoch = state.epoch + tau;
    return out;
}

void recenter(EnsembleState& state) {
    const auto n = static_cast<Eigen::Index>(state.size());
    for (int c = 0; c < 3; ++c) {
        double mean = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            mean += state.weights(i) * state.x(3 * i + c);
        for (Eigen::Index i = 0; i < n; ++i) state.x(3 * i + c) -= mean;
    }
}

EnsembleState ensemble_update(
    const EnsembleState& state,
    const std::vector<std::optional<double>>& diffs, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("ensemble_update: r <= 0");
    if (diffs.size() != state.size())
        throw std::invalid_argument("ensemble_update: diff count mismatch");

    EnsembleState out = state;
    const auto dim = out.x.size();
    const auto pp = 3 * static_cast<Eigen::Index>(state.pivot);

    for (std::size_t i = 0; i < state.size(); ++i) {
        if (i == state.pivot || !diffs[i].has_value()) continue;
        const auto pi = 3 * static_cast<Eigen::Index>(i);
        // H picks phase_i - phase_pivot; scalar sequential update
        Eigen::VectorXd ph = out.P.col(pi) - out.P.col(pp);
        const double S = ph(pi) - ph(pp) + r;
        if (!(S > 0.0)) throw std::runtime_error("ensemble_update: S <= 0");
        const double nu = *diffs[i] - (out.x(pi) - out.x(pp));
        const Eigen::VectorXd K = ph / S;
        out.x += K * nu;
        // Joseph form
        Eigen::MatrixXd ikh = Eigen::MatrixXd::Identity(dim, dim);
        ikh.col(pi) -= K;
        ikh.col(pp) += K;
        out.P = ikh * out.P * ikh.transpose() + r * K * K.transpose();
        out.P = ((out.P + out.P.transpose()) * 0.5).eval();
    }

    // weights from posterior phase variances, then pin the common mode
    const auto n = static_cast<Eigen::Index>(state.size());
    Eigen::VectorXd inv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double var = out.P(3 * i, 3 * i);
        inv(i) = var > 0.0 ? 1.0 / var : 0.0;
    }
    const double total = inv.sum();
    if (total > 0.0)
        out.weights = inv / total;
    recenter(out);
    return out;
}

Eigen::VectorXd ensemble_time(const EnsembleState& state) {
    const auto n = static_cast<Eigen::Index>(state.size());
    Eigen::VectorXd corr(n);
    for (Eigen::Index i = 0; i < n; ++i) corr(i) = -state.x(3 * i);
    return corr;
}

ServoState steer(const ServoState& servo, double error, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("steer: tau <= 0");
    ServoState out = servo;
    double control = -(servo.kp * error + servo.ki * servo.integrator);
    out.integrator = servo.integrator + error * tau;
    if (control > servo.slew_limit) control = servo.slew_limit;
    if (control < -servo.slew_limit) control = -servo.slew_limit;
    out.control_out = control;
    out.last_error = error;
    return out;
}

double quantize_control(double control) {
    return kControlQuantum * std::nearbyint(control / kControlQuantum);
}

}  // namespace clockwatch
