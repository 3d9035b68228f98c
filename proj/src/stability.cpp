#include "clockwatch/stability.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "clockwatch/kernels.hpp"

namespace clockwatch {

std::vector<AdevPoint> overlapping_adev(const PhaseTrajectory& phase,
                                        const std::vector<double>& taus) {
    const std::size_t n = phase.size();
    std::vector<AdevPoint> out;
    out.reserve(taus.size());
    for (double tau : taus) {
        if (!(tau > 0.0)) throw std::invalid_argument("adev: tau <= 0");
        const double ratio = tau / phase.dt;
        const auto m = static_cast<std::size_t>(std::llround(ratio));
        if (m < 1 || std::abs(ratio - double(m)) > 1e-9 * ratio)
            throw std::invalid_argument("adev: tau not a multiple of dt");
        if (n < 2 * m + 1) continue;  // series too short, skip
        const std::size_t pairs = n - 2 * m;
        const double ssq =
            kernels::sum_sq_second_diff(phase.samples.data(), n, m);
        AdevPoint p;
        p.tau = tau;
        p.sigma_y = std::sqrt(ssq / (2.0 * tau * tau * double(pairs)));
        p.n_pairs = pairs;
        out.push_back(p);
    }
    return out;
}

double analytic_adev(const NoiseSpec& spec, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("analytic_adev: tau <= 0");
    const double w = spec.wpm_sigma;
    const double var = 3.0 * w * w / (tau * tau) + spec.q1 / tau +
                       spec.q2 * tau / 3.0 + spec.q3 * tau * tau * tau / 20.0;
    return std::sqrt(var);
}

DiffusionFit fit_diffusion(const std::vector<AdevPoint>& points,
                           unsigned basis) {
    if (points.empty()) throw std::invalid_argument("fit_diffusion: no points");
    if ((basis & kFitAll) == 0)
        throw std::invalid_argument("fit_diffusion: empty basis");

    const Eigen::Index np = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd A(np, 4);
    Eigen::VectorXd y(np);
    double yscale = 0.0;
    for (Eigen::Index i = 0; i < np; ++i) {
        const double tau = points[i].tau;
        A(i, 0) = 3.0 / (tau * tau);       // wpm^2
        A(i, 1) = 1.0 / tau;               // q1
        A(i, 2) = tau / 3.0;               // q2
        A(i, 3) = tau * tau * tau / 20.0;  // q3
        y(i) = points[i].sigma_y * points[i].sigma_y;
        yscale = std::max(yscale, std::abs(y(i)));
    }

    DiffusionFit fit;
    if (yscale == 0.0) return fit;  // all-zero input -> all-zero spec

    // Four unknowns: enumerate support sets, solve each by SVD (minimum-norm
    // on rank deficiency), keep the best nonnegative solution.
    {
        std::vector<int> cols;
        for (int j = 0; j < 4; ++j)
            if (basis & (1u << j)) cols.push_back(j);
        Eigen::MatrixXd Af(np, static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j)
            Af.col(static_cast<Eigen::Index>(j)) = A.col(cols[j]);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Af);
        svd.setThreshold(1e-12);
        fit.rank_deficient = svd.rank() < static_cast<Eigen::Index>(cols.size());
    }

    double best_res = -1.0;
    int best_terms = 5;
    for (int mask = 1; mask < 16; ++mask) {
        if ((static_cast<unsigned>(mask) & basis) != static_cast<unsigned>(mask))
            continue;
        std::vector<int> cols;
        for (int j = 0; j < 4; ++j)
            if (mask & (1 << j)) cols.push_back(j);
        Eigen::MatrixXd As(np, static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j)
            As.col(static_cast<Eigen::Index>(j)) = A.col(cols[j]);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            As, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-12);
        const Eigen::VectorXd c = svd.solve(y);
        bool nonneg = true;
        for (Eigen::Index j = 0; j < c.size(); ++j)
            if (c(j) < -1e-12 * yscale) nonneg = false;
        if (!nonneg) continue;
        const double res = (As * c - y).norm() / (y.norm());
        const int nterms = static_cast<int>(cols.size());
        const bool better =
            best_res < 0.0 || res < best_res * (1.0 - 1e-12) ||
            (res <= best_res * (1.0 + 1e-9) && nterms < best_terms);
        if (better) {
            best_res = res;
            best_terms = nterms;
            double q[4] = {0, 0, 0, 0};
            for (std::size_t j = 0; j < cols.size(); ++j)
                q[cols[j]] = std::max(0.0, c(static_cast<Eigen::Index>(j)));
            fit.spec.wpm_sigma = std::sqrt(q[0]);
            fit.spec.q1 = q[1];
            fit.spec.q2 = q[2];
            fit.spec.q3 = q[3];
        }
    }
    fit.residual = std::max(0.0, best_res);
    return fit;
}

}  // namespace clockwatch
