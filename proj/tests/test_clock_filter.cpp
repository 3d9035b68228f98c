#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "clockwatch/clock_filter.hpp"
#include "clockwatch/clock_sim.hpp"
#include "clockwatch/rng.hpp"

using namespace clockwatch;

namespace {

NoiseSpec test_q() {
    NoiseSpec q;
    q.q1 = 1e-21;
    q.q2 = 3e-26;
    q.q3 = 7e-32;
    return q;
}

}  // namespace

TEST_CASE("Phi semigroup is exact") {
    Mat3 p2, p3, p5, q;
    transition(test_q(), 2.0, p2, q);
    transition(test_q(), 3.0, p3, q);
    transition(test_q(), 5.0, p5, q);
    CHECK(((p2 * p3) - p5).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Q additivity identity over random triples") {
    Xoshiro256pp rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        NoiseSpec q;
        q.q1 = 1e-21 * rng.uniform();
        q.q2 = 1e-26 * rng.uniform();
        q.q3 = 1e-32 * rng.uniform();
        const double t1 = 0.1 + 10.0 * rng.uniform();
        const double t2 = 0.1 + 10.0 * rng.uniform();
        Mat3 phi1, phi2, phi12, Q1, Q2, Q12;
        transition(q, t1, phi1, Q1);
        transition(q, t2, phi2, Q2);
        transition(q, t1 + t2, phi12, Q12);
        const Mat3 composed = phi2 * Q1 * phi2.transpose() + Q2;
        const double err = (composed - Q12).cwiseAbs().maxCoeff() /
                           Q12.cwiseAbs().maxCoeff();
        CHECK(err < 1e-12);
    }
}

TEST_CASE("WFM-only Q is diagonal") {
    NoiseSpec q;
    q.q1 = 4e-21;
    Mat3 phi, Q;
    transition(q, 1.0, phi, Q);
    CHECK(Q(0, 0) == doctest::Approx(4e-21));
    CHECK(Q.cwiseAbs().sum() == doctest::Approx(4e-21));
    CHECK_THROWS_AS(transition(q, 0.0, phi, Q), std::invalid_argument);
}

TEST_CASE("propagate advances the polynomial state") {
    FilterState st;
    st.q = test_q();
    st.r = 1e-18;
    st.x_hat << 0.0, 1e-9, 0.0;
    const auto out = propagate(st, 10.0);
    CHECK(out.x_hat(0) == doctest::Approx(1e-8));
    CHECK(out.t_last == 10.0);
    CHECK_THROWS_AS(propagate(out, 5.0), std::invalid_argument);
}

TEST_CASE("split-propagation invariance") {
    Xoshiro256pp rng(23);
    for (int trial = 0; trial < 1000; ++trial) {
        FilterState st;
        st.q = test_q();
        st.r = 1e-18;
        st.x_hat << 1e-8 * rng.uniform(), 1e-9 * rng.uniform(),
            1e-12 * rng.uniform();
        st.P = default_initial_covariance();
        const double total = 0.5 + 20.0 * rng.uniform();
        const double split = total * rng.uniform();
        const auto whole = propagate(st, total);
        const auto half = propagate(propagate(st, split), total);
        const double xerr = (whole.x_hat - half.x_hat).cwiseAbs().maxCoeff() /
                            whole.x_hat.cwiseAbs().maxCoeff();
        const double perr = (whole.P - half.P).cwiseAbs().maxCoeff() /
                            whole.P.cwiseAbs().maxCoeff();
        CHECK(xerr < 1e-12);
        CHECK(perr < 1e-12);
    }
}

TEST_CASE("zero process noise, zero covariance stays zero") {
    FilterState st;
    st.r = 1e-18;
    const auto out = propagate(st, 100.0);
    CHECK(out.P.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("update: perfect prior ignores the measurement") {
    FilterState st;
    st.q = test_q();
    st.r = 1e-18;
    PhaseSample s;
    s.offset = 5e-9;
    const auto res = update(st, s);
    CHECK(res.innovation == doctest::Approx(5e-9));
    CHECK(res.state.x_hat(0) == 0.0);  // zero gain
}

TEST_CASE("update: measurement-dominated limit") {
    FilterState st;
    st.q = test_q();
    st.r = 1e-30;
    st.P = Mat3::Identity() * 1e-6;
    PhaseSample s;
    s.offset = 3.7e-6;
    const auto res = update(st, s);
    CHECK(res.state.x_hat(0) == doctest::Approx(3.7e-6).epsilon(1e-15));
}

TEST_CASE("update skips invalid samples distinctly") {
    FilterState st;
    st.q = test_q();
    st.r = 1e-18;
    PhaseSample s;
    s.valid = false;
    s.epoch = 5.0;
    const auto res = update(st, s);
    CHECK(res.skipped);
    CHECK(res.state.x_hat == st.x_hat);
    CHECK(res.state.t_last == st.t_last);
}

TEST_CASE("noiseless ramp: estimates match the quadratic-fit oracle") {
    const double y = 1e-8, d = 1e-12;
    FilterState st;
    NoiseSpec q;
    q.q1 = 1e-22;
    st.q = q;
    st.r = 1e-18;
    st.P = default_initial_covariance();
    std::vector<double> ts, xs;
    for (int k = 1; k <= 100; ++k) {
        PhaseSample s;
        s.epoch = double(k);
        s.offset = y * s.epoch + 0.5 * d * s.epoch * s.epoch;
        ts.push_back(s.epoch);
        xs.push_back(s.offset);
        st = update(st, s).state;
    }
    // oracle: exact least-squares quadratic fit x = a + b t + c t^2/2
    Eigen::MatrixXd A(100, 3);
    Eigen::VectorXd b(100);
    for (int i = 0; i < 100; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = ts[i];
        A(i, 2) = 0.5 * ts[i] * ts[i];
        b(i) = xs[i];
    }
    const Eigen::Vector3d fit = A.colPivHouseholderQr().solve(b);
    CHECK(fit(1) == doctest::Approx(y).epsilon(1e-9));
    CHECK(fit(2) == doctest::Approx(d).epsilon(1e-6));
    CHECK(st.x_hat(1) == doctest::Approx(fit(1)).epsilon(0.01));
    CHECK(st.x_hat(2) == doctest::Approx(fit(2)).epsilon(0.10));
}

TEST_CASE("nis basics") {
    CHECK(nis(0.0, 1e-18) == 0.0);
    CHECK(nis(1e-9, 1e-18) == doctest::Approx(1.0));
    CHECK_THROWS_AS(nis(1.0, 0.0), std::runtime_error);
}

TEST_CASE("P stays symmetric PSD over long random sequences") {
    FilterState st;
    st.q = test_q();
    st.r = 3e-18;
    st.P = default_initial_covariance();
    GaussianStream g(31);
    double t = 0.0;
    for (int k = 1; k <= 10000; ++k) {
        t += 1.0;
        PhaseSample s;
        s.epoch = t;
        s.offset = 1e-9 * g.next();
        st = update(st, s).state;
        if (k % 100 == 0) {
            const double asym =
                (st.P - st.P.transpose()).cwiseAbs().maxCoeff();
            CHECK(asym <= 1e-15 * st.P.cwiseAbs().maxCoeff());
            Eigen::SelfAdjointEigenSolver<Mat3> es(st.P);
            CHECK(es.eigenvalues().minCoeff() >= -1e-18 * st.P.trace());
        }
    }
}

TEST_CASE("filter invariant to splitting coasting intervals") {
    FilterState st;
    st.q = test_q();
    st.r = 1e-18;
    st.P = default_initial_covariance();
    st.x_hat << 1e-7, 3e-9, 2e-13;
    auto a = propagate(st, 7.0);
    auto b = propagate(propagate(propagate(st, 2.0), 3.5), 7.0);
    CHECK((a.x_hat - b.x_hat).cwiseAbs().maxCoeff() <=
          1e-12 * a.x_hat.cwiseAbs().maxCoeff());
    CHECK((a.P - b.P).cwiseAbs().maxCoeff() <= 1e-12 * a.P.cwiseAbs().maxCoeff());
}
