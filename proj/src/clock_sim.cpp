#include "clockwatch/clock_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "clockwatch/kernels.hpp"
#include "clockwatch/rng.hpp"

namespace clockwatch {

NoiseSpec NoiseSpec::operator+(const NoiseSpec& o) const {
    NoiseSpec s;
    s.q1 = q1 + o.q1;
    s.q2 = q2 + o.q2;
    s.q3 = q3 + o.q3;
    s.wpm_sigma = std::sqrt(wpm_sigma * wpm_sigma + o.wpm_sigma * o.wpm_sigma);
    return s;
}

void NoiseSpec::validate() const {
    if (q1 < 0.0 || q2 < 0.0 || q3 < 0.0 || wpm_sigma < 0.0)
        throw std::invalid_argument("NoiseSpec: coefficients must be >= 0");
}

PhaseTrajectory synthesize_noise(const NoiseSpec& spec, std::size_t n,
                                 double dt, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("synthesize_noise: n < 2");
    if (!(dt > 0.0)) throw std::invalid_argument("synthesize_noise: dt <= 0");
    spec.validate();

    PhaseTrajectory out;
    out.dt = dt;
    out.samples.assign(n, 0.0);
    if (spec.all_zero()) return out;

    // Independent sub-streams per noise component so toggling one component
    // does not reshuffle the others.
    const double s_wfm = std::sqrt(spec.q1 * dt);

    if (spec.q1 > 0.0) {
        GaussianStream g(derive_stream(seed, 1));
        double x = 0.0;
        for (std::size_t k = 1; k < n; ++k) {
            x += s_wfm * g.next();
            out.samples[k] += x;
        }
    }
    if (spec.q2 > 0.0) {
        // exact discretization of integrated random-walk frequency: per-step
        // phase and frequency innovations are jointly Gaussian with
        // Cov = q2 * [[dt^3/3, dt^2/2], [dt^2/2, dt]]
        GaussianStream g(derive_stream(seed, 2));
        const double sy = std::sqrt(spec.q2 * dt);
        const double sx = std::sqrt(spec.q2 * dt * dt * dt);
        double y = 0.0, x = 0.0;
        for (std::size_t k = 1; k < n; ++k) {
            const double a = g.next();
            const double b = g.next();
            x += y * dt + sx * (0.5 * a + b / std::sqrt(12.0));
            y += sy * a;
            out.samples[k] += x;
        }
    }
    if (spec.q3 > 0.0) {
        // same idea one integrator deeper; Cholesky factors of the
        // triple-integrator step covariance
        GaussianStream g(derive_stream(seed, 3));
        const double sd = std::sqrt(spec.q3 * dt);
        const double sy = std::sqrt(spec.q3 * dt * dt * dt);
        const double sx = sy * dt;
        double d = 0.0, y = 0.0, x = 0.0;
        for (std::size_t k = 1; k < n; ++k) {
            const double a = g.next();
            const double b = g.next();
            const double c = g.next();
            x += y * dt + 0.5 * d * dt * dt +
                 sx * (a / 6.0 + b / std::sqrt(48.0) + c / std::sqrt(720.0));
            y += d * dt + sy * (0.5 * a + b / std::sqrt(12.0));
            d += sd * a;
            out.samples[k] += x;
        }
    }
    if (spec.wpm_sigma > 0.0) {
        GaussianStream g(derive_stream(seed, 4));
        for (std::size_t k = 0; k < n; ++k)
            out.samples[k] += spec.wpm_sigma * g.next();
    }
    return out;
}

PhaseTrajectory simulate_clock(const ClockTruth& clock, double duration,
                               double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("simulate_clock: dt <= 0");
    if (duration < 2.0 * dt)
        throw std::invalid_argument("simulate_clock: duration < 2*dt");
    const std::size_t n = static_cast<std::size_t>(std::floor(duration / dt)) + 1;

    PhaseTrajectory out = synthesize_noise(clock.noise, n, dt, clock.seed);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = dt * double(k);
        out.samples[k] += clock.x0 + clock.y0 * t + 0.5 * clock.d0 * t * t;
    }
    return out;
}

PhaseTrajectory relative_phase(const PhaseTrajectory& a,
                               const PhaseTrajectory& b) {
    if (a.dt != b.dt || a.size() != b.size())
        throw std::invalid_argument("relative_phase: mismatched grids");
    PhaseTrajectory out;
    out.dt = a.dt;
    out.origin = a.origin;
    out.samples.resize(a.size());
    kernels::subtract(a.samples.data(), b.samples.data(), out.samples.data(),
                      a.size());
    return out;
}

ClockTruth clock_profile(const std::string& name) {
    // q1 = sigma_y^2(1 s) * 1 s for a white-FM dominated oscillator.
    if (name == "ocxo-ref") {
        ClockTruth c;
        c.noise.q1 = 6.4e-21;
        return c;
    }
    if (name == "rx-tcxo") {
        ClockTruth c;
        c.noise.q1 = 1e-18;
        return c;
    }
    throw std::invalid_argument("unknown clock profile: " + name);
}

std::vector<std::string> clock_profile_names() {
    return {"ocxo-ref", "rx-tcxo"};
}

}  // namespace clockwatch
