#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace clockwatch {

// Diffusion intensities of the polynomial clock model plus a white phase
// term. Units: q1 [s^2/s], q2 [s^2/s^3], q3 [s^2/s^5], wpm_sigma [s].
struct NoiseSpec {
    double q1 = 0.0;         // white FM
    double q2 = 0.0;         // random-walk FM
    double q3 = 0.0;         // random-walk drift
    double wpm_sigma = 0.0;  // white PM

    bool all_zero() const {
        return q1 == 0.0 && q2 == 0.0 && q3 == 0.0 && wpm_sigma == 0.0;
    }
    NoiseSpec operator+(const NoiseSpec& o) const;
    void validate() const;
};

// Deterministic parameters plus stochastic spec for one simulated oscillator.
struct ClockTruth {
    double x0 = 0.0;    // initial phase offset [s]
    double y0 = 0.0;    // initial fractional frequency offset
    double d0 = 0.0;    // linear frequency drift [1/s]
    NoiseSpec noise;
    std::uint64_t seed = 0;
};

// Uniformly sampled true phase offset series.
struct PhaseTrajectory {
    double dt = 1.0;       // sample interval [s]
    double origin = 0.0;   // epoch of samples[0] [s]
    std::vector<double> samples;  // phase offset [s]

    std::size_t size() const { return samples.size(); }
    double epoch(std::size_t k) const { return origin + dt * double(k); }
};

// Phase-noise-only trajectory: white PM plus single/double/triple cumulative
// sums of Gaussian innovations for WFM / RWFM / RW drift.
PhaseTrajectory synthesize_noise(const NoiseSpec& spec, std::size_t n,
                                 double dt, std::uint64_t seed);

// Deterministic polynomial x0 + y0*t + d0*t^2/2 plus synthesized noise.
PhaseTrajectory simulate_clock(const ClockTruth& clock, double duration,
                               double dt);

// Elementwise a - b on matching grids.
PhaseTrajectory relative_phase(const PhaseTrajectory& a,
                               const PhaseTrajectory& b);

// Named presets: "ocxo-ref" (ADEV(1 s) ~ 8e-11) and "rx-tcxo"
// (ADEV(1 s) ~ 1e-9, a typical receiver-grade TCXO).
ClockTruth clock_profile(const std::string& name);
std::vector<std::string> clock_profile_names();

}  // namespace clockwatch
