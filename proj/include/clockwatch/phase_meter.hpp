#pragma once

#include <cstdint>
#include <vector>

#include "clockwatch/clock_sim.hpp"

namespace clockwatch {

// Counter-based phase measurement chain: quantization at the PLL-multiplied
// measurement clock, deterministic PLL drift ramp with a random fixed sign
// per run, white jitter, and wraparound of the 1 Hz comparison.
struct MeterConfig {
    double f_meas = 2e8;          // measurement clock [Hz]; step = 1/f_meas
    double pll_drift_rate = 9e-8; // meter drift magnitude [s/s]
    double pll_jitter_sigma = 1e-9;  // white measurement jitter [s]
    double wrap_interval = 1.0;   // PPS period [s]
    std::uint64_t seed = 0;
    std::vector<std::size_t> dropouts;  // sample indices marked invalid

    double step() const { return 1.0 / f_meas; }
    void validate() const;
};

struct PhaseSample {
    double epoch = 0.0;   // time of GNSS PPS edge [s]
    double offset = 0.0;  // wrapped phase offset [s], in [-wrap/2, wrap/2)
    bool valid = true;
    bool quantized = true;
};

// Counter truncation toward -inf; idempotent.
double quantize(double value, double step);

// Wrap into [-wrap_interval/2, +wrap_interval/2).
double wrap_phase(double value, double wrap_interval);

// Drift sign for a given meter seed (+1 or -1); exposed so scenarios can
// report the realized direction.
int meter_drift_sign(const MeterConfig& cfg);

std::vector<PhaseSample> measure(const PhaseTrajectory& truth,
                                 const MeterConfig& cfg);

struct UnwrapResult {
    std::vector<double> offsets;  // continuous series, invalid epochs bridged
    bool ambiguous = false;  // a >= wrap/2 jump was seen between valid samples
    std::vector<std::size_t> ambiguous_at;  // indices where the jump occurred
};

UnwrapResult unwrap(const std::vector<PhaseSample>& samples,
                    double wrap_interval = 1.0);

// Minimum credible adversarial drift given the meter: its own drift rate.
double meter_floor(const MeterConfig& cfg);

}  // namespace clockwatch
