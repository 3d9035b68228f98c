#include "clockwatch/phase_meter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "clockwatch/rng.hpp"

namespace clockwatch {

void MeterConfig::validate() const {
    if (!(f_meas > 0.0)) throw std::invalid_argument("MeterConfig: f_meas <= 0");
    if (pll_drift_rate < 0.0)
        throw std::invalid_argument("MeterConfig: pll_drift_rate < 0");
    if (pll_jitter_sigma < 0.0)
        throw std::invalid_argument("MeterConfig: pll_jitter_sigma < 0");
    if (!(wrap_interval > 0.0))
        throw std::invalid_argument("MeterConfig: wrap_interval <= 0");
}

double quantize(double value, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("quantize: step <= 0");
    double k = std::floor(value / step);
    // Counter truncation: result is the largest multiple of step <= value.
    // The division can land one ulp off an exact multiple; nudge k so the
    // operation is exact on its own output (idempotence).
    if ((k + 1.0) * step <= value) k += 1.0;
    while (k * step > value) k -= 1.0;
    return k * step;
}

double wrap_phase(double value, double wrap_interval) {
    const double w = wrap_interval;
    double r = value - w * std::floor(value / w + 0.5);
    if (r >= w / 2.0) r -= w;   // guard the half-open upper edge
    if (r < -w / 2.0) r += w;
    return r;
}

int meter_drift_sign(const MeterConfig& cfg) {
    Xoshiro256pp rng(derive_stream(cfg.seed, 10));
    return (rng.next() & 1u) ? 1 : -1;
}

std::vector<PhaseSample> measure(const PhaseTrajectory& truth,
                                 const MeterConfig& cfg) {
    cfg.validate();
    if (truth.samples.empty())
        throw std::invalid_argument("measure: empty trajectory");

    const double step = cfg.step();
    const double sign = static_cast<double>(meter_drift_sign(cfg));
    GaussianStream jitter(derive_stream(cfg.seed, 11));

    std::vector<PhaseSample> out;
    out.reserve(truth.size());
    for (std::size_t k = 0; k < truth.size(); ++k) {
        PhaseSample s;
        s.epoch = truth.epoch(k);
        double m = truth.samples[k] +
                   cfg.pll_drift_rate * truth.dt * double(k) * sign;
        if (cfg.pll_jitter_sigma > 0.0)
            m += cfg.pll_jitter_sigma * jitter.next();
        m = wrap_phase(m, cfg.wrap_interval);
        s.offset = quantize(m, step);
        // quantizing can push a value just below -wrap/2
        if (s.offset < -cfg.wrap_interval / 2.0) s.offset += step;
        out.push_back(s);
    }
    for (std::size_t idx : cfg.dropouts)
        if (idx < out.size()) out[idx].valid = false;
    return out;
}

UnwrapResult unwrap(const std::vector<PhaseSample>& samples,
                    double wrap_interval) {
    UnwrapResult res;
    res.offsets.reserve(samples.size());
    double accum = 0.0;       // accumulated wrap correction
    double prev = 0.0;        // last valid wrapped offset
    bool have_prev = false;
    for (const auto& s : samples) {
        if (!s.valid) {
            // bridge: carry the accumulated wrap count through the gap
            res.offsets.push_back(have_prev ? prev + accum : 0.0);
            continue;
        }
        if (have_prev) {
            const double d = s.offset - prev;
            // pick the wrap correction that minimizes the implied step
            if (d >= wrap_interval / 2.0) accum -= wrap_interval;
            else if (d < -wrap_interval / 2.0) accum += wrap_interval;
            // a half-interval jump aliases: cannot distinguish a wrap from a
            // real jump of >= wrap/2, which is itself an attack indicator
            if (std::abs(d) >= wrap_interval / 2.0) {
                res.ambiguous = true;
                res.ambiguous_at.push_back(res.offsets.size());
            }
        }
        res.offsets.push_back(s.offset + accum);
        prev = s.offset;
        have_prev = true;
    }
    return res;
}

double meter_floor(const MeterConfig& cfg) { return cfg.pll_drift_rate; }

}  // namespace clockwatch
