#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "clockwatch/clock_filter.hpp"
#include "clockwatch/detect.hpp"
#include "clockwatch/rng.hpp"

using namespace clockwatch;

namespace {

FilterOutputs nominal_at(double epoch) {
    FilterOutputs fo;
    fo.epoch = epoch;
    fo.innovation = 0.0;
    fo.innovation_var = 1e-18;
    return fo;
}

}  // namespace

TEST_CASE("zero stream stays NOMINAL forever") {
    Detector det{DetectorConfig{}};
    for (int k = 0; k < 1000; ++k) {
        const auto v = det.step(nominal_at(double(k)));
        CHECK(v.level == AlertLevel::kNominal);
        CHECK(v.triggers == 0);
    }
}

TEST_CASE("config validation") {
    DetectorConfig bad;
    bad.nis_k = 11;
    CHECK_THROWS_AS(Detector{bad}, std::invalid_argument);
    bad = DetectorConfig{};
    bad.phase_limit = 0.0;
    CHECK_THROWS_AS(Detector{bad}, std::invalid_argument);
}

TEST_CASE("epochs must strictly increase") {
    Detector det{DetectorConfig{}};
    det.step(nominal_at(0.0));
    CHECK_THROWS_AS(det.step(nominal_at(0.0)), std::invalid_argument);
}

TEST_CASE("30 us phase offset trips PHASE_LIMIT immediately") {
    Detector det{DetectorConfig{}};
    auto fo = nominal_at(0.0);
    fo.x_phase = 30e-6;
    const auto v = det.step(fo);
    CHECK(v.level == AlertLevel::kAlarm);
    CHECK((v.triggers & kTriggerPhaseLimit) != 0);
    CHECK(v.evidence == doctest::Approx(30e-6));
}

TEST_CASE("phase limit tolerates the meter drift envelope") {
    DetectorConfig cfg;  // floor 9e-8, compensation on
    Detector det{cfg};
    for (int k = 0; k < 2000; ++k) {
        auto fo = nominal_at(double(k));
        fo.x_phase = 9e-8 * double(k);  // nominal meter ramp
        CHECK(det.step(fo).level == AlertLevel::kNominal);
    }
}

TEST_CASE("NIS k-of-n window confirms, single exceedance only suspects") {
    Detector det{DetectorConfig{}};
    auto fo = nominal_at(0.0);
    fo.innovation = 1e-7;  // NIS = 1e4
    auto v = det.step(fo);
    CHECK(v.level == AlertLevel::kSuspect);
    for (int k = 1; k < 7; ++k) {
        fo.epoch = double(k);
        v = det.step(fo);
    }
    CHECK(v.level == AlertLevel::kSuspect);  // 7 of 10 < k=8
    fo.epoch = 7.0;
    v = det.step(fo);
    CHECK(v.level == AlertLevel::kAlarm);  // 8th exceedance
    CHECK((v.triggers & kTriggerNisWindow) != 0);
}

TEST_CASE("drift must be sustained for nis_n epochs") {
    DetectorConfig cfg;
    Detector det{cfg};
    const double hot = cfg.drift_margin * cfg.drift_floor * 1.1;
    for (int k = 0; k < 9; ++k) {
        auto fo = nominal_at(double(k));
        fo.x_freq = hot;
        const auto v = det.step(fo);
        CHECK(v.level == AlertLevel::kSuspect);
    }
    auto fo = nominal_at(9.0);
    fo.x_freq = hot;
    const auto v = det.step(fo);
    CHECK(v.level == AlertLevel::kAlarm);
    CHECK((v.triggers & kTriggerDriftRate) != 0);
}

TEST_CASE("alarms latch by default, clear with finite hold") {
    Detector latch{DetectorConfig{}};
    auto fo = nominal_at(0.0);
    fo.x_phase = 30e-6;
    latch.step(fo);
    for (int k = 1; k < 50; ++k)
        CHECK(latch.step(nominal_at(double(k))).level == AlertLevel::kAlarm);

    DetectorConfig cfg;
    cfg.hold_epochs = 5;
    Detector hold{cfg};
    fo = nominal_at(0.0);
    fo.x_phase = 30e-6;
    hold.step(fo);
    AlertLevel last = AlertLevel::kAlarm;
    for (int k = 1; k <= 6; ++k) last = hold.step(nominal_at(double(k))).level;
    CHECK(last == AlertLevel::kNominal);
}

TEST_CASE("wrap ambiguity passes straight through") {
    Detector det{DetectorConfig{}};
    auto fo = nominal_at(0.0);
    fo.wrap_ambiguous = true;
    const auto v = det.step(fo);
    CHECK(v.level == AlertLevel::kAlarm);
    CHECK((v.triggers & kTriggerWrapAmbiguous) != 0);
}

TEST_CASE("raising thresholds never enlarges the trigger set") {
    // one shared synthetic stream with occasional excursions
    Xoshiro256pp rng(3);
    std::vector<FilterOutputs> stream;
    for (int k = 0; k < 500; ++k) {
        FilterOutputs fo;
        fo.epoch = double(k);
        fo.innovation_var = 1e-18;
        fo.innovation = (rng.uniform() - 0.5) * 8e-9;
        fo.x_phase = (rng.uniform() - 0.5) * 6e-5;
        fo.x_freq = (rng.uniform() - 0.5) * 4e-7;
        stream.push_back(fo);
    }
    DetectorConfig lo;
    lo.compensate_drift_envelope = false;
    DetectorConfig hi = lo;
    hi.nis_gate *= 2.0;
    hi.phase_limit *= 2.0;
    hi.drift_margin *= 2.0;
    Detector dlo{lo}, dhi{hi};
    for (const auto& fo : stream) {
        const auto vlo = dlo.step(fo);
        const auto vhi = dhi.step(fo);
        CHECK((vhi.triggers & ~vlo.triggers) == 0);  // subset per epoch
    }
}

TEST_CASE("metrics arithmetic") {
    std::vector<Verdict> v(200);
    for (int k = 0; k < 200; ++k) v[k].epoch = double(k);
    v[112].level = AlertLevel::kAlarm;
    v[113].level = AlertLevel::kAlarm;
    std::vector<double> phase(200, 1e-6);
    const auto m = metrics(v, phase, true, 100.0);
    CHECK(m.detected);
    CHECK_FALSE(m.missed);
    CHECK(m.latency == doctest::Approx(12.0));
    CHECK(m.offset_at_detection == doctest::Approx(1e-6));
    CHECK(m.false_alarm_epochs == 0);

    const auto none = metrics(std::vector<Verdict>(50), std::vector<double>(50),
                              true, 10.0);
    CHECK(none.missed);
    CHECK(none.latency == -1.0);

    v[50].level = AlertLevel::kAlarm;
    const auto fa = metrics(v, phase, true, 100.0);
    CHECK(fa.false_alarm_epochs == 1);
}

TEST_CASE("calibrate_floor") {
    MeterConfig meter;
    NoiseSpec q;
    q.q1 = 1e-18;
    auto cfg = calibrate_floor(meter, q, 3e-18);
    CHECK(cfg.drift_floor == doctest::Approx(9e-8));
    CHECK(cfg.drift_margin * cfg.drift_floor == doctest::Approx(1.35e-7));

    meter.pll_drift_rate = 0.0;
    cfg = calibrate_floor(meter, q, 3e-18);
    CHECK(cfg.drift_floor > 0.0);
    CHECK(cfg.drift_floor < 9e-8);  // far below the PLL-limited floor
}

TEST_CASE("ideal-meter floor matches a Monte-Carlo frequency-error scatter") {
    // oracle: matched nominal WFM runs; the realized frequency-estimate
    // error std should agree with drift_floor / 3 (the posterior sigma)
    MeterConfig meter;
    meter.pll_drift_rate = 0.0;
    NoiseSpec q;
    q.q1 = 1e-18;
    const double r = 3e-18;
    const auto cfg = calibrate_floor(meter, q, r);

    GaussianStream noise(9), meas(10);
    double sumsq = 0.0;
    int count = 0;
    for (int run = 0; run < 10; ++run) {
        FilterState st;
        st.q = q;
        st.r = r;
        st.P = default_initial_covariance();
        double true_phase = 0.0;
        for (int k = 1; k <= 600; ++k) {
            true_phase += std::sqrt(q.q1) * noise.next();  // WFM phase walk
            PhaseSample s;
            s.epoch = double(k);
            s.offset = true_phase + std::sqrt(r) * meas.next();
            st = update(st, s).state;
            if (k > 400) {
                const double err = st.x_hat(1);  // true frequency is ~0 mean
                sumsq += err * err;
                ++count;
            }
        }
    }
    const double realized_sigma = std::sqrt(sumsq / double(count));
    CHECK(cfg.drift_floor / 3.0 ==
          doctest::Approx(realized_sigma).epsilon(0.5));
}
