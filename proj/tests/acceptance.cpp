// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "clockwatch/clock_filter.hpp"
#include "clockwatch/clock_sim.hpp"
#include "clockwatch/config.hpp"
#include "clockwatch/detect.hpp"
#include "clockwatch/ensemble.hpp"
#include "clockwatch/phase_meter.hpp"
#include "clockwatch/rng.hpp"
#include "clockwatch/scenario.hpp"
#include "clockwatch/stability.hpp"

using namespace clockwatch;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail) {
    std::printf("%s  criterion %2d: %s\n", ok ? "PASS" : "FAIL", idx, name);
    if (!detail.empty()) std::printf("      %s\n", detail.c_str());
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double adev_at(const std::vector<double>& samples, double dt, double tau) {
    PhaseTrajectory t;
    t.dt = dt;
    t.samples = samples;
    return overlapping_adev(t, {tau})[0].sigma_y;
}

// 1. counter resolution at the default 200 MHz measurement clock
void criterion_1() {
    MeterConfig cfg;
    const bool ok = cfg.step() == 5e-9;
    report(1, "200 MHz counter step is exactly 5 ns", ok,
           fmt("step = %.17g s", cfg.step()));
}

// 2. reference-profile short-term stability
void criterion_2() {
    ClockTruth c = clock_profile("ocxo-ref");
    c.seed = 1001;
    const auto t = simulate_clock(c, 1e5, 1.0);
    const double s1 = adev_at(t.samples, 1.0, 1.0);
    const bool ok = s1 >= 5.6e-11 && s1 <= 1.04e-10;
    report(2, "ocxo-ref ADEV(1 s) within 8e-11 +/- 30% at 1e5 samples", ok,
           fmt("sigma_y(1 s) = %.3e", s1));
}

// 3. synthesized noise against the closed-form deviation
void criterion_3() {
    bool ok = true;
    std::string detail;
    const double taus[3] = {1.0, 10.0, 100.0};
    for (int which = 0; which < 2; ++which) {
        NoiseSpec q;
        if (which == 0)
            q.q1 = 6.4e-21;
        else
            q.q2 = 1e-24;
        const auto t = synthesize_noise(q, 100000, 1.0, 2000 + which);
        for (double tau : taus) {
            const double sim = adev_at(t.samples, 1.0, tau);
            const double ana = analytic_adev(q, tau);
            const double rel = std::abs(sim - ana) / ana;
            if (rel > 0.20) ok = false;
            detail += fmt(which == 0 ? "wfm tau=%g: %.1f%%  " : "rwfm tau=%g: %.1f%%  ",
                          tau, 100.0 * rel);
        }
    }
    report(3, "WFM and RWFM sims match analytic ADEV within 20%", ok, detail);
}

// 4. state-transition structure
void criterion_4() {
    Mat3 p2, p3, p5, q;
    NoiseSpec spec;
    spec.q1 = 1e-21;
    spec.q2 = 3e-26;
    spec.q3 = 7e-32;
    transition(spec, 2.0, p2, q);
    transition(spec, 3.0, p3, q);
    transition(spec, 5.0, p5, q);
    bool ok = ((p2 * p3) - p5).cwiseAbs().maxCoeff() == 0.0;

    double worst = 0.0;
    Xoshiro256pp rng(404);
    for (int trial = 0; trial < 100; ++trial) {
        NoiseSpec s;
        s.q1 = 1e-21 * rng.uniform();
        s.q2 = 1e-26 * rng.uniform();
        s.q3 = 1e-32 * rng.uniform();
        const double t1 = 0.1 + 10.0 * rng.uniform();
        const double t2 = 0.1 + 10.0 * rng.uniform();
        Mat3 phi1, phi2, phi12, Q1, Q2, Q12;
        transition(s, t1, phi1, Q1);
        transition(s, t2, phi2, Q2);
        transition(s, t1 + t2, phi12, Q12);
        const Mat3 composed = phi2 * Q1 * phi2.transpose() + Q2;
        worst = std::max(worst, (composed - Q12).cwiseAbs().maxCoeff() /
                                    Q12.cwiseAbs().maxCoeff());
    }
    ok = ok && worst < 1e-12;
    report(4, "Phi semigroup exact; Q additivity < 1e-12 over 100 triples", ok,
           fmt("worst Q additivity error = %.2e", worst));
}

// 5. propagation is invariant to interval splitting
void criterion_5() {
    NoiseSpec spec;
    spec.q1 = 1e-21;
    spec.q2 = 3e-26;
    spec.q3 = 7e-32;
    Xoshiro256pp rng(505);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        FilterState st;
        st.q = spec;
        st.r = 1e-18;
        st.x_hat << 1e-8 * rng.uniform(), 1e-9 * rng.uniform(),
            1e-12 * rng.uniform();
        st.P = default_initial_covariance();
        const double total = 0.5 + 20.0 * rng.uniform();
        const double split = total * rng.uniform();
        const auto whole = propagate(st, total);
        const auto half = propagate(propagate(st, split), total);
        worst = std::max(worst,
                         (whole.x_hat - half.x_hat).cwiseAbs().maxCoeff() /
                             whole.x_hat.cwiseAbs().maxCoeff());
        worst = std::max(worst, (whole.P - half.P).cwiseAbs().maxCoeff() /
                                    whole.P.cwiseAbs().maxCoeff());
    }
    const bool ok = worst < 1e-12;
    report(5, "split-propagation invariance < 1e-12 over 1000 splits", ok,
           fmt("worst relative error = %.2e", worst));
}

// 6. matched model: innovations are chi-square(1) consistent
void criterion_6() {
    NoiseSpec q;
    q.q1 = 1e-20;
    const auto truth = synthesize_noise(q, 10100, 1.0, 606);
    MeterConfig meter;
    meter.f_meas = 1e12;  // quantization negligible against the jitter
    meter.pll_drift_rate = 0.0;
    meter.pll_jitter_sigma = 5e-9;
    meter.seed = 607;
    const auto samples = measure(truth, meter);

    FilterState st;
    st.q = q;
    st.r = meter_measurement_variance(meter);
    st.P = default_initial_covariance();
    double sum = 0.0;
    std::size_t n = 0, over = 0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto res = update(st, samples[k]);
        st = res.state;
        if (k < 100) continue;  // warmup
        const double v = nis(res.innovation, res.innovation_var);
        sum += v;
        if (v > 3.84) ++over;
        ++n;
    }
    const double mean = sum / double(n);
    const double rate = double(over) / double(n);
    const bool ok = std::abs(mean - 1.0) <= 0.05 &&
                    std::abs(rate - 0.05) <= 0.015;
    report(6, "matched closed loop: mean NIS 1.0 +/- 0.05, tail rate 5% +/- 1.5%",
           ok, fmt("mean = %.3f, P(NIS > 3.84) = %.3f", mean, rate));
}

// 7. ramp pull-off is caught before full capture, every seed
void criterion_7() {
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Config cfg;
        cfg.set("attack.preset", "ds2-like");
        cfg.set("run.duration", "400");
        cfg.set("run.seed", std::to_string(seed));
        const auto r = run_scenario(ScenarioConfig::from_config(cfg));
        bool caught = false;
        for (const auto& rec : r.records) {
            if (rec.verdict.level == AlertLevel::kAlarm) {
                caught = std::abs(rec.attacked_offset - rec.truth_offset) < 2e-6;
                break;
            }
        }
        if (!r.summary.detected || r.summary.missed || !caught) {
            ok = false;
            detail += fmt("seed %g missed  ", double(seed));
        }
    }
    report(7, "ds2-like pull-off alarmed before 2 us capture on 10/10 seeds", ok,
           detail.empty() ? "all seeds detected in time" : detail);
}

// 8. clean runs never alarm
void criterion_8() {
    std::size_t bad_runs = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Config cfg;
        cfg.set("run.duration", "10000");
        cfg.set("run.seed", std::to_string(seed));
        const auto r = run_scenario(ScenarioConfig::from_config(cfg));
        if (r.alarm_raised) ++bad_runs;
    }
    report(8, "no false alarms over 20 nominal seeds x 1e4 epochs",
           bad_runs == 0, fmt("runs with a false alarm: %g", double(bad_runs)));
}

// 9. hard phase bound
void criterion_9() {
    Detector det{DetectorConfig{}};
    FilterOutputs fo;
    fo.innovation_var = 1e-18;
    fo.x_phase = 30e-6;
    const auto v = det.step(fo);
    const bool ok = v.level == AlertLevel::kAlarm &&
                    (v.triggers & kTriggerPhaseLimit) != 0;
    report(9, "30 us phase offset trips the 25.6 us limit immediately", ok,
           fmt("evidence = %.3e s", v.evidence));
}

// 10. ensemble averaging gain
void criterion_10() {
    EnsembleOptions opts;
    opts.n = 4;
    const auto demo = run_ensemble_demo(opts, 1e5, 1.0, 4242);
    const double ens = adev_at(demo.timescale, 1.0, 100.0);
    double best = 1.0;
    for (const auto& m : demo.member_truth)
        best = std::min(best, adev_at(m, 1.0, 100.0));
    const bool ok = ens <= best / 1.5;
    report(10, "4-member timescale ADEV(100 s) <= best member / 1.5", ok,
           fmt("ensemble %.3e vs best member %.3e", ens, best));
}

// 11. steering holds the disciplined clock near ensemble time
void criterion_11() {
    EnsembleOptions opts;
    opts.n = 4;
    const auto demo = run_ensemble_demo(opts, 1e5, 1.0, 4343);
    double worst = 0.0;
    for (std::size_t k = 0; k < demo.steer_error.size(); ++k) {
        if (demo.epochs[k] < 5000.0) continue;  // lock-in transient
        worst = std::max(worst, std::abs(demo.steer_error[k]));
    }
    const bool ok = worst <= 100e-9;
    report(11, "steered clock stays within +/- 100 ns of ensemble time", ok,
           fmt("worst steady-state error = %.3e s", worst));
}

// 12. byte-identical reruns through the CLI
void criterion_12() {
    const std::string cli = CLOCKWATCH_CLI_PATH;
    const std::string cfg_path = "/tmp/clockwatch_acc.cfg";
    {
        std::ofstream cfg(cfg_path);
        cfg << "[run]\nduration = 600\n[attack]\npreset = ds2-like\n";
    }
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 2; ++i) {
        const std::string cmd = cli + " simulate --config " + cfg_path +
                                " --seed 33 --out /tmp/clockwatch_acc_run" +
                                std::to_string(i) + " > /dev/null";
        if (std::system(cmd.c_str()) == -1) ok = false;
    }
    for (const char* suffix : {"_records.csv", "_summary.txt", "_config.txt"}) {
        std::ifstream a("/tmp/clockwatch_acc_run0" + std::string(suffix),
                        std::ios::binary);
        std::ifstream b("/tmp/clockwatch_acc_run1" + std::string(suffix),
                        std::ios::binary);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        if (!a.good() || !b.good() || sa.str().empty() ||
            sa.str() != sb.str()) {
            ok = false;
            detail += std::string(suffix) + " differs  ";
        }
    }
    report(12, "identical config+seed reruns are byte-identical", ok,
           detail.empty() ? "records, summary and config echo all match"
                          : detail);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 12 criteria passed\n");
    return 0;
}
