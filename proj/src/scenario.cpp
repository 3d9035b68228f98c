#include "clockwatch/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <stdexcept>

#include "clockwatch/clock_filter.hpp"
#include "clockwatch/rng.hpp"

namespace clockwatch {

void AttackProfile::validate() const {
    if (kind == AttackKind::kNone) return;
    if (start_epoch < 0.0)
        throw std::invalid_argument("attack: start_epoch < 0");
    if (rate != 0.0 && target_offset != 0.0 &&
        (rate > 0.0) != (target_offset > 0.0))
        throw std::invalid_argument("attack: rate and target_offset signs differ");
    if (kind == AttackKind::kSmoothPulloff && !(smoothness > 0.0))
        throw std::invalid_argument("attack: smoothness <= 0");
}

AttackKind attack_kind_from_string(const std::string& name) {
    if (name == "none") return AttackKind::kNone;
    if (name == "step") return AttackKind::kStep;
    if (name == "ramp") return AttackKind::kRamp;
    if (name == "smooth-pulloff" || name == "smooth_pulloff")
        return AttackKind::kSmoothPulloff;
    throw std::invalid_argument("unknown attack kind: " + name);
}

std::string attack_kind_name(AttackKind kind) {
    switch (kind) {
        case AttackKind::kNone: return "none";
        case AttackKind::kStep: return "step";
        case AttackKind::kRamp: return "ramp";
        case AttackKind::kSmoothPulloff: return "smooth-pulloff";
    }
    return "?";
}

AttackProfile attack_preset(const std::string& name) {
    AttackProfile p;
    if (name == "ds2-like") {
        // time pull at 200 ns/s from sample 100, capture at 2 us
        p.kind = AttackKind::kRamp;
        p.start_epoch = 100.0;
        p.rate = 2e-7;
        p.target_offset = 2e-6;
        return p;
    }
    if (name == "ds3-like") {
        p.kind = AttackKind::kSmoothPulloff;
        p.start_epoch = 100.0;
        p.target_offset = 2e-6;
        p.smoothness = 60.0;
        return p;
    }
    throw std::invalid_argument("unknown attack preset: " + name);
}

PhaseTrajectory apply_attack(const PhaseTrajectory& truth,
                             const AttackProfile& profile) {
    profile.validate();
    PhaseTrajectory out = truth;
    if (profile.kind == AttackKind::kNone) return out;
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double t = out.epoch(k);
        if (t < profile.start_epoch) continue;
        const double dtk = t - profile.start_epoch;
        double add = 0.0;
        switch (profile.kind) {
            case AttackKind::kStep:
                add = profile.target_offset;
                break;
            case AttackKind::kRamp:
                add = profile.rate * dtk;
                if (profile.target_offset != 0.0) {
                    if (profile.target_offset > 0.0)
                        add = std::min(add, profile.target_offset);
                    else
                        add = std::max(add, profile.target_offset);
                }
                break;
            case AttackKind::kSmoothPulloff:
                add = profile.target_offset *
                      (1.0 - std::exp(-dtk / profile.smoothness));
                break;
            case AttackKind::kNone:
                break;
        }
        out.samples[k] += add;
    }
    return out;
}

namespace {

ClockTruth clock_from_config(const Config& cfg, const std::string& section) {
    ClockTruth c;
    const std::string profile = cfg.get_string(section + ".profile", "");
    if (!profile.empty()) c = clock_profile(profile);
    c.x0 = cfg.get_double(section + ".x0", c.x0);
    c.y0 = cfg.get_double(section + ".y0", c.y0);
    c.d0 = cfg.get_double(section + ".d0", c.d0);
    c.noise.q1 = cfg.get_double(section + ".q1", c.noise.q1);
    c.noise.q2 = cfg.get_double(section + ".q2", c.noise.q2);
    c.noise.q3 = cfg.get_double(section + ".q3", c.noise.q3);
    c.noise.wpm_sigma = cfg.get_double(section + ".wpm_sigma", c.noise.wpm_sigma);
    return c;
}

std::string fd(double v) { return format_double(v); }

}  // namespace

ScenarioConfig ScenarioConfig::from_config(const Config& cfg) {
    ScenarioConfig sc;
    sc.rx = clock_from_config(cfg, "clock.rx");
    if (!cfg.has("clock.rx.profile") && !cfg.has("clock.rx.q1"))
        sc.rx = clock_profile("rx-tcxo");
    sc.ref = clock_from_config(cfg, "clock.ref");
    if (!cfg.has("clock.ref.profile") && !cfg.has("clock.ref.q1"))
        sc.ref = clock_profile("ocxo-ref");

    sc.meter.f_meas = cfg.get_double("meter.f_meas", sc.meter.f_meas);
    sc.meter.pll_drift_rate =
        cfg.get_double("meter.pll_drift_rate", sc.meter.pll_drift_rate);
    sc.meter.pll_jitter_sigma =
        cfg.get_double("meter.pll_jitter_sigma", sc.meter.pll_jitter_sigma);
    sc.meter.wrap_interval =
        cfg.get_double("meter.wrap_interval", sc.meter.wrap_interval);

    // tracker process noise defaults to the full relative-clock model
    const NoiseSpec matched = sc.rx.noise + sc.ref.noise;
    sc.filter_q.q1 = cfg.get_double("filter.q1", matched.q1);
    sc.filter_q.q2 = cfg.get_double("filter.q2", matched.q2);
    sc.filter_q.q3 = cfg.get_double("filter.q3", matched.q3);
    sc.filter_q.wpm_sigma = cfg.get_double("filter.wpm_sigma", matched.wpm_sigma);
    sc.filter_r = cfg.get_double("filter.r", 0.0);

    sc.detector.nis_gate = cfg.get_double("detector.nis_gate", sc.detector.nis_gate);
    sc.detector.nis_k = cfg.get_size("detector.nis_k", sc.detector.nis_k);
    sc.detector.nis_n = cfg.get_size("detector.nis_n", sc.detector.nis_n);
    sc.detector.phase_limit =
        cfg.get_double("detector.phase_limit", sc.detector.phase_limit);
    sc.detector.drift_floor =
        cfg.get_double("detector.drift_floor", meter_floor(sc.meter));
    sc.detector.drift_margin =
        cfg.get_double("detector.drift_margin", sc.detector.drift_margin);
    if (cfg.has("detector.hold_epochs"))
        sc.detector.hold_epochs = cfg.get_size("detector.hold_epochs", 0);
    sc.detector.compensate_drift_envelope =
        cfg.get_bool("detector.compensate_drift_envelope",
                     sc.detector.compensate_drift_envelope);

    const std::string preset = cfg.get_string("attack.preset", "");
    if (!preset.empty()) sc.attack = attack_preset(preset);
    if (cfg.has("attack.kind"))
        sc.attack.kind =
            attack_kind_from_string(cfg.get_string("attack.kind", "none"));
    sc.attack.start_epoch =
        cfg.get_double("attack.start_epoch", sc.attack.start_epoch);
    sc.attack.rate = cfg.get_double("attack.rate", sc.attack.rate);
    sc.attack.target_offset =
        cfg.get_double("attack.target_offset", sc.attack.target_offset);
    sc.attack.smoothness =
        cfg.get_double("attack.smoothness", sc.attack.smoothness);

    sc.ensemble.enabled = cfg.get_bool("ensemble.enabled", false);
    sc.ensemble.n = cfg.get_size("ensemble.n", sc.ensemble.n);
    sc.ensemble.member_profile =
        cfg.get_string("ensemble.member_profile", sc.ensemble.member_profile);
    sc.ensemble.pivot = cfg.get_size("ensemble.pivot", sc.ensemble.pivot);
    sc.ensemble.meas_sigma =
        cfg.get_double("ensemble.meas_sigma", sc.ensemble.meas_sigma);
    sc.ensemble.kp = cfg.get_double("ensemble.kp", sc.ensemble.kp);
    sc.ensemble.ki = cfg.get_double("ensemble.ki", sc.ensemble.ki);
    sc.ensemble.slew_limit =
        cfg.get_double("ensemble.slew_limit", sc.ensemble.slew_limit);

    sc.duration = cfg.get_double("run.duration", sc.duration);
    sc.dt = cfg.get_double("run.dt", sc.dt);
    sc.seed = cfg.get_u64("run.seed", sc.seed);
    sc.validate();
    return sc;
}

void ScenarioConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("scenario: dt <= 0");
    if (duration < 2.0 * dt)
        throw std::invalid_argument("scenario: duration < 2*dt");
    if (attack.kind != AttackKind::kNone && duration <= attack.start_epoch)
        throw std::invalid_argument("scenario: duration <= attack start");
    meter.validate();
    detector.validate();
    attack.validate();
    if (ensemble.enabled) {
        if (ensemble.n == 0)
            throw std::invalid_argument("scenario: ensemble.n == 0");
        if (ensemble.pivot >= ensemble.n)
            throw std::invalid_argument("scenario: ensemble pivot out of range");
    }
}

Config ScenarioConfig::echo() const {
    Config c;
    auto put_clock = [&c](const std::string& s, const ClockTruth& ck) {
        c.set(s + ".x0", fd(ck.x0));
        c.set(s + ".y0", fd(ck.y0));
        c.set(s + ".d0", fd(ck.d0));
        c.set(s + ".q1", fd(ck.noise.q1));
        c.set(s + ".q2", fd(ck.noise.q2));
        c.set(s + ".q3", fd(ck.noise.q3));
        c.set(s + ".wpm_sigma", fd(ck.noise.wpm_sigma));
    };
    put_clock("clock.rx", rx);
    put_clock("clock.ref", ref);
    c.set("meter.f_meas", fd(meter.f_meas));
    c.set("meter.pll_drift_rate", fd(meter.pll_drift_rate));
    c.set("meter.pll_jitter_sigma", fd(meter.pll_jitter_sigma));
    c.set("meter.wrap_interval", fd(meter.wrap_interval));
    c.set("filter.q1", fd(filter_q.q1));
    c.set("filter.q2", fd(filter_q.q2));
    c.set("filter.q3", fd(filter_q.q3));
    c.set("filter.wpm_sigma", fd(filter_q.wpm_sigma));
    c.set("filter.r", fd(filter_r));
    c.set("detector.nis_gate", fd(detector.nis_gate));
    c.set("detector.nis_k", std::to_string(detector.nis_k));
    c.set("detector.nis_n", std::to_string(detector.nis_n));
    c.set("detector.phase_limit", fd(detector.phase_limit));
    c.set("detector.drift_floor", fd(detector.drift_floor));
    c.set("detector.drift_margin", fd(detector.drift_margin));
    c.set("detector.compensate_drift_envelope",
          detector.compensate_drift_envelope ? "true" : "false");
    c.set("attack.kind", attack_kind_name(attack.kind));
    c.set("attack.start_epoch", fd(attack.start_epoch));
    c.set("attack.rate", fd(attack.rate));
    c.set("attack.target_offset", fd(attack.target_offset));
    c.set("attack.smoothness", fd(attack.smoothness));
    c.set("ensemble.enabled", ensemble.enabled ? "true" : "false");
    c.set("ensemble.n", std::to_string(ensemble.n));
    c.set("ensemble.member_profile", ensemble.member_profile);
    c.set("ensemble.pivot", std::to_string(ensemble.pivot));
    c.set("ensemble.meas_sigma", fd(ensemble.meas_sigma));
    c.set("ensemble.kp", fd(ensemble.kp));
    c.set("ensemble.ki", fd(ensemble.ki));
    c.set("ensemble.slew_limit", fd(ensemble.slew_limit));
    c.set("run.duration", fd(duration));
    c.set("run.dt", fd(dt));
    c.set("run.seed", std::to_string(seed));
    return c;
}

EnsembleDemoResult run_ensemble_demo(const EnsembleOptions& opts,
                                     double duration, double dt,
                                     std::uint64_t seed) {
    const std::size_t n =
        static_cast<std::size_t>(std::floor(duration / dt)) + 1;
    EnsembleDemoResult out;
    out.epochs.resize(n);
    out.member_truth.resize(opts.n);
    out.timescale.resize(n);
    out.steered_phase.resize(n);
    out.steer_error.resize(n);
    out.steer_control.resize(n);

    std::vector<NoiseSpec> specs(opts.n);
    for (std::size_t i = 0; i < opts.n; ++i) {
        ClockTruth c = clock_profile(opts.member_profile);
        c.seed = derive_stream(seed, 200 + i);
        specs[i] = c.noise;
        out.member_truth[i] = simulate_clock(c, duration, dt).samples;
    }
    ClockTruth steered_clock = clock_profile(opts.member_profile);
    steered_clock.seed = derive_stream(seed, 300);
    const std::vector<double> steered_free =
        simulate_clock(steered_clock, duration, dt).samples;

    EnsembleState ens =
        make_ensemble(specs, opts.pivot, default_initial_covariance());
    const double r = std::max(opts.meas_sigma * opts.meas_sigma, 1e-30);
    GaussianStream meas(derive_stream(seed, 400));

    ServoState servo;
    servo.kp = opts.kp;
    servo.ki = opts.ki;
    servo.slew_limit = opts.slew_limit;
    double ctrl_phase = 0.0;  // integral of applied frequency correction

    std::vector<std::optional<double>> diffs(opts.n);
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) ens = ensemble_propagate(ens, dt);
        for (std::size_t i = 0; i < opts.n; ++i) {
            if (i == opts.pivot) {
                diffs[i] = std::nullopt;
                continue;
            }
            diffs[i] = out.member_truth[i][k] -
                       out.member_truth[opts.pivot][k] +
                       opts.meas_sigma * meas.next();
        }
        ens = ensemble_update(ens, diffs, r);

        const double x_pivot_hat = ens.member_phase(opts.pivot);
        const double ta = out.member_truth[opts.pivot][k] - x_pivot_hat;
        const double steered = steered_free[k] + ctrl_phase;

        out.epochs[k] = dt * double(k);
        out.timescale[k] = ta;
        out.steered_phase[k] = steered;

        // steering error is realizable: (steered - pivot) is a counter
        // measurement, pivot-to-ensemble comes from the estimator
        const double err = (steered - out.member_truth[opts.pivot][k]) +
                           x_pivot_hat;
        servo = steer(servo, err, dt);
        const double u = quantize_control(servo.control_out);
        out.steer_error[k] = err;
        out.steer_control[k] = u;
        ctrl_phase += u * dt;  // applied over the next interval
    }
    out.final_weights = ens.weights;
    return out;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg_in) {
    ScenarioConfig cfg = cfg_in;
    cfg.validate();
    cfg.rx.seed = derive_stream(cfg.seed, 100);
    cfg.ref.seed = derive_stream(cfg.seed, 101);
    cfg.meter.seed = derive_stream(cfg.seed, 102);

    const PhaseTrajectory rx_traj = simulate_clock(cfg.rx, cfg.duration, cfg.dt);

    PhaseTrajectory ref_traj;
    ScenarioResult result;
    if (cfg.ensemble.enabled) {
        const EnsembleDemoResult ens =
            run_ensemble_demo(cfg.ensemble, cfg.duration, cfg.dt, cfg.seed);
        ref_traj.dt = cfg.dt;
        ref_traj.samples = ens.steered_phase;
        result.steer_control = ens.steer_control;
        result.steer_error = ens.steer_error;
    } else {
        ref_traj = simulate_clock(cfg.ref, cfg.duration, cfg.dt);
    }

    const PhaseTrajectory rel = relative_phase(rx_traj, ref_traj);
    const PhaseTrajectory attacked = apply_attack(rel, cfg.attack);
    const std::vector<PhaseSample> samples = measure(attacked, cfg.meter);
    const UnwrapResult uw = unwrap(samples, cfg.meter.wrap_interval);
    const std::set<std::size_t> ambiguous(uw.ambiguous_at.begin(),
                                          uw.ambiguous_at.end());

    const double r = cfg.filter_r > 0.0
        ? cfg.filter_r
        : meter_measurement_variance(cfg.meter) +
              cfg.filter_q.wpm_sigma * cfg.filter_q.wpm_sigma;

    FilterState st;
    st.q = cfg.filter_q;
    st.q.wpm_sigma = 0.0;  // white PM lives in r, not the process model
    st.r = r;
    st.P = default_initial_covariance();
    st.t_last = samples.front().epoch;

    Detector det(cfg.detector);
    result.records.reserve(samples.size());
    std::vector<Verdict> verdicts;
    std::vector<double> est_phase;
    verdicts.reserve(samples.size());
    est_phase.reserve(samples.size());

    for (std::size_t k = 0; k < samples.size(); ++k) {
        PhaseSample s = samples[k];
        s.offset = uw.offsets[k];  // track the continuous series

        ScenarioRecord rec;
        rec.epoch = s.epoch;
        rec.truth_offset = rel.samples[k];
        rec.attacked_offset = attacked.samples[k];
        rec.measured = uw.offsets[k];
        rec.valid = s.valid;

        FilterOutputs fo;
        fo.epoch = s.epoch;
        fo.wrap_ambiguous = ambiguous.count(k) > 0;

        if (s.valid) {
            const UpdateResult ur = update(st, s);
            st = ur.state;
            rec.filter.innovation = ur.innovation;
            rec.filter.innovation_var = ur.innovation_var;
            rec.filter.nis = nis(ur.innovation, ur.innovation_var);
        } else {
            // coast: propagate only, innovation undefined -> neutral zero
            if (s.epoch > st.t_last) st = propagate(st, s.epoch);
            rec.filter.innovation = 0.0;
            rec.filter.innovation_var = st.P(0, 0) + st.r;
            rec.filter.nis = 0.0;
        }
        rec.filter.epoch = s.epoch;
        rec.filter.x_phase = st.x_hat(0);
        rec.filter.x_freq = st.x_hat(1);
        rec.filter.x_drift = st.x_hat(2);

        fo.x_phase = st.x_hat(0);
        fo.x_freq = st.x_hat(1);
        fo.x_drift = st.x_hat(2);
        fo.innovation = rec.filter.innovation;
        fo.innovation_var = rec.filter.innovation_var;

        rec.verdict = det.step(fo);
        if (rec.verdict.level == AlertLevel::kAlarm) result.alarm_raised = true;
        verdicts.push_back(rec.verdict);
        est_phase.push_back(rec.filter.x_phase);
        result.records.push_back(rec);
    }

    result.summary = metrics(verdicts, est_phase,
                             cfg.attack.kind != AttackKind::kNone,
                             cfg.attack.start_epoch);
    result.seed = cfg.seed;
    result.meter_drift_sign = meter_drift_sign(cfg.meter);
    result.config_echo = cfg.echo().serialize();
    return result;
}

std::string summary_text(const ScenarioResult& result) {
    std::ostringstream out;
    out << "seed=" << result.seed << "\n";
    out << "epochs=" << result.records.size() << "\n";
    out << "meter_drift_sign=" << result.meter_drift_sign << "\n";
    out << "alarm_raised=" << (result.alarm_raised ? 1 : 0) << "\n";
    out << "detected=" << (result.summary.detected ? 1 : 0) << "\n";
    out << "missed=" << (result.summary.missed ? 1 : 0) << "\n";
    if (result.summary.latency >= 0.0)
        out << "latency_s=" << format_double(result.summary.latency) << "\n";
    else
        out << "latency_s=undetected\n";
    out << "offset_at_detection_s="
        << format_double(result.summary.offset_at_detection) << "\n";
    out << "false_alarm_epochs=" << result.summary.false_alarm_epochs << "\n";
    return out.str();
}

TraceAnalysis analyze_trace(const std::vector<PhaseSample>& samples,
                            const NoiseSpec& q, double r,
                            const DetectorConfig& detector,
                            double wrap_interval) {
    if (samples.empty()) throw std::invalid_argument("analyze_trace: no samples");
    TraceAnalysis out;
    const UnwrapResult uw = unwrap(samples, wrap_interval);
    const std::set<std::size_t> ambiguous(uw.ambiguous_at.begin(),
                                          uw.ambiguous_at.end());
    FilterState st;
    st.q = q;
    st.q.wpm_sigma = 0.0;
    st.r = r;
    st.P = default_initial_covariance();
    st.t_last = samples.front().epoch;
    Detector det(detector);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        PhaseSample s = samples[k];
        s.offset = uw.offsets[k];
        FilterTraceRow row;
        row.epoch = s.epoch;
        if (s.valid) {
            const UpdateResult ur = update(st, s);
            st = ur.state;
            row.innovation = ur.innovation;
            row.innovation_var = ur.innovation_var;
            row.nis = nis(ur.innovation, ur.innovation_var);
        } else {
            if (s.epoch > st.t_last) st = propagate(st, s.epoch);
            row.innovation_var = st.P(0, 0) + st.r;
        }
        row.x_phase = st.x_hat(0);
        row.x_freq = st.x_hat(1);
        row.x_drift = st.x_hat(2);
        FilterOutputs fo;
        fo.epoch = s.epoch;
        fo.x_phase = row.x_phase;
        fo.x_freq = row.x_freq;
        fo.x_drift = row.x_drift;
        fo.innovation = row.innovation;
        fo.innovation_var = row.innovation_var;
        fo.wrap_ambiguous = ambiguous.count(k) > 0;
        const Verdict v = det.step(fo);
        if (v.level == AlertLevel::kAlarm) out.alarm_raised = true;
        out.trace.push_back(row);
        out.verdicts.push_back(v);
    }
    return out;
}

std::vector<SweepRow> sweep(const Config& base, const std::string& axis,
                            const std::vector<std::string>& values) {
    if (values.empty()) throw std::invalid_argument("sweep: no values");
    {
        // the axis must name a known scenario parameter: it either exists in
        // the base config or survives a probe parse
        Config probe = base;
        probe.set(axis, values.front());
        const Config echo = ScenarioConfig::from_config(probe).echo();
        if (!echo.has(axis))
            throw std::invalid_argument("sweep: unknown axis '" + axis + "'");
    }
    const std::uint64_t base_seed =
        ScenarioConfig::from_config(base).seed;

    std::vector<std::future<SweepRow>> futures;
    for (std::size_t i = 0; i < values.size(); ++i) {
        futures.push_back(std::async(std::launch::async, [&, i]() {
            Config c = base;
            c.set(axis, values[i]);
            c.set("run.seed", std::to_string(base_seed + i));
            const ScenarioResult r = run_scenario(ScenarioConfig::from_config(c));
            SweepRow row;
            row.value = values[i];
            row.seed = base_seed + i;
            row.summary = r.summary;
            row.alarm_raised = r.alarm_raised;
            return row;
        }));
    }
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (auto& f : futures) rows.push_back(f.get());
    return rows;
}

void emit_plots(const ScenarioResult& result, const std::string& prefix,
                bool svg) {
    std::vector<double> epochs, rx_phase, diff, alarms;
    for (const auto& rec : result.records) {
        epochs.push_back(rec.epoch);
        rx_phase.push_back(rec.attacked_offset);
        diff.push_back(rec.measured);
        if (rec.verdict.level == AlertLevel::kAlarm) alarms.push_back(rec.epoch);
    }
    {
        std::ofstream out(prefix + "_rx_phase.csv");
        out << "epoch_s,phase_s\n";
        for (std::size_t i = 0; i < epochs.size(); ++i)
            out << format_double(epochs[i]) << ',' << format_double(rx_phase[i])
                << '\n';
    }
    {
        std::ofstream out(prefix + "_phase_diff.csv");
        out << "epoch_s,phase_s\n";
        for (std::size_t i = 0; i < epochs.size(); ++i)
            out << format_double(epochs[i]) << ',' << format_double(diff[i])
                << '\n';
    }
    if (svg) {
        std::ofstream a(prefix + "_rx_phase.svg");
        write_svg_chart(a, "Receiver PPS phase", epochs, rx_phase, alarms);
        std::ofstream b(prefix + "_phase_diff.svg");
        write_svg_chart(b, "Phase difference vs reference", epochs, diff,
                        alarms);
    }
}

}  // namespace clockwatch
