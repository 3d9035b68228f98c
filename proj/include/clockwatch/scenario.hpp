#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clockwatch/clock_sim.hpp"
#include "clockwatch/config.hpp"
#include "clockwatch/csv_io.hpp"
#include "clockwatch/detect.hpp"
#include "clockwatch/ensemble.hpp"
#include "clockwatch/phase_meter.hpp"

namespace clockwatch {

enum class AttackKind { kNone, kStep, kRamp, kSmoothPulloff };

struct AttackProfile {
    AttackKind kind = AttackKind::kNone;
    double start_epoch = 0.0;
    double rate = 0.0;           // ramp slope [s/s]
    double target_offset = 0.0;  // step size / ramp clamp / pull-off asymptote [s]
    double smoothness = 60.0;    // pull-off time constant [s]

    void validate() const;
};

AttackKind attack_kind_from_string(const std::string& name);
std::string attack_kind_name(AttackKind kind);

// Named attack presets shaped after the time-focused TEXBAT scenarios:
// "ds2-like" (ramp, 200 ns/s from epoch 100, clamped at 2 us) and
// "ds3-like" (smooth pull-off to 2 us, 60 s time constant). Parameterized
// approximations, not replays.
AttackProfile attack_preset(const std::string& name);

PhaseTrajectory apply_attack(const PhaseTrajectory& truth,
                             const AttackProfile& profile);

struct EnsembleOptions {
    bool enabled = false;
    std::size_t n = 4;
    std::string member_profile = "ocxo-ref";
    std::size_t pivot = 0;
    double meas_sigma = 1e-12;  // intra-ensemble phase-diff noise [s]
    double kp = 0.1;
    double ki = 0.005;
    double slew_limit = 1e-6;
};

struct ScenarioConfig {
    ClockTruth rx;             // GNSS receiver clock
    ClockTruth ref;            // local reference (single-clock mode)
    MeterConfig meter;
    NoiseSpec filter_q;        // process noise seen by the tracker
    double filter_r = 0.0;     // 0 = derive from meter
    DetectorConfig detector;
    AttackProfile attack;
    EnsembleOptions ensemble;
    double duration = 10000.0;
    double dt = 1.0;
    std::uint64_t seed = 0;

    static ScenarioConfig from_config(const Config& cfg);
    Config echo() const;
    void validate() const;
};

struct ScenarioRecord {
    double epoch = 0.0;
    double truth_offset = 0.0;     // rx - ref, no attack
    double attacked_offset = 0.0;  // what the meter observes (pre-meter)
    double measured = 0.0;         // unwrapped measured offset
    bool valid = true;
    FilterTraceRow filter;
    Verdict verdict;
};

struct ScenarioResult {
    std::vector<ScenarioRecord> records;
    DetectionMetrics summary;
    std::string config_echo;
    std::uint64_t seed = 0;
    int meter_drift_sign = 0;
    bool alarm_raised = false;
    // populated when the ensemble reference is active
    std::vector<FilterTraceRow> ensemble_trace;  // reserved
    std::vector<double> steer_control;
    std::vector<double> steer_error;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg);

std::string summary_text(const ScenarioResult& result);

// Run filter + detector over ingested samples (no simulation).
struct TraceAnalysis {
    std::vector<FilterTraceRow> trace;
    std::vector<Verdict> verdicts;
    bool alarm_raised = false;
};
TraceAnalysis analyze_trace(const std::vector<PhaseSample>& samples,
                            const NoiseSpec& q, double r,
                            const DetectorConfig& detector,
                            double wrap_interval = 1.0);

struct SweepRow {
    std::string value;
    std::uint64_t seed = 0;
    DetectionMetrics summary;
    bool alarm_raised = false;
};

// One run per axis value; run i uses seed base_seed + i. Runs execute in
// parallel; rows come back in axis order.
std::vector<SweepRow> sweep(const Config& base, const std::string& axis,
                            const std::vector<std::string>& values);

// Plot-ready emission: <prefix>_rx_phase.csv (spoofed receiver phase),
// <prefix>_phase_diff.csv (measured difference vs reference) and matching
// SVG charts with alarm markers.
void emit_plots(const ScenarioResult& result, const std::string& prefix,
                bool svg = true);

// Standalone ensemble run used by the ensemble-demo subcommand.
struct EnsembleDemoResult {
    std::vector<double> epochs;
    std::vector<std::vector<double>> member_truth;  // per member
    std::vector<double> timescale;        // realized ensemble time [s]
    std::vector<double> steered_phase;    // steered VCOCXO phase [s]
    std::vector<double> steer_error;
    std::vector<double> steer_control;
    Eigen::VectorXd final_weights;
};
EnsembleDemoResult run_ensemble_demo(const EnsembleOptions& opts,
                                     double duration, double dt,
                                     std::uint64_t seed);

}  // namespace clockwatch
