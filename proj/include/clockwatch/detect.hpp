#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "clockwatch/clock_sim.hpp"
#include "clockwatch/phase_meter.hpp"

namespace clockwatch {

struct DetectorConfig {
    double nis_gate = 3.84;       // chi-square(1) 95% gate
    std::size_t nis_k = 8;        // k-of-n window confirmation
    std::size_t nis_n = 10;
    double phase_limit = 25.6e-6; // application phase bound [s]
    double drift_floor = 9e-8;    // minimum credible adversarial drift [s/s]
    double drift_margin = 1.5;    // multiplier over the floor
    // Epochs before ALARM clears; default latching (effectively infinite).
    std::size_t hold_epochs = std::numeric_limits<std::size_t>::max();
    // Subtract the meter drift envelope (drift_floor * elapsed) from the
    // phase-limit test. The meter's own drift accumulates in nominal
    // operation, so an uncompensated absolute bound would trip on any long
    // clean run; adversarial motion below the envelope is undetectable by
    // construction of the meter floor.
    bool compensate_drift_envelope = true;

    void validate() const;
};

enum class AlertLevel { kNominal, kSuspect, kAlarm };

enum Trigger : unsigned {
    kTriggerNisWindow = 1u << 0,
    kTriggerPhaseLimit = 1u << 1,
    kTriggerDriftRate = 1u << 2,
    kTriggerWrapAmbiguous = 1u << 3,
};

struct Verdict {
    double epoch = 0.0;
    AlertLevel level = AlertLevel::kNominal;
    unsigned triggers = 0;
    double evidence = 0.0;  // trigger-specific scalar (NIS, phase, drift)
};

std::string level_name(AlertLevel level);
std::string trigger_names(unsigned triggers);

// Per-epoch filter outputs fed to the detector.
struct FilterOutputs {
    double epoch = 0.0;
    double x_phase = 0.0;
    double x_freq = 0.0;
    double x_drift = 0.0;
    double innovation = 0.0;
    double innovation_var = 0.0;
    bool wrap_ambiguous = false;
};

class Detector {
public:
    explicit Detector(const DetectorConfig& cfg);

    Verdict step(const FilterOutputs& in);
    const DetectorConfig& config() const { return cfg_; }

private:
    DetectorConfig cfg_;
    std::deque<bool> nis_window_;
    std::size_t drift_run_ = 0;   // consecutive epochs above drift threshold
    std::size_t alarm_age_ = 0;
    bool alarmed_ = false;
    bool started_ = false;
    double start_epoch_ = 0.0;
    double last_epoch_ = 0.0;
};

struct AttackProfile;  // scenario module

struct DetectionMetrics {
    std::size_t false_alarm_epochs = 0;  // ALARM epochs before attack start
    bool detected = false;
    bool missed = false;                 // attack present, never alarmed
    double latency = -1.0;               // s from attack start to first ALARM
    double offset_at_detection = 0.0;    // estimated phase at first ALARM [s]
};

DetectionMetrics metrics(const std::vector<Verdict>& verdicts,
                         const std::vector<double>& est_phase,
                         bool attack_present, double attack_start);

// Detector defaults wired to a meter: drift_floor = meter_floor, or a
// Monte-Carlo 3-sigma of nominal frequency-estimate scatter when the meter
// is ideal (zero drift).
DetectorConfig calibrate_floor(const MeterConfig& meter, const NoiseSpec& q,
                               double r);

}  // namespace clockwatch
