#include "clockwatch/detect.hpp"

#include <cmath>
#include <stdexcept>

#include "clockwatch/clock_filter.hpp"

namespace clockwatch {

void DetectorConfig::validate() const {
    if (!(nis_gate > 0.0) || !(phase_limit > 0.0) || !(drift_margin > 0.0))
        throw std::invalid_argument("DetectorConfig: thresholds must be > 0");
    if (drift_floor < 0.0)
        throw std::invalid_argument("DetectorConfig: drift_floor < 0");
    if (nis_k == 0 || nis_k > nis_n)
        throw std::invalid_argument("DetectorConfig: need 1 <= nis_k <= nis_n");
}

std::string level_name(AlertLevel level) {
    switch (level) {
        case AlertLevel::kNominal: return "NOMINAL";
        case AlertLevel::kSuspect: return "SUSPECT";
        case AlertLevel::kAlarm: return "ALARM";
    }
    return "?";
}

std::string trigger_names(unsigned triggers) {
    std::string s;
    auto add = [&s](const char* name) {
        if (!s.empty()) s += '+';
        s += name;
    };
    if (triggers & kTriggerNisWindow) add("NIS_WINDOW");
    if (triggers & kTriggerPhaseLimit) add("PHASE_LIMIT");
    if (triggers & kTriggerDriftRate) add("DRIFT_RATE");
    if (triggers & kTriggerWrapAmbiguous) add("WRAP_AMBIGUOUS");
    if (s.empty()) s = "-";
    return s;
}

Detector::Detector(const DetectorConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

Verdict Detector::step(const FilterOutputs& in) {
    if (started_ && !(in.epoch > last_epoch_))
        throw std::invalid_argument("detector: epochs must strictly increase");
    if (!started_) {
        started_ = true;
        start_epoch_ = in.epoch;
    }
    last_epoch_ = in.epoch;

    Verdict v;
    v.epoch = in.epoch;

    const double nis_val = nis(in.innovation, in.innovation_var);
    const bool nis_exceed = nis_val > cfg_.nis_gate;
    nis_window_.push_back(nis_exceed);
    if (nis_window_.size() > cfg_.nis_n) nis_window_.pop_front();
    std::size_t exceed_count = 0;
    for (bool b : nis_window_) exceed_count += b ? 1 : 0;

    const double envelope = cfg_.compensate_drift_envelope
        ? cfg_.drift_floor * (in.epoch - start_epoch_) : 0.0;
    const double phase_excess = std::abs(in.x_phase) - envelope;
    const bool phase_exceed = phase_excess >= cfg_.phase_limit;

    const double drift_threshold = cfg_.drift_margin * cfg_.drift_floor;
    const bool drift_exceed =
        drift_threshold > 0.0 && std::abs(in.x_freq) >= drift_threshold;
    drift_run_ = drift_exceed ? drift_run_ + 1 : 0;

    bool confirmed = false;
    if (exceed_count >= cfg_.nis_k) {
        v.triggers |= kTriggerNisWindow;
        v.evidence = nis_val;
        confirmed = true;
    }
    if (phase_exceed) {
        // hard application bound: immediate alarm
        v.triggers |= kTriggerPhaseLimit;
        v.evidence = std::abs(in.x_phase);
        confirmed = true;
    }
    if (drift_run_ >= cfg_.nis_n) {
        v.triggers |= kTriggerDriftRate;
        v.evidence = std::abs(in.x_freq);
        confirmed = true;
    }
    if (in.wrap_ambiguous) {
        v.triggers |= kTriggerWrapAmbiguous;
        confirmed = true;
    }

    const bool suspect = nis_exceed || phase_exceed || drift_exceed;

    if (confirmed) {
        alarmed_ = true;
        alarm_age_ = 0;
    } else if (alarmed_) {
        if (alarm_age_ < cfg_.hold_epochs) ++alarm_age_;
        if (alarm_age_ >= cfg_.hold_epochs) alarmed_ = false;
    }

    if (alarmed_) v.level = AlertLevel::kAlarm;
    else if (suspect) v.level = AlertLevel::kSuspect;
    else v.level = AlertLevel::kNominal;
    if (v.level == AlertLevel::kAlarm && v.triggers == 0 && suspect)
        v.evidence = nis_val;
    return v;
}

DetectionMetrics metrics(const std::vector<Verdict>& verdicts,
                         const std::vector<double>& est_phase,
                         bool attack_present, double attack_start) {
    DetectionMetrics m;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const auto& v = verdicts[i];
        const bool pre = !attack_present || v.epoch < attack_start;
        if (v.level == AlertLevel::kAlarm) {
            if (pre) {
                ++m.false_alarm_epochs;
            } else if (!m.detected) {
                m.detected = true;
                m.latency = v.epoch - attack_start;
                if (i < est_phase.size()) m.offset_at_detection = est_phase[i];
            }
        }
    }
    m.missed = attack_present && !m.detected;
    return m;
}

DetectorConfig calibrate_floor(const MeterConfig& meter, const NoiseSpec& q,
                               double r) {
    DetectorConfig cfg;
    const double floor = meter_floor(meter);
    if (floor > 0.0) {
        cfg.drift_floor = floor;
        return cfg;
    }
    // Ideal meter: bound by the filter's own frequency-estimate scatter.
    // Steady-state posterior frequency variance from a short synthetic run.
    FilterState st;
    st.q = q;
    st.r = r > 0.0 ? r : meter_measurement_variance(meter);
    st.P = default_initial_covariance();
    for (int k = 1; k <= 500; ++k) {
        PhaseSample s;
        s.epoch = double(k);
        s.offset = 0.0;
        st = update(st, s).state;
    }
    cfg.drift_floor = 3.0 * std::sqrt(st.P(1, 1));
    return cfg;
}

}  // namespace clockwatch
