#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "clockwatch/clock_sim.hpp"
#include "clockwatch/detect.hpp"
#include "clockwatch/phase_meter.hpp"
#include "clockwatch/stability.hpp"

namespace clockwatch {

// All numeric CSV output uses %.17g: round-trips doubles exactly and keeps
// byte-identical reruns meaningful.
std::string format_double(double v);

void write_trajectory_csv(std::ostream& out, const PhaseTrajectory& t);
PhaseTrajectory read_trajectory_csv(const std::string& path);

void write_samples_csv(std::ostream& out, const std::vector<PhaseSample>& s);

// Ingest a PhaseSample CSV (header epoch_s,offset_s,valid,quantized).
// Validates monotone epochs and wrap range; malformed rows report their
// line number.
std::vector<PhaseSample> read_samples_csv(const std::string& path,
                                          double wrap_interval = 1.0);

// Adapter for two-column counter logs (epoch, measured interval): intervals
// are normalized into wrapped offsets.
std::vector<PhaseSample> read_counter_log(const std::string& path,
                                          double wrap_interval = 1.0);

void write_adev_csv(std::ostream& out, const std::vector<AdevPoint>& points);

struct FilterTraceRow {
    double epoch = 0.0;
    double x_phase = 0.0;
    double x_freq = 0.0;
    double x_drift = 0.0;
    double innovation = 0.0;
    double innovation_var = 0.0;
    double nis = 0.0;
};

void write_filter_trace_csv(std::ostream& out,
                            const std::vector<FilterTraceRow>& rows);

void write_verdicts_csv(std::ostream& out, const std::vector<Verdict>& v);

// Minimal self-contained SVG line chart; alarm epochs are marked when
// provided.
void write_svg_chart(std::ostream& out, const std::string& title,
                     const std::vector<double>& epochs,
                     const std::vector<double>& values,
                     const std::vector<double>& alarm_epochs);

}  // namespace clockwatch
