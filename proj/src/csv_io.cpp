#include "clockwatch/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace clockwatch {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    return out;
}

double parse_double_field(const std::string& s, const std::string& path,
                          std::size_t lineno) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": malformed number '" + s + "'");
    }
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const PhaseTrajectory& t) {
    out << "epoch_s,phase_s\n";
    for (std::size_t k = 0; k < t.size(); ++k)
        out << format_double(t.epoch(k)) << ',' << format_double(t.samples[k])
            << '\n';
}

PhaseTrajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    std::getline(in, line);
    ++lineno;
    if (line != "epoch_s,phase_s")
        throw std::runtime_error(path + ": bad trajectory header");
    std::vector<double> epochs, phases;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv_row(line);
        if (f.size() != 2)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 2 fields");
        epochs.push_back(parse_double_field(f[0], path, lineno));
        phases.push_back(parse_double_field(f[1], path, lineno));
    }
    if (epochs.size() < 2)
        throw std::runtime_error(path + ": need at least 2 samples");
    PhaseTrajectory t;
    t.origin = epochs.front();
    t.dt = epochs[1] - epochs[0];
    if (!(t.dt > 0.0)) throw std::runtime_error(path + ": non-increasing epochs");
    t.samples = std::move(phases);
    return t;
}

void write_samples_csv(std::ostream& out, const std::vector<PhaseSample>& s) {
    out << "epoch_s,offset_s,valid,quantized\n";
    for (const auto& p : s)
        out << format_double(p.epoch) << ',' << format_double(p.offset) << ','
            << (p.valid ? '1' : '0') << ',' << (p.quantized ? '1' : '0')
            << '\n';
}

std::vector<PhaseSample> read_samples_csv(const std::string& path,
                                          double wrap_interval) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    std::getline(in, line);
    ++lineno;
    if (line != "epoch_s,offset_s,valid,quantized")
        throw std::runtime_error(path + ": bad samples header");
    std::vector<PhaseSample> out;
    double last_epoch = 0.0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv_row(line);
        if (f.size() != 4)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 4 fields");
        PhaseSample s;
        s.epoch = parse_double_field(f[0], path, lineno);
        s.offset = parse_double_field(f[1], path, lineno);
        s.valid = f[2] == "1";
        s.quantized = f[3] == "1";
        if (!f[2].empty() && f[2] != "0" && f[2] != "1")
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": bad boolean '" + f[2] + "'");
        if (!out.empty() && !(s.epoch > last_epoch))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": non-monotone epochs");
        if (s.valid && (s.offset < -wrap_interval / 2.0 ||
                        s.offset >= wrap_interval / 2.0))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": offset outside wrap range");
        last_epoch = s.epoch;
        out.push_back(s);
    }
    return out;
}

std::vector<PhaseSample> read_counter_log(const std::string& path,
                                          double wrap_interval) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    std::vector<PhaseSample> out;
    double last_epoch = 0.0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        // accept "epoch,interval" or whitespace separated
        for (char& c : line)
            if (c == '\t' || c == ';') c = ',';
        auto f = split_csv_row(line);
        if (f.size() == 1) {
            std::istringstream ws(line);
            std::string a, b;
            if (ws >> a >> b) f = {a, b};
        }
        if (f.size() < 2)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected epoch and interval");
        PhaseSample s;
        s.epoch = parse_double_field(f[0], path, lineno);
        // counter reports the measured interval; fold into a wrapped offset
        const double interval = parse_double_field(f[1], path, lineno);
        s.offset = wrap_phase(interval, wrap_interval);
        if (!out.empty() && !(s.epoch > last_epoch))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": non-monotone epochs");
        last_epoch = s.epoch;
        out.push_back(s);
    }
    return out;
}

void write_adev_csv(std::ostream& out, const std::vector<AdevPoint>& points) {
    out << "tau_s,adev,n_pairs\n";
    for (const auto& p : points)
        out << format_double(p.tau) << ',' << format_double(p.sigma_y) << ','
            << p.n_pairs << '\n';
}

void write_filter_trace_csv(std::ostream& out,
                            const std::vector<FilterTraceRow>& rows) {
    out << "epoch_s,x_hat_phase,x_hat_freq,x_hat_drift,innovation,"
           "innovation_var,nis\n";
    for (const auto& r : rows)
        out << format_double(r.epoch) << ',' << format_double(r.x_phase) << ','
            << format_double(r.x_freq) << ',' << format_double(r.x_drift) << ','
            << format_double(r.innovation) << ','
            << format_double(r.innovation_var) << ',' << format_double(r.nis)
            << '\n';
}

void write_verdicts_csv(std::ostream& out, const std::vector<Verdict>& v) {
    out << "epoch_s,level,triggers,evidence\n";
    for (const auto& x : v)
        out << format_double(x.epoch) << ',' << level_name(x.level) << ','
            << trigger_names(x.triggers) << ',' << format_double(x.evidence)
            << '\n';
}

void write_svg_chart(std::ostream& out, const std::string& title,
                     const std::vector<double>& epochs,
                     const std::vector<double>& values,
                     const std::vector<double>& alarm_epochs) {
    const int w = 900, h = 400, margin = 50;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (!epochs.empty()) {
        xmin = epochs.front();
        xmax = epochs.back();
        ymin = ymax = values.front();
        for (double v : values) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) {
        return margin + (x - xmin) / (xmax - xmin) * (w - 2 * margin);
    };
    auto py = [&](double y) {
        return h - margin - (y - ymin) / (ymax - ymin) * (h - 2 * margin);
    };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << h << "\">\n";
    out << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\">"
        << title << "</text>\n";
    out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
        << (w - 2 * margin) << "\" height=\"" << (h - 2 * margin)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (!epochs.empty()) {
        out << "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
        for (std::size_t i = 0; i < epochs.size(); ++i)
            out << px(epochs[i]) << ',' << py(values[i]) << ' ';
        out << "\"/>\n";
    }
    for (double a : alarm_epochs)
        out << "<line x1=\"" << px(a) << "\" y1=\"" << margin << "\" x2=\""
            << px(a) << "\" y2=\"" << (h - margin)
            << "\" stroke=\"red\" stroke-dasharray=\"4 3\"/>\n";
    out << "</svg>\n";
}

}  // namespace clockwatch
