#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "clockwatch/clock_filter.hpp"
#include "clockwatch/csv_io.hpp"
#include "clockwatch/kernels.hpp"
#include "clockwatch/scenario.hpp"
#include "clockwatch/stability.hpp"

using namespace clockwatch;

namespace {

// exit codes: 0 nominal / no alarm, 1 error, 2 alarm raised
constexpr int kExitNominal = 0;
constexpr int kExitError = 1;
constexpr int kExitAlarm = 2;

Config load_config(const std::string& path) {
    Config cfg = path.empty() ? Config() : Config::parse_file(path);
    cfg.apply_env_overrides();
    return cfg;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(item);
    return out;
}

void write_records_csv(std::ostream& out, const ScenarioResult& r) {
    out << "epoch_s,truth_s,attacked_s,measured_s,valid,x_hat_phase,x_hat_freq,"
           "x_hat_drift,innovation,innovation_var,nis,level,triggers\n";
    for (const auto& rec : r.records) {
        out << format_double(rec.epoch) << ',' << format_double(rec.truth_offset)
            << ',' << format_double(rec.attacked_offset) << ','
            << format_double(rec.measured) << ',' << (rec.valid ? '1' : '0')
            << ',' << format_double(rec.filter.x_phase) << ','
            << format_double(rec.filter.x_freq) << ','
            << format_double(rec.filter.x_drift) << ','
            << format_double(rec.filter.innovation) << ','
            << format_double(rec.filter.innovation_var) << ','
            << format_double(rec.filter.nis) << ','
            << level_name(rec.verdict.level) << ','
            << trigger_names(rec.verdict.triggers) << '\n';
    }
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed,
                 const std::string& out_prefix, bool plots) {
    Config cfg = load_config(config_path);
    cfg.set("run.seed", std::to_string(seed));
    ScenarioConfig sc = ScenarioConfig::from_config(cfg);
    const ScenarioResult result = run_scenario(sc);

    if (!out_prefix.empty()) {
        std::ofstream rec(out_prefix + "_records.csv");
        write_records_csv(rec, result);
        std::ofstream sum(out_prefix + "_summary.txt");
        sum << summary_text(result);
        std::ofstream echo(out_prefix + "_config.txt");
        echo << result.config_echo;
        if (plots) emit_plots(result, out_prefix);
    }
    std::cout << summary_text(result);
    return result.alarm_raised ? kExitAlarm : kExitNominal;
}

int cmd_detect(const std::string& input, const std::string& format,
               const std::string& config_path, const std::string& out_prefix) {
    Config cfg = load_config(config_path);
    ScenarioConfig sc = ScenarioConfig::from_config(cfg);
    std::vector<PhaseSample> samples;
    if (format == "counter")
        samples = read_counter_log(input, sc.meter.wrap_interval);
    else
        samples = read_samples_csv(input, sc.meter.wrap_interval);

    const double r = sc.filter_r > 0.0 ? sc.filter_r
                                       : meter_measurement_variance(sc.meter);
    const TraceAnalysis ta =
        analyze_trace(samples, sc.filter_q, r, sc.detector,
                      sc.meter.wrap_interval);
    if (!out_prefix.empty()) {
        std::ofstream ft(out_prefix + "_filter.csv");
        write_filter_trace_csv(ft, ta.trace);
        std::ofstream vd(out_prefix + "_verdicts.csv");
        write_verdicts_csv(vd, ta.verdicts);
    }
    std::size_t alarms = 0;
    for (const auto& v : ta.verdicts)
        if (v.level == AlertLevel::kAlarm) ++alarms;
    std::cout << "epochs=" << ta.verdicts.size() << "\n"
              << "alarm_epochs=" << alarms << "\n"
              << "alarm_raised=" << (ta.alarm_raised ? 1 : 0) << "\n";
    return ta.alarm_raised ? kExitAlarm : kExitNominal;
}

int cmd_adev(const std::string& input, const std::string& profile,
             std::size_t n, std::uint64_t seed, const std::string& taus_arg,
             const std::string& out_path) {
    PhaseTrajectory traj;
    if (!input.empty()) {
        traj = read_trajectory_csv(input);
    } else {
        ClockTruth c = clock_profile(profile);
        c.seed = seed;
        traj = simulate_clock(c, double(n - 1), 1.0);
    }
    std::vector<double> taus;
    for (const auto& t : split_list(taus_arg)) taus.push_back(std::stod(t));
    const auto points = overlapping_adev(traj, taus);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        write_adev_csv(out, points);
    }
    write_adev_csv(std::cout, points);
    return kExitNominal;
}

int cmd_ensemble_demo(std::size_t n, double duration, std::uint64_t seed,
                      const std::string& profile, const std::string& out_prefix) {
    EnsembleOptions opts;
    opts.enabled = true;
    opts.n = n;
    opts.member_profile = profile;
    const EnsembleDemoResult demo = run_ensemble_demo(opts, duration, 1.0, seed);

    if (!out_prefix.empty()) {
        std::ofstream out(out_prefix + "_ensemble.csv");
        out << "epoch_s";
        for (std::size_t i = 0; i < n; ++i) out << ",member_" << i << "_phase";
        for (std::size_t i = 0; i < n; ++i) out << ",weight_" << i;
        out << ",steer_control,steer_error\n";
        for (std::size_t k = 0; k < demo.epochs.size(); ++k) {
            out << format_double(demo.epochs[k]);
            for (std::size_t i = 0; i < n; ++i)
                out << ',' << format_double(demo.member_truth[i][k]);
            for (std::size_t i = 0; i < n; ++i)
                out << ',' << format_double(demo.final_weights(
                                static_cast<Eigen::Index>(i)));
            out << ',' << format_double(demo.steer_control[k]) << ','
                << format_double(demo.steer_error[k]) << '\n';
        }
    }

    // stability comparison: members vs realized timescale
    const std::vector<double> taus = {1.0, 10.0, 100.0};
    PhaseTrajectory ts;
    ts.dt = 1.0;
    ts.samples = demo.timescale;
    const auto ens_adev = overlapping_adev(ts, taus);
    std::cout << "tau_s,ensemble_adev,member0_adev\n";
    PhaseTrajectory m0;
    m0.dt = 1.0;
    m0.samples = demo.member_truth[0];
    const auto mem_adev = overlapping_adev(m0, taus);
    for (std::size_t i = 0; i < ens_adev.size(); ++i)
        std::cout << format_double(ens_adev[i].tau) << ','
                  << format_double(ens_adev[i].sigma_y) << ','
                  << format_double(mem_adev[i].sigma_y) << '\n';
    return kExitNominal;
}

int cmd_sweep(const std::string& config_path, const std::string& axis,
              const std::string& values_arg, const std::string& out_path) {
    Config cfg = load_config(config_path);
    const auto values = split_list(values_arg);
    const auto rows = sweep(cfg, axis, values);
    std::ostringstream out;
    out << "value,seed,alarm_raised,detected,missed,latency_s,"
           "false_alarm_epochs\n";
    for (const auto& r : rows) {
        out << r.value << ',' << r.seed << ',' << (r.alarm_raised ? 1 : 0)
            << ',' << (r.summary.detected ? 1 : 0) << ','
            << (r.summary.missed ? 1 : 0) << ','
            << (r.summary.latency >= 0.0 ? format_double(r.summary.latency)
                                         : std::string("undetected"))
            << ',' << r.summary.false_alarm_epochs << '\n';
    }
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        f << out.str();
    }
    std::cout << out.str();
    return kExitNominal;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GNSS misbehavior detection with high-precision local clocks"};
    app.require_subcommand(1);

    std::string config_path, out_prefix, input, format = "pps";
    std::string taus = "1,10,100", profile = "ocxo-ref", axis, values, out_path;
    std::uint64_t seed = 0;
    std::size_t n_samples = 100000, n_members = 4;
    double duration = 10000.0;
    bool plots = false;

    auto* sim = app.add_subcommand("simulate", "Run a closed-loop scenario");
    sim->add_option("--config", config_path, "scenario config file");
    sim->add_option("--seed", seed, "RNG seed")->required();
    sim->add_option("--out", out_prefix, "output file prefix");
    sim->add_flag("--plots", plots, "emit plot-ready CSV/SVG");

    auto* det = app.add_subcommand("detect", "Filter + detect an ingested trace");
    det->add_option("--input", input, "phase-sample CSV or counter log")
        ->required();
    det->add_option("--format", format, "pps|counter (default pps)");
    det->add_option("--config", config_path, "filter/detector config file");
    det->add_option("--out", out_prefix, "output file prefix");

    auto* adv = app.add_subcommand("adev", "Overlapping Allan deviation");
    adv->add_option("--input", input, "trajectory CSV (epoch_s,phase_s)");
    adv->add_option("--profile", profile, "clock preset to simulate instead");
    adv->add_option("--n", n_samples, "samples when simulating");
    adv->add_option("--seed", seed, "RNG seed when simulating");
    adv->add_option("--taus", taus, "comma-separated taus [s]");
    adv->add_option("--out", out_path, "output CSV path");

    auto* ens = app.add_subcommand("ensemble-demo", "Clock ensemble demo");
    ens->add_option("--n", n_members, "member count");
    ens->add_option("--duration", duration, "simulated duration [s]");
    ens->add_option("--seed", seed, "RNG seed")->required();
    ens->add_option("--profile", profile, "member clock preset");
    ens->add_option("--out", out_prefix, "output file prefix");

    auto* swp = app.add_subcommand("sweep", "Parameter sweep");
    swp->add_option("--config", config_path, "base scenario config");
    swp->add_option("--axis", axis, "config key to sweep")->required();
    swp->add_option("--values", values, "comma-separated values")->required();
    swp->add_option("--out", out_path, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, seed, out_prefix, plots);
        if (det->parsed()) return cmd_detect(input, format, config_path, out_prefix);
        if (adv->parsed())
            return cmd_adev(input, profile, n_samples, seed, taus, out_path);
        if (ens->parsed())
            return cmd_ensemble_demo(n_members, duration, seed, profile,
                                     out_prefix);
        if (swp->parsed()) return cmd_sweep(config_path, axis, values, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
