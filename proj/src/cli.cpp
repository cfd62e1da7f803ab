#include "lossforge/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lossforge/circle_fit.hpp"
#include "lossforge/constants.hpp"
#include "lossforge/errors.hpp"
#include "lossforge/io.hpp"
#include "lossforge/loss_extraction.hpp"
#include "lossforge/manifest.hpp"
#include "lossforge/parallel.hpp"
#include "lossforge/photon.hpp"
#include "lossforge/prediction.hpp"
#include "lossforge/sensitivity.hpp"
#include "lossforge/svg.hpp"
#include "lossforge/sweep_plan.hpp"
#include "lossforge/synth.hpp"
#include "lossforge/tls_model.hpp"

namespace lossforge::cli {

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
    fs::path out = ".";
    unsigned jobs = 1;
    bool plot = false;
};

void emit_manifest(const GlobalOptions& global, const std::string& command,
                   const std::vector<fs::path>& inputs) {
    RunManifest manifest;
    manifest.command = command;
    manifest.config_digest = fnv1a_hex(command);
    for (const auto& p : inputs) manifest.input_digests.emplace_back(p.string(), file_digest(p));
    write_manifest(global.out, manifest);
}

std::string join_args(int argc, const char* const* argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

double qc_real_part(const HangerFit& fit) {
    return fit.params.q_coupling_mag / std::cos(fit.params.phi);
}

void print_fit(const HangerFit& fit, const ValueSigma& q_int, const std::string& label) {
    std::printf("fit%s%s\n", label.empty() ? "" : " ", label.c_str());
    std::printf("  fr        %.9e Hz   (sigma %.3e)\n", fit.params.fr_hz, fit.sigma.fr_hz);
    std::printf("  Q_loaded  %.6e      (sigma %.3e)\n", fit.params.q_loaded, fit.sigma.q_loaded);
    std::printf("  |Q_c|     %.6e      (sigma %.3e)\n", fit.params.q_coupling_mag,
                fit.sigma.q_coupling_mag);
    std::printf("  phi       %+.6f rad  (sigma %.3e)\n", fit.params.phi, fit.sigma.phi);
    std::printf("  a         %.6e      (sigma %.3e)\n", fit.params.amplitude_a,
                fit.sigma.amplitude_a);
    std::printf("  alpha     %+.6f rad  (sigma %.3e)\n", fit.params.alpha, fit.sigma.alpha);
    std::printf("  tau       %.6e s    (sigma %.3e)\n", fit.params.tau_s, fit.sigma.tau_s);
    std::printf("  Q_int     %.6e      (sigma %.3e)\n", q_int.value, q_int.sigma);
}

void plot_fit(const GlobalOptions& global, const FrequencyTrace& trace, const HangerFit& fit,
              const std::string& stem) {
    const FrequencyTrace corrected = remove_delay(trace, fit.params.tau_s);
    std::vector<std::complex<double>> data;
    for (const auto& p : corrected.points()) data.push_back(p.s21);
    HangerParams no_delay = fit.params;
    no_delay.tau_s = 0.0;
    std::vector<std::complex<double>> model;
    svg::Series phase_data{"data", {}, {}, "#1f77b4", false, true};
    svg::Series phase_model{"fit", {}, {}, "#d62728", true, false};
    const double f0 = trace.min_frequency();
    const double f1 = trace.max_frequency();
    for (int i = 0; i < 400; ++i) {
        const double f = f0 + (f1 - f0) * i / 399.0;
        const auto z = hanger_s21(no_delay, f);
        model.push_back(z);
        phase_model.x.push_back(f);
        phase_model.y.push_back(std::arg(z));
    }
    for (const auto& p : corrected.points()) {
        phase_data.x.push_back(p.frequency_hz);
        phase_data.y.push_back(std::arg(p.s21));
    }
    svg::write_complex_plane(global.out / (stem + "_circle.svg"), "delay-corrected S21", data,
                             model);
    svg::ChartSpec spec;
    spec.title = "S21 phase";
    spec.xlabel = "frequency [Hz]";
    spec.ylabel = "arg S21 [rad]";
    svg::write_chart(global.out / (stem + "_phase.svg"), spec, {phase_data, phase_model});
}

// --- fit ---------------------------------------------------------------

struct FitArgs {
    std::string trace_path;
    std::string budget_path;
};

int run_fit(const GlobalOptions& global, const FitArgs& args, const std::string& cmdline) {
    std::optional<LineBudget> budget;
    std::vector<fs::path> inputs{args.trace_path};
    if (!args.budget_path.empty()) {
        budget = io::read_line_budget(args.budget_path);
        inputs.push_back(args.budget_path);
    }
    const FrequencyTrace trace =
        io::read_trace_with_meta(args.trace_path, budget ? &*budget : nullptr);
    const HangerFit fit = fit_hanger(trace);
    const ValueSigma q_int = internal_q(fit);
    print_fit(fit, q_int, trace.label());
    io::write_fit_report(global.out / "fit_report.json", fit, q_int, trace);
    if (global.plot) plot_fit(global, trace, fit, "fit");
    emit_manifest(global, cmdline, inputs);
    return 0;
}

// --- power-sweep -------------------------------------------------------

struct PowerSweepArgs {
    std::string directory;
    std::string budget_path;
};

int run_power_sweep(const GlobalOptions& global, const PowerSweepArgs& args,
                    const std::string& cmdline) {
    std::vector<fs::path> csvs;
    for (const auto& entry : fs::directory_iterator(args.directory))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            csvs.push_back(entry.path());
    std::sort(csvs.begin(), csvs.end());
    if (csvs.empty())
        fail_validation("sweep-empty", "no .csv traces in '" + args.directory + "'");

    std::optional<LineBudget> budget;
    fs::path budget_path = args.budget_path;
    if (budget_path.empty() && fs::exists(fs::path(args.directory) / "line_budget.json"))
        budget_path = fs::path(args.directory) / "line_budget.json";
    if (!budget_path.empty()) budget = io::read_line_budget(budget_path);

    struct Row {
        std::string mode;
        double power_w = 0.0;
        double nbar = 0.0;
        double nbar_sigma = 0.0;
        ValueSigma q_int;
    };
    std::vector<Row> rows(csvs.size());
    parallel_for(csvs.size(), global.jobs, [&](std::size_t i) {
        const FrequencyTrace trace =
            io::read_trace_with_meta(csvs[i], budget ? &*budget : nullptr);
        if (!trace.drive_power_w())
            fail_validation("sweep-no-power",
                            csvs[i].string() + ": sidecar must provide power_dbm_at_vna");
        const HangerFit fit = fit_hanger(trace);
        Row row;
        row.mode = trace.label().empty() ? csvs[i].stem().string() : trace.label();
        row.power_w = *trace.drive_power_w();
        row.nbar = mean_photon_number(row.power_w, fit.params.fr_hz, fit.params.fr_hz,
                                      fit.params.q_loaded, qc_real_part(fit));
        row.nbar_sigma =
            row.nbar *
            std::sqrt(std::pow(2.0 * fit.sigma.q_loaded / fit.params.q_loaded, 2) +
                      std::pow(fit.sigma.q_coupling_mag / fit.params.q_coupling_mag, 2));
        row.q_int = internal_q(fit);
        rows[i] = row;
    });

    std::map<std::string, std::vector<TlsDataPoint>> points;
    for (const auto& row : rows)
        points[row.mode].push_back({row.nbar, row.q_int.value, row.q_int.sigma, row.nbar_sigma});
    std::map<std::string, TlsFit> fits;
    for (auto& [mode, pts] : points) {
        std::sort(pts.begin(), pts.end(),
                  [](const TlsDataPoint& a, const TlsDataPoint& b) { return a.nbar < b.nbar; });
        try {
            fits[mode] = fit_tls(pts);
        } catch (const Error& e) {
            throw Error(e.kind(), e.code(), "mode '" + mode + "': " + e.what());
        }
    }

    std::printf("%-10s %-14s %-14s %-14s %-8s\n", "mode", "1/Q0", "amplitude", "n_critical",
                "beta");
    for (const auto& [mode, fit] : fits) {
        std::printf("%-10s %-14.5e %-14.5e %-14.5e %-8.4f\n", mode.c_str(), fit.params.q0_inv,
                    fit.params.tls_amplitude, fit.params.n_critical, fit.params.beta);
        const ValueSigma single = q_int_at(fit, 1.0);
        std::printf("           Q_int(nbar=1) = %.5e +- %.2e\n", single.value, single.sigma);
    }
    io::write_tls_report(global.out / "tls_report.json", fits, points);

    // Single-photon mode table, directly consumable by `lossforge extract`.
    std::vector<ModeRecord> singles;
    for (const auto& [mode, fit] : fits) {
        const ValueSigma q = q_int_at(fit, 1.0);
        singles.push_back({mode, 0.0, q.value, q.sigma, 1.0});
    }
    io::write_modes_csv(global.out / "single_photon_modes.csv", singles);

    if (global.plot) {
        std::vector<svg::Series> series;
        const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
        int idx = 0;
        for (const auto& [mode, pts] : points) {
            svg::Series s{mode, {}, {}, palette[idx % 5], false, true};
            for (const auto& p : pts) {
                s.x.push_back(p.nbar);
                s.y.push_back(p.q_int);
            }
            svg::Series curve{mode + " fit", {}, {}, palette[idx % 5], true, false};
            const double lo = std::log10(pts.front().nbar);
            const double hi = std::log10(pts.back().nbar);
            for (int i = 0; i < 200; ++i) {
                const double n = std::pow(10.0, lo + (hi - lo) * i / 199.0);
                curve.x.push_back(n);
                curve.y.push_back(q_int_at(fits.at(mode), n).value);
            }
            series.push_back(s);
            series.push_back(curve);
            ++idx;
        }
        svg::ChartSpec spec;
        spec.title = "Q_int vs photon number";
        spec.xlabel = "nbar";
        spec.ylabel = "Q_int";
        spec.logx = true;
        spec.logy = true;
        svg::write_chart(global.out / "qint_vs_nbar.svg", spec, series);
    }

    std::vector<fs::path> inputs = csvs;
    if (!budget_path.empty()) inputs.push_back(budget_path);
    emit_manifest(global, cmdline, inputs);
    return 0;
}

// --- extract / budget ----------------------------------------------------

struct ExtractArgs {
    std::string participations;
    std::string modes;
    std::string fixed;
};

void print_budget(const LossBudget& bud) {
    std::printf("%-8s", "mode");
    for (const auto& c : bud.channel_ids) std::printf(" %12s", c.c_str());
    std::printf(" %14s\n", "1/Q total");
    for (std::size_t m = 0; m < bud.mode_ids.size(); ++m) {
        std::printf("%-8s", bud.mode_ids[m].c_str());
        for (std::size_t c = 0; c < bud.channel_ids.size(); ++c)
            std::printf(" %11.1f%%", 100.0 * bud.fraction[m][c]);
        std::printf(" %14.4e\n", bud.total_inverse_q[m]);
    }
}

void plot_budget(const GlobalOptions& global, const LossBudget& bud, const std::string& stem) {
    std::vector<svg::Series> series;
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                             "#8c564b", "#e377c2", "#7f7f7f"};
    for (std::size_t c = 0; c < bud.channel_ids.size(); ++c) {
        svg::Series s{bud.channel_ids[c], {}, {}, palette[c % 8], true, true};
        for (std::size_t m = 0; m < bud.mode_ids.size(); ++m) {
            s.x.push_back(static_cast<double>(m));
            s.y.push_back(bud.fraction[m][c]);
        }
        series.push_back(s);
    }
    svg::ChartSpec spec;
    spec.title = "loss budget (fraction per mode)";
    spec.xlabel = "mode index";
    spec.ylabel = "fraction of 1/Q";
    svg::write_chart(global.out / (stem + "_budget.svg"), spec, series);
}

int run_extract(const GlobalOptions& global, const ExtractArgs& args,
                const std::string& cmdline) {
    const ParticipationMatrix matrix = io::read_participation(args.participations);
    const std::vector<ModeRecord> modes = io::read_modes_csv(args.modes, matrix);
    std::map<std::string, ChannelLoss> fixed;
    std::vector<fs::path> inputs{args.participations, args.modes};
    if (!args.fixed.empty()) {
        fixed = io::read_channel_losses(args.fixed);
        inputs.push_back(args.fixed);
    }
    const LossFactorSet factors = extract(matrix, modes, fixed);
    const LossBudget bud = budget(matrix, factors);

    std::printf("%-12s %-14s %-12s %s\n", "channel", "value", "sigma", "notes");
    for (const auto& [id, est] : factors.factors) {
        std::string notes = est.fixed ? "fixed" : "extracted";
        if (est.consistent_with_zero) notes += ", consistent with zero";
        std::printf("%-12s %-14.5e %-12.3e %s\n", id.c_str(), est.loss.value, est.loss.sigma,
                    notes.c_str());
    }
    print_budget(bud);
    io::write_loss_report(global.out / "loss_report.json", factors, &bud);
    if (global.plot) plot_budget(global, bud, "extract");
    emit_manifest(global, cmdline, inputs);
    return 0;
}

struct BudgetArgs {
    std::string participations;
    std::string factors;
};

int run_budget(const GlobalOptions& global, const BudgetArgs& args, const std::string& cmdline) {
    const ParticipationMatrix matrix = io::read_participation(args.participations);
    const auto factors = io::read_channel_losses(args.factors);
    const LossBudget bud = budget(matrix, factors);
    print_budget(bud);
    LossFactorSet set;
    for (const auto& [id, loss] : factors) set.factors[id] = {loss, true, false};
    io::write_loss_report(global.out / "budget_report.json", set, &bud);
    if (global.plot) plot_budget(global, bud, "budget");
    emit_manifest(global, cmdline, {args.participations, args.factors});
    return 0;
}

// --- sensitivity ---------------------------------------------------------

struct SensitivityArgs {
    std::string participations;
    std::string fixed;
    std::string axes = "surf,bulk";
    double x_min = 1e-7, x_max = 1e-1;
    double y_min = 1e-10, y_max = 1e-4;
    int nx = 64, ny = 64;
    double meas_sigma = 0.10;
};

int run_sensitivity(const GlobalOptions& global, const SensitivityArgs& args,
                    const std::string& cmdline) {
    const ParticipationMatrix matrix = io::read_participation(args.participations);
    std::map<std::string, ChannelLoss> fixed;
    std::vector<fs::path> inputs{args.participations};
    if (!args.fixed.empty()) {
        fixed = io::read_channel_losses(args.fixed);
        inputs.push_back(args.fixed);
    }
    const auto comma = args.axes.find(',');
    if (comma == std::string::npos)
        fail_validation("sensitivity-bad-axes", "--axes expects 'channel_x,channel_y'");
    SensitivityGrid grid;
    grid.channel_x = args.axes.substr(0, comma);
    grid.channel_y = args.axes.substr(comma + 1);
    grid.x_min = args.x_min;
    grid.x_max = args.x_max;
    grid.y_min = args.y_min;
    grid.y_max = args.y_max;
    grid.nx = args.nx;
    grid.ny = args.ny;
    const SensitivityMap map = sensitivity_map(matrix, fixed, grid, args.meas_sigma);
    const double fx = map.floor_x();
    const double fy = map.floor_y();
    if (std::isfinite(fx))
        std::printf("resolvable floor %s: %.3e\n", grid.channel_x.c_str(), fx);
    else
        std::printf("resolvable floor %s: none\n", grid.channel_x.c_str());
    if (std::isfinite(fy))
        std::printf("resolvable floor %s: %.3e\n", grid.channel_y.c_str(), fy);
    else
        std::printf("resolvable floor %s: none\n", grid.channel_y.c_str());
    io::write_sensitivity_report(global.out / "sensitivity.json", map);
    if (global.plot) {
        svg::ChartSpec spec;
        spec.xlabel = grid.channel_x;
        spec.ylabel = grid.channel_y;
        spec.title = "fractional error: " + grid.channel_x;
        svg::write_heatmap(global.out / "sensitivity_x.svg", spec, map.x_values, map.y_values,
                           map.fractional_error_x, 1.0);
        spec.title = "fractional error: " + grid.channel_y;
        svg::write_heatmap(global.out / "sensitivity_y.svg", spec, map.x_values, map.y_values,
                           map.fractional_error_y, 1.0);
    }
    emit_manifest(global, cmdline, inputs);
    return 0;
}

// --- predict ---------------------------------------------------------------

struct PredictArgs {
    std::string participations;
    std::string library;
};

int run_predict(const GlobalOptions& global, const PredictArgs& args,
                const std::string& cmdline) {
    const ParticipationMatrix matrix = io::read_participation(args.participations);
    const auto library = io::read_channel_losses(args.library);
    const Prediction pred = predict(matrix, library);
    std::printf("%-10s %-12s %-12s %-12s %-12s\n", "mode", "f [GHz]", "Q_int", "sigma",
                "T1 [us]");
    for (const auto& m : pred.modes)
        std::printf("%-10s %-12.4f %-12.4e %-12.2e %-12.1f\n", m.mode_id.c_str(),
                    m.frequency_hz / 1e9, m.q_int, m.sigma_q, m.t1_s * 1e6);
    print_budget(pred.budget);
    io::write_prediction_report(global.out / "prediction.json", pred);
    if (global.plot) plot_budget(global, pred.budget, "prediction");
    emit_manifest(global, cmdline, {args.participations, args.library});
    return 0;
}

// --- plan-sweep -------------------------------------------------------------

struct PlanArgs {
    double center = 5e9;
    double span = 2e6;
    double weight = 5.0;
    int points = 101;
    std::string scheme = "phase-uniform";
};

int run_plan(const GlobalOptions& global, const PlanArgs& args, const std::string& cmdline) {
    SweepPlan plan;
    const SweepScheme scheme = scheme_from_name(args.scheme);
    switch (scheme) {
        case SweepScheme::Linear: plan = plan_linear(args.center, args.span, args.points); break;
        case SweepScheme::Quadratic:
            plan = plan_quadratic(args.center, args.span, args.points);
            break;
        case SweepScheme::PhaseUniform:
            plan = plan_phase_uniform(args.center, args.span, args.weight, args.points);
            break;
    }
    std::printf("%s plan: %zu points, %.6e .. %.6e Hz\n", scheme_name(scheme).c_str(),
                plan.points_hz.size(), plan.points_hz.front(), plan.points_hz.back());
    io::write_plan_csv(global.out / "plan.csv", plan);
    io::write_vna_segments(global.out / "plan_segments.csv", plan);
    emit_manifest(global, cmdline, {});
    return 0;
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
    std::string truth;
    std::string participations;
    std::vector<double> powers_dbm;
};

int run_simulate(const GlobalOptions& global, const SimulateArgs& args,
                 const std::string& cmdline) {
    const synth::GroundTruth truth = io::read_ground_truth(args.truth);
    std::vector<fs::path> inputs{args.truth};
    if (!args.participations.empty()) {
        const ParticipationMatrix matrix = io::read_participation(args.participations);
        inputs.push_back(args.participations);
        if (args.powers_dbm.empty())
            fail_validation("simulate-no-powers", "--powers is required with --participations");
        const auto dataset = synth::generate_dataset(truth, args.powers_dbm, matrix);
        for (const auto& entry : dataset) {
            char name[128];
            std::snprintf(name, sizeof(name), "%s_%+07.2fdBm.csv", entry.mode_id.c_str(),
                          entry.power_dbm);
            const fs::path path = global.out / name;
            io::write_trace_csv(path, entry.trace);
            io::TraceMeta meta;
            meta.label = entry.mode_id;
            meta.power_dbm_at_vna = entry.power_dbm; // already at device
            meta.line_attenuation_db = 0.0;
            io::write_trace_sidecar(io::sidecar_path_for(path), meta);
        }
        std::printf("wrote %zu traces to %s\n", dataset.size(), global.out.string().c_str());
    } else {
        // Single-trace mode: one noiseless-plan trace per ground-truth mode.
        for (const auto& mode : truth.modes) {
            const double ql = mode.hanger.q_loaded > 0.0
                                  ? mode.hanger.q_loaded
                                  : 1.0 / tls_inverse_q(mode.tls, 1.0);
            HangerParams params = mode.hanger;
            params.q_loaded = ql;
            const SweepPlan plan =
                plan_phase_uniform(params.fr_hz, truth.span_linewidths * params.fr_hz / ql,
                                   truth.span_linewidths, truth.points_per_trace);
            const FrequencyTrace trace = synth::generate_trace(
                params, plan, truth.noise_sigma,
                synth::derive_seed(truth.seed, &mode - truth.modes.data(), 0), std::nullopt,
                mode.id);
            const fs::path path = global.out / (mode.id + ".csv");
            io::write_trace_csv(path, trace);
            io::TraceMeta meta;
            meta.label = mode.id;
            io::write_trace_sidecar(io::sidecar_path_for(path), meta);
        }
        std::printf("wrote %zu traces to %s\n", truth.modes.size(),
                    global.out.string().c_str());
    }
    emit_manifest(global, cmdline, inputs);
    return 0;
}

} // namespace

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"lossforge: resonator loss characterization and coherence prediction"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(0, 1);

    GlobalOptions global;
    app.add_option("--out", global.out, "output directory")->capture_default_str();
    app.add_option("--jobs", global.jobs, "worker threads for batch commands")
        ->capture_default_str();
    app.add_flag("--plot", global.plot, "emit SVG diagnostic plots");

    FitArgs fit_args;
    auto* cmd_fit = app.add_subcommand("fit", "fit one S21 trace");
    cmd_fit->add_option("trace", fit_args.trace_path, "trace CSV")->required();
    cmd_fit->add_option("--budget", fit_args.budget_path, "line budget JSON");

    PowerSweepArgs sweep_args;
    auto* cmd_sweep = app.add_subcommand("power-sweep", "fit a directory of traces and the TLS model");
    cmd_sweep->add_option("dir", sweep_args.directory, "directory of trace CSVs")->required();
    cmd_sweep->add_option("--budget", sweep_args.budget_path, "line budget JSON");

    ExtractArgs extract_args;
    auto* cmd_extract = app.add_subcommand("extract", "solve for intrinsic loss factors");
    cmd_extract->add_option("--participations", extract_args.participations)->required();
    cmd_extract->add_option("--modes", extract_args.modes, "mode Q table CSV")->required();
    cmd_extract->add_option("--fixed", extract_args.fixed, "fixed channel losses JSON");

    BudgetArgs budget_args;
    auto* cmd_budget = app.add_subcommand("budget", "loss budget from known factors");
    cmd_budget->add_option("--participations", budget_args.participations)->required();
    cmd_budget->add_option("--factors", budget_args.factors)->required();

    SensitivityArgs sens_args;
    auto* cmd_sens = app.add_subcommand("sensitivity", "measurement sensitivity map");
    cmd_sens->add_option("--participations", sens_args.participations)->required();
    cmd_sens->add_option("--fixed", sens_args.fixed, "fixed channel losses JSON");
    cmd_sens->add_option("--axes", sens_args.axes, "two channels, e.g. surf,bulk")
        ->capture_default_str();
    cmd_sens->add_option("--x-min", sens_args.x_min)->capture_default_str();
    cmd_sens->add_option("--x-max", sens_args.x_max)->capture_default_str();
    cmd_sens->add_option("--y-min", sens_args.y_min)->capture_default_str();
    cmd_sens->add_option("--y-max", sens_args.y_max)->capture_default_str();
    cmd_sens->add_option("--nx", sens_args.nx)->capture_default_str();
    cmd_sens->add_option("--ny", sens_args.ny)->capture_default_str();
    cmd_sens->add_option("--meas-sigma", sens_args.meas_sigma,
                         "fractional measurement error on each mode's loss")
        ->capture_default_str();

    PredictArgs predict_args;
    auto* cmd_predict = app.add_subcommand("predict", "forward-predict Q_int and T1");
    cmd_predict->add_option("--participations", predict_args.participations)->required();
    cmd_predict->add_option("--library", predict_args.library, "loss factor library JSON")
        ->required();

    PlanArgs plan_args;
    auto* cmd_plan = app.add_subcommand("plan-sweep", "generate a measurement frequency plan");
    cmd_plan->add_option("--center", plan_args.center)->capture_default_str();
    cmd_plan->add_option("--span", plan_args.span)->capture_default_str();
    cmd_plan->add_option("--weight", plan_args.weight)->capture_default_str();
    cmd_plan->add_option("--points", plan_args.points)->capture_default_str();
    cmd_plan->add_option("--scheme", plan_args.scheme, "linear | quadratic | phase-uniform")
        ->capture_default_str();

    SimulateArgs sim_args;
    auto* cmd_sim = app.add_subcommand("simulate", "generate synthetic datasets");
    cmd_sim->add_option("--truth", sim_args.truth, "ground truth JSON")->required();
    cmd_sim->add_option("--participations", sim_args.participations);
    cmd_sim->add_option("--powers", sim_args.powers_dbm, "drive powers (dBm at device)")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    const std::string cmdline = join_args(argc, argv);
    try {
        if (cmd_fit->parsed()) return run_fit(global, fit_args, cmdline);
        if (cmd_sweep->parsed()) return run_power_sweep(global, sweep_args, cmdline);
        if (cmd_extract->parsed()) return run_extract(global, extract_args, cmdline);
        if (cmd_budget->parsed()) return run_budget(global, budget_args, cmdline);
        if (cmd_sens->parsed()) return run_sensitivity(global, sens_args, cmdline);
        if (cmd_predict->parsed()) return run_predict(global, predict_args, cmdline);
        if (cmd_plan->parsed()) return run_plan(global, plan_args, cmdline);
        if (cmd_sim->parsed()) return run_simulate(global, sim_args, cmdline);
        std::cout << app.help();
        return 64;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::Validation ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace lossforge::cli
