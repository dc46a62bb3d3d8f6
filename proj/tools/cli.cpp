#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "polis/config.hpp"
#include "polis/diagnostics.hpp"
#include "polis/io.hpp"
#include "polis/runner.hpp"

namespace polis::cli {

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    int jobs = 0;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config,-c", c.config_path, "Experiment config (JSON, comments allowed, or a manifest)");
    cmd->add_option("--set,-s", c.overrides, "Dotted-path override key=value; repeatable")->take_all();
    cmd->add_option("--out,-o", c.out_dir, "Output directory (default: $" + std::string(kOutputDirEnv) +
                                              ", then run.output_dir)");
    cmd->add_option("--jobs,-j", c.jobs, "Worker threads (0: config, then hardware)")->check(CLI::NonNegativeNumber);
}

ExperimentConfig resolve_config(const Common& c) {
    ExperimentConfig cfg = c.config_path.empty() ? default_config() : load_config(c.config_path);
    for (const auto& o : c.overrides) {
        cfg = apply_override(cfg, o);
    }
    if (!c.out_dir.empty()) {
        cfg.run.output_dir = c.out_dir;
    } else if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
        cfg.run.output_dir = env;
    }
    return validate_config(std::move(cfg));
}

std::string opt_double(const std::optional<double>& v) {
    return v ? fmt::format("{:.4f}", *v) : std::string("-");
}

void print_table_header(std::ostream& out, const std::string& first) {
    out << fmt::format("{:<22} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n", first, "support", "std", "success",
                       "lockin", "lag_norm", "IC", "PD");
}

void print_table_row(std::ostream& out, const std::string& label, const runner::ExperimentResult& r) {
    out << fmt::format("{:<22} {:>8.4f} {:>8.4f} {:>8.4f} {:>8.4f} {:>8.4f} {:>8.4f} {:>8}\n", label,
                       r.final_support.mean, r.final_support.std, r.success_probability, r.lockin_rate,
                       r.lag_normalized_mean, r.herfindahl_mean, opt_double(r.path_dependence));
}

void print_files(std::ostream& out, const std::filesystem::path& dir, const std::vector<std::string>& files) {
    for (const auto& f : files) {
        out << "wrote " << (dir / f).string() << '\n';
    }
}

std::vector<Mechanism> parse_mechanisms(const std::string& list, Mechanism fallback) {
    if (list.empty()) {
        return {fallback};
    }
    if (list == "all") {
        return {Mechanism::CG, Mechanism::WS, Mechanism::SM, Mechanism::NG};
    }
    std::vector<Mechanism> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto m = parse_mechanism(item);
        if (!m) {
            throw ConfigError(std::vector<ConfigIssue>{{"--mechanisms", "unknown mechanism '" + item + "'"}});
        }
        out.push_back(*m);
    }
    if (out.empty()) {
        throw ConfigError(std::vector<ConfigIssue>{{"--mechanisms", "empty list"}});
    }
    return out;
}

int cmd_run(const Common& c, const std::string& mechanisms, std::ostream& out) {
    const auto cfg = resolve_config(c);
    const auto list = parse_mechanisms(mechanisms, cfg.mechanism.mechanism);
    std::vector<runner::ExperimentResult> results;
    for (const auto m : list) {
        auto mcfg = cfg;
        mcfg.mechanism.mechanism = m;
        results.push_back(runner::run_experiment(validate_config(mcfg), {}, {c.jobs, true}));
    }
    const auto dir = io::experiment_dir(cfg);
    const auto files = io::write_run(dir, results, c.overrides);
    out << fmt::format("experiment {}: {} trials x {} rounds, N = {}\n", cfg.run.experiment_id, cfg.run.trials,
                       cfg.run.rounds, cfg.population_size());
    print_table_header(out, "mechanism");
    for (const auto& r : results) {
        print_table_row(out, std::string(to_string(r.config.mechanism.mechanism)), r);
    }
    print_files(out, dir, files);
    return kOk;
}

int cmd_sweep(const Common& c, const std::string& sweep_path, bool dry_run, bool force, std::ostream& out) {
    const auto cfg = resolve_config(c);
    const auto spec = runner::load_sweep(sweep_path);
    runner::resolve_cells(cfg, spec);
    const auto cost = runner::sweep_cost(cfg, spec);
    const auto budget = cfg.run.budget_agent_rounds;
    if (dry_run) {
        out << fmt::format("cells: {}\ntrials per cell: {}\nagent-rounds: {}\nbudget: {}\n", runner::cell_count(spec),
                           spec.trials_per_cell, cost, budget);
        out << (cost > budget && !force ? "would refuse without --force\n" : "within budget\n");
        return kOk;
    }
    const auto result = runner::run_sweep(cfg, spec, force, {c.jobs, true});
    const auto dir = io::experiment_dir(cfg);
    const auto files = io::write_sweep(dir, cfg, result, c.overrides);
    print_table_header(out, "cell (axis1, axis2)");
    for (const auto& cell : result.cells) {
        std::string label = io::format_value(cell.value1);
        if (spec.axis2) {
            label += ", " + io::format_value(cell.value2);
        }
        print_table_row(out, label, cell.result);
    }
    out << fmt::format("contour polylines: {}\n", result.contour.size());
    print_files(out, dir, files);
    return kOk;
}

int cmd_ablate(const Common& c, std::ostream& out) {
    const auto cfg = resolve_config(c);
    const auto variants = runner::run_ablation_battery(cfg, {c.jobs, true});
    const auto dir = io::experiment_dir(cfg);
    const auto files = io::write_ablation(dir, cfg, variants, c.overrides);
    print_table_header(out, "variant");
    for (const auto& v : variants) {
        print_table_row(out, v.name, v.result);
    }
    print_files(out, dir, files);
    return kOk;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_report(const std::string& dir_arg, std::ostream& out, std::ostream& err) {
    const std::filesystem::path dir(dir_arg);
    const auto manifest_path = dir / "manifest.json";
    const auto rounds_path = dir / "rounds.jsonl";
    if (!std::filesystem::exists(manifest_path)) {
        throw ConfigError(std::vector<ConfigIssue>{{manifest_path.string(), "no manifest in this directory"}});
    }
    if (!std::filesystem::exists(rounds_path)) {
        throw ConfigError(std::vector<ConfigIssue>{{rounds_path.string(), "no round logs (run.write_round_logs was off?)"}});
    }
    const auto base = load_config(manifest_path);
    const auto trials = io::read_round_logs(rounds_path);

    std::ostringstream csv;
    csv << io::kDiagnosticsHeader << '\n';
    for (const auto& t : trials) {
        auto cfg = base;
        if (const auto m = parse_mechanism(t.mechanism)) {
            cfg.mechanism.mechanism = *m;
        }
        runner::ExperimentResult r;
        r.config = cfg;
        runner::TrialResult tr;
        tr.trial = t.trial;
        tr.summary = diagnostics::summarize_trial(t.logs, cfg.true_topic(), cfg.mechanism.mechanism, cfg.diagnostics);
        r.trials.push_back(std::move(tr));
        io::write_diagnostics_rows(csv, r, {t.cell, t.axis1, t.axis2});
    }
    io::write_file(dir / "report_diagnostics.csv", csv.str());
    out << fmt::format("recomputed diagnostics for {} trials\nwrote {}\n", trials.size(),
                       (dir / "report_diagnostics.csv").string());
    const auto persisted = dir / "diagnostics.csv";
    if (std::filesystem::exists(persisted)) {
        if (read_text(persisted) != csv.str()) {
            err << "error: recomputed diagnostics differ from " << persisted.string() << '\n';
            return kRuntimeFailure;
        }
        out << "matches " << persisted.string() << '\n';
    }
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"polis: dual-world opinion-governance simulator", "polis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(io::kCodeVersion));

    Common run_opts;
    std::string mechanisms;
    auto* run = app.add_subcommand("run", "Run one experiment (trials in parallel)");
    add_common(run, run_opts);
    run->add_option("--mechanisms,-m", mechanisms, "Comma list of mechanisms, or 'all' (default: the config's)");

    Common sweep_opts;
    std::string sweep_path;
    bool dry_run = false;
    bool force = false;
    auto* sweep = app.add_subcommand("sweep", "Run a one- or two-axis parameter sweep");
    add_common(sweep, sweep_opts);
    sweep->add_option("--sweep", sweep_path, "Sweep spec (JSON)")->required();
    sweep->add_flag("--dry-run", dry_run, "Print cell count and budget, run nothing");
    sweep->add_flag("--force", force, "Run even when over the agent-round budget");

    Common ablate_opts;
    auto* ablate = app.add_subcommand("ablate", "Full CG against each single-switch ablation");
    add_common(ablate, ablate_opts);

    std::string report_dir;
    auto* report = app.add_subcommand("report", "Recompute per-trial diagnostics from round logs");
    report->add_option("--dir,-d", report_dir, "Experiment output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) return cmd_run(run_opts, mechanisms, out);
        if (*sweep) return cmd_sweep(sweep_opts, sweep_path, dry_run, force, out);
        if (*ablate) return cmd_ablate(ablate_opts, out);
        if (*report) return cmd_report(report_dir, out, err);
    } catch (const ConfigError& e) {
        err << "config error:\n" << e.what() << '\n';
        return kConfigError;
    } catch (const runner::BudgetExceeded& e) {
        err << "refused: " << e.what() << '\n';
        return kBudgetRefused;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kOk;
}

}  // namespace polis::cli
