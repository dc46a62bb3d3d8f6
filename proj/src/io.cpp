#include "polis/io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

namespace polis::io {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string prefix(const ExperimentConfig& config, const CellLabel& label) {
    return fmt::format("{},{},{},{},{}", csv_field(config.run.experiment_id), to_string(config.mechanism.mechanism),
                       csv_field(label.cell), csv_field(label.axis1), csv_field(label.axis2));
}

std::vector<std::string> role_names(const ExperimentConfig& config) {
    std::vector<std::string> out;
    for (const auto& a : runner::initial_world(config).agents) {
        out.emplace_back(to_string(a.role));
    }
    return out;
}

std::string optional_int(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

}  // namespace

std::string format_double(double x) { return fmt::format("{}", x); }

std::string format_value(const Json& value) {
    if (value.is_null()) return "";
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_float()) return format_double(value.get<double>());
    return value.dump();
}

Json round_log_to_json(const RoundLog& log, const ExperimentConfig& config, const CellLabel& label,
                       const std::vector<std::string>& roles) {
    Json rec;
    rec["experiment_id"] = config.run.experiment_id;
    rec["mechanism"] = std::string(to_string(config.mechanism.mechanism));
    rec["cell"] = label.cell;
    rec["axis1"] = label.axis1;
    rec["axis2"] = label.axis2;
    rec["trial"] = log.trial;
    rec["round"] = log.round;
    rec["support_true"] = log.support_true;
    rec["influence_share_true"] = log.influence_share_true;
    rec["herfindahl"] = log.herfindahl;
    Json topics = Json::array();
    for (std::size_t k = 0; k < log.topics.size(); ++k) {
        const auto& t = log.topics[k];
        topics.push_back({{"name", config.world.topics[k].name},
                          {"is_true", config.world.topics[k].is_true},
                          {"progress", t.progress},
                          {"delta_progress", t.delta_progress},
                          {"social_signal", t.social_signal},
                          {"allocation", t.allocation},
                          {"perceived", t.perceived},
                          {"support", t.support},
                          {"supporter_quality", t.supporter_quality},
                          {"bubble_penalty", t.bubble_penalty}});
    }
    rec["topics"] = std::move(topics);
    if (!log.agents.empty()) {
        Json vote = Json::array(), confidence = Json::array(), weight = Json::array(), normalized = Json::array(),
             credibility = Json::array(), stake = Json::array(), switched = Json::array();
        for (const auto& a : log.agents) {
            vote.push_back(a.vote);
            confidence.push_back(a.confidence);
            weight.push_back(a.weight);
            normalized.push_back(a.normalized_weight);
            credibility.push_back(a.credibility);
            stake.push_back(a.stake);
            switched.push_back(a.switched);
        }
        rec["agents"] = {{"role", roles},
                         {"vote", vote},
                         {"confidence", confidence},
                         {"weight", weight},
                         {"normalized_weight", normalized},
                         {"credibility", credibility},
                         {"stake", stake},
                         {"switched", switched}};
    }
    return rec;
}

RoundLog round_log_from_json(const Json& rec) {
    RoundLog log;
    log.trial = rec.at("trial").get<int>();
    log.round = rec.at("round").get<int>();
    log.support_true = rec.at("support_true").get<double>();
    log.influence_share_true = rec.at("influence_share_true").get<double>();
    log.herfindahl = rec.at("herfindahl").get<double>();
    for (const auto& t : rec.at("topics")) {
        TopicRecord r;
        r.progress = t.at("progress").get<double>();
        r.delta_progress = t.at("delta_progress").get<double>();
        r.social_signal = t.at("social_signal").get<double>();
        r.allocation = t.at("allocation").get<double>();
        r.perceived = t.at("perceived").get<double>();
        r.support = t.at("support").get<double>();
        r.supporter_quality = t.at("supporter_quality").get<double>();
        r.bubble_penalty = t.at("bubble_penalty").get<double>();
        log.topics.push_back(r);
    }
    if (rec.contains("agents")) {
        const auto& a = rec["agents"];
        const std::size_t n = a.at("vote").size();
        log.agents.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& r = log.agents[i];
            r.vote = a["vote"][i].get<TopicId>();
            r.confidence = a.at("confidence")[i].get<double>();
            r.weight = a.at("weight")[i].get<double>();
            r.normalized_weight = a.at("normalized_weight")[i].get<double>();
            r.credibility = a.at("credibility")[i].get<double>();
            r.stake = a.at("stake")[i].get<double>();
            r.switched = a.at("switched")[i].get<bool>();
        }
    }
    return log;
}

void write_round_logs(std::ostream& out, const runner::ExperimentResult& result, const CellLabel& label) {
    const auto roles = role_names(result.config);
    for (const auto& trial : result.trials) {
        for (const auto& log : trial.logs) {
            out << round_log_to_json(log, result.config, label, roles).dump() << '\n';
        }
    }
}

void write_summary_rows(std::ostream& out, const runner::ExperimentResult& result, const CellLabel& label) {
    const auto& cfg = result.config;
    const std::string head = prefix(cfg, label);
    const TopicId t = cfg.true_topic();
    const TopicId f = cfg.false_topic();
    for (const auto& trial : result.trials) {
        for (const auto& log : trial.logs) {
            out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", head, trial.trial, log.round,
                               format_double(log.support_true), format_double(log.influence_share_true),
                               format_double(log.topics[t].social_signal), format_double(log.topics[f].social_signal),
                               format_double(log.topics[t].progress), format_double(log.topics[f].progress),
                               format_double(log.herfindahl));
        }
    }
}

void write_trajectory_rows(std::ostream& out, const runner::ExperimentResult& result, const CellLabel& label) {
    const std::string head = prefix(result.config, label);
    for (const auto& r : result.trajectory) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", head, r.round, format_double(r.support_true.mean),
                           format_double(r.support_true.std), format_double(r.influence_share_true.mean),
                           format_double(r.influence_share_true.std), format_double(r.theta_true.mean),
                           format_double(r.theta_true.std), format_double(r.pi_true.mean),
                           format_double(r.pi_true.std));
    }
}

void write_diagnostics_rows(std::ostream& out, const runner::ExperimentResult& result, const CellLabel& label) {
    const std::string head = prefix(result.config, label);
    for (const auto& trial : result.trials) {
        const auto& s = trial.summary;
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", head, trial.trial, format_double(s.final_true_support),
                           s.lockin ? 1 : 0, optional_int(s.lag.evidence_round), optional_int(s.lag.lag),
                           format_double(s.lag.normalized), s.lag.censored() ? 1 : 0,
                           format_double(s.herfindahl_mean));
    }
}

Json aggregate_to_json(const runner::ExperimentResult& result) {
    Json out;
    out["experiment_id"] = result.config.run.experiment_id;
    out["mechanism"] = std::string(to_string(result.config.mechanism.mechanism));
    out["trials"] = result.trials.size();
    out["final_support_mean"] = result.final_support.mean;
    out["final_support_std"] = result.final_support.std;
    out["path_dependence"] = result.path_dependence ? Json(*result.path_dependence) : Json();
    out["lockin_rate"] = result.lockin_rate;
    out["lag_normalized_mean"] = result.lag_normalized_mean;
    out["herfindahl_mean"] = result.herfindahl_mean;
    out["success_probability"] = result.success_probability;
    return out;
}

Json manifest(const ManifestInput& input) {
    Json m;
    m["manifest_version"] = kManifestVersion;
    m["tool"] = "polis";
    m["code_version"] = kCodeVersion;
    m["command"] = input.command;
    m["overrides"] = input.overrides;
    const auto& cfg = *input.config;
    m["experiment_id"] = cfg.run.experiment_id;
    Json seeds;
    seeds["base_seed"] = cfg.run.base_seed;
    const int trials = input.sweep ? input.sweep->trials_per_cell : cfg.run.trials;
    Json trial_seeds = Json::array();
    for (int i = 0; i < trials; ++i) {
        trial_seeds.push_back(cfg.run.base_seed + static_cast<std::uint64_t>(i));
    }
    seeds["trial_seeds"] = std::move(trial_seeds);
    m["seeds"] = std::move(seeds);
    m["rng"] = {{"generator", "philox4x32-10"},
                {"key_derivation",
                 "splitmix64 chain over (trial_seed, cell_i, cell_j, round, entity, purpose); key = 64-bit hash"},
                {"purposes", {{"physical", 1}, {"perception", 2}, {"agent", 3}, {"stake", 4}, {"social_perception", 5}}},
                {"normal", "box-muller on 53-bit uniforms"}};
    m["config"] = config_to_json(cfg);
    m["sweep"] = input.sweep ? runner::sweep_to_json(*input.sweep) : Json();
    m["mechanisms"] = input.mechanisms;
    m["files"] = input.files;
    return m;
}

std::filesystem::path experiment_dir(const ExperimentConfig& config) {
    return std::filesystem::path(config.run.output_dir) / config.run.experiment_id;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << text;
    out.close();
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

std::vector<std::string> write_run(const std::filesystem::path& dir,
                                   const std::vector<runner::ExperimentResult>& results,
                                   const std::vector<std::string>& overrides) {
    if (results.empty()) {
        throw std::invalid_argument("write_run: no results");
    }
    const CellLabel label;
    const bool single = results.size() == 1;
    std::ostringstream summary, trajectory, diagnostics, rounds;
    summary << kSummaryHeader << '\n';
    trajectory << kTrajectoryHeader << '\n';
    diagnostics << kDiagnosticsHeader << '\n';
    Json aggregate = Json::object();
    std::vector<std::string> mechanisms;
    for (const auto& result : results) {
        write_summary_rows(summary, result, label);
        write_trajectory_rows(trajectory, result, label);
        write_diagnostics_rows(diagnostics, result, label);
        if (result.config.run.write_round_logs) {
            write_round_logs(rounds, result, label);
        }
        mechanisms.emplace_back(to_string(result.config.mechanism.mechanism));
        if (single) {
            aggregate = aggregate_to_json(result);
        } else {
            aggregate[mechanisms.back()] = aggregate_to_json(result);
        }
    }
    std::vector<std::string> files = {"summary.csv", "trajectory.csv", "diagnostics.csv", "aggregate.json"};
    write_file(dir / "summary.csv", summary.str());
    write_file(dir / "trajectory.csv", trajectory.str());
    write_file(dir / "diagnostics.csv", diagnostics.str());
    write_file(dir / "aggregate.json", aggregate.dump(2) + "\n");
    const auto& config = results.front().config;
    if (config.run.write_round_logs) {
        write_file(dir / "rounds.jsonl", rounds.str());
        files.push_back("rounds.jsonl");
    }
    ManifestInput input{"run", overrides, &config, nullptr, single ? std::vector<std::string>{} : mechanisms, files};
    write_file(dir / "manifest.json", manifest(input).dump(2) + "\n");
    files.push_back("manifest.json");
    return files;
}

std::vector<std::string> write_sweep(const std::filesystem::path& dir, const ExperimentConfig& config,
                                     const runner::SweepResult& result, const std::vector<std::string>& overrides) {
    std::ostringstream summary, diagnostics, cells, grid, contour, rounds;
    summary << kSummaryHeader << '\n';
    diagnostics << kDiagnosticsHeader << '\n';
    cells << kCellsHeader << '\n';
    grid << kGridHeader << '\n';
    contour << kContourHeader << '\n';
    const std::size_t cols = result.spec.axis2 ? result.spec.axis2->values.size() : 1;
    for (const auto& c : result.cells) {
        const CellLabel label{std::to_string(c.i * cols + c.j), format_value(c.value1), format_value(c.value2)};
        const auto& r = c.result;
        write_summary_rows(summary, r, label);
        write_diagnostics_rows(diagnostics, r, label);
        if (config.run.write_round_logs) {
            write_round_logs(rounds, r, label);
        }
        const std::string head = fmt::format("{},{},{},{},{},{},{}", csv_field(r.config.run.experiment_id),
                                             to_string(r.config.mechanism.mechanism), label.cell, c.i, c.j,
                                             csv_field(label.axis1), csv_field(label.axis2));
        cells << fmt::format("{},{},{},{},{},{},{},{},{}\n", head, r.trials.size(),
                             format_double(r.success_probability), format_double(r.final_support.mean),
                             format_double(r.final_support.std),
                             r.path_dependence ? format_double(*r.path_dependence) : std::string(),
                             format_double(r.lockin_rate), format_double(r.lag_normalized_mean),
                             format_double(r.herfindahl_mean));
        const double tau = r.config.diagnostics.lockin_threshold;
        for (const auto& t : r.trials) {
            const auto& s = t.summary;
            grid << fmt::format("{},{},{},{},{},{},{}\n", head, t.trial, format_double(s.final_true_support),
                                s.final_true_support >= tau ? 1 : 0, s.lockin ? 1 : 0,
                                format_double(s.lag.normalized), format_double(s.herfindahl_mean));
        }
    }
    for (std::size_t p = 0; p < result.contour.size(); ++p) {
        for (std::size_t q = 0; q < result.contour[p].size(); ++q) {
            contour << fmt::format("{},{},{},{}\n", p, q, format_double(result.contour[p][q].axis1),
                                   format_double(result.contour[p][q].axis2));
        }
    }
    std::vector<std::string> files = {"summary.csv", "diagnostics.csv", "cells.csv", "grid.csv", "contour.csv"};
    write_file(dir / "summary.csv", summary.str());
    write_file(dir / "diagnostics.csv", diagnostics.str());
    write_file(dir / "cells.csv", cells.str());
    write_file(dir / "grid.csv", grid.str());
    write_file(dir / "contour.csv", contour.str());
    if (config.run.write_round_logs) {
        write_file(dir / "rounds.jsonl", rounds.str());
        files.push_back("rounds.jsonl");
    }
    write_file(dir / "manifest.json", manifest({"sweep", overrides, &config, &result.spec, {}, files}).dump(2) + "\n");
    files.push_back("manifest.json");
    return files;
}

std::vector<std::string> write_ablation(const std::filesystem::path& dir, const ExperimentConfig& config,
                                        const std::vector<runner::AblationVariant>& variants,
                                        const std::vector<std::string>& overrides) {
    std::ostringstream summary, trajectory, diagnostics, pairs, rounds;
    summary << kSummaryHeader << '\n';
    trajectory << kTrajectoryHeader << '\n';
    diagnostics << kDiagnosticsHeader << '\n';
    pairs << kAblationHeader << '\n';
    Json aggregate = Json::object();
    for (std::size_t v = 0; v < variants.size(); ++v) {
        const CellLabel label{std::to_string(v), variants[v].name, ""};
        const auto& r = variants[v].result;
        write_summary_rows(summary, r, label);
        write_trajectory_rows(trajectory, r, label);
        write_diagnostics_rows(diagnostics, r, label);
        if (config.run.write_round_logs) {
            write_round_logs(rounds, r, label);
        }
        aggregate[variants[v].name] = aggregate_to_json(r);
    }
    const auto& full = variants.front().result.trajectory;
    for (std::size_t v = 1; v < variants.size(); ++v) {
        const auto& var = variants[v].result.trajectory;
        for (std::size_t t = 0; t < full.size(); ++t) {
            pairs << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(config.run.experiment_id),
                                 variants[v].name, full[t].round, format_double(full[t].support_true.mean),
                                 format_double(full[t].support_true.std), format_double(var[t].support_true.mean),
                                 format_double(var[t].support_true.std),
                                 format_double(full[t].influence_share_true.mean),
                                 format_double(var[t].influence_share_true.mean),
                                 format_double(full[t].theta_true.mean), format_double(var[t].theta_true.mean));
        }
    }
    std::vector<std::string> files = {"summary.csv", "trajectory.csv", "diagnostics.csv", "ablation_pairs.csv",
                                      "aggregate.json"};
    write_file(dir / "summary.csv", summary.str());
    write_file(dir / "trajectory.csv", trajectory.str());
    write_file(dir / "diagnostics.csv", diagnostics.str());
    write_file(dir / "ablation_pairs.csv", pairs.str());
    write_file(dir / "aggregate.json", aggregate.dump(2) + "\n");
    if (config.run.write_round_logs) {
        write_file(dir / "rounds.jsonl", rounds.str());
        files.push_back("rounds.jsonl");
    }
    write_file(dir / "manifest.json", manifest({"ablate", overrides, &config, nullptr, {}, files}).dump(2) + "\n");
    files.push_back("manifest.json");
    return files;
}

std::vector<LoggedTrial> read_round_logs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::vector<LoggedTrial> out;
    std::map<std::tuple<std::string, std::string, int>, std::size_t> index;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Json rec;
        try {
            rec = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        const std::string cell = rec.value("cell", std::string("0"));
        const int trial = rec.at("trial").get<int>();
        auto [it, inserted] = index.try_emplace({rec.value("mechanism", std::string()), cell, trial}, out.size());
        if (inserted) {
            out.push_back({rec.value("mechanism", std::string()), cell, rec.value("axis1", std::string()), rec.value("axis2", std::string()), trial, {}});
        }
        try {
            out[it->second].logs.push_back(round_log_from_json(rec));
        } catch (const Json::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace polis::io
