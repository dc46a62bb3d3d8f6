#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "polis/config.hpp"
#include "polis/runner.hpp"

namespace polis::io {

inline constexpr const char* kCodeVersion = "1.0.0";
inline constexpr int kManifestVersion = 1;

inline constexpr const char* kSummaryHeader =
    "experiment_id,mechanism,cell,axis1,axis2,trial,round,support_true,influence_share_true,theta_true,"
    "theta_false,pi_true,pi_false,herfindahl";
inline constexpr const char* kTrajectoryHeader =
    "experiment_id,mechanism,cell,axis1,axis2,round,support_true_mean,support_true_std,"
    "influence_share_true_mean,influence_share_true_std,theta_true_mean,theta_true_std,pi_true_mean,pi_true_std";
inline constexpr const char* kDiagnosticsHeader =
    "experiment_id,mechanism,cell,axis1,axis2,trial,final_support_true,lockin,evidence_round,lag,lag_normalized,"
    "lag_censored,herfindahl_mean";
inline constexpr const char* kCellsHeader =
    "experiment_id,mechanism,cell,i,j,axis1,axis2,trials,success_probability,final_support_mean,final_support_std,"
    "path_dependence,lockin_rate,lag_normalized_mean,herfindahl_mean";
inline constexpr const char* kGridHeader =
    "experiment_id,mechanism,cell,i,j,axis1,axis2,trial,final_support_true,success,lockin,lag_normalized,"
    "herfindahl_mean";
inline constexpr const char* kContourHeader = "polyline,point,axis1,axis2";
inline constexpr const char* kAblationHeader =
    "experiment_id,variant,round,support_true_full_mean,support_true_full_std,support_true_variant_mean,"
    "support_true_variant_std,influence_share_true_full_mean,influence_share_true_variant_mean,"
    "theta_true_full_mean,theta_true_variant_mean";

/// Labels that place an experiment inside a sweep or battery. A plain run
/// uses cell "0" and empty axis values.
struct CellLabel {
    std::string cell = "0";
    std::string axis1;
    std::string axis2;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// Text for a sweep axis value in a CSV cell.
std::string format_value(const Json& value);

/// One RoundLog as a JSON object; agent attributes are stored columnwise.
/// `roles` lists each agent's role name in id order.
Json round_log_to_json(const RoundLog& log, const ExperimentConfig& config, const CellLabel& label,
                       const std::vector<std::string>& roles);
RoundLog round_log_from_json(const Json& record);

void write_round_logs(std::ostream& out, const runner::ExperimentResult& result, const CellLabel& label);
void write_summary_rows(std::ostream& out, const runner::ExperimentResult& result, const CellLabel& label);
void write_trajectory_rows(std::ostream& out, const runner::ExperimentResult& result, const CellLabel& label);
void write_diagnostics_rows(std::ostream& out, const runner::ExperimentResult& result, const CellLabel& label);
Json aggregate_to_json(const runner::ExperimentResult& result);

struct ManifestInput {
    std::string command;
    std::vector<std::string> overrides;
    const ExperimentConfig* config = nullptr;
    const runner::SweepSpec* sweep = nullptr;
    std::vector<std::string> mechanisms;  // empty: the config's own mechanism
    std::vector<std::string> files;
};

/// Reproducibility record. Contains no timestamps or host data, so it is
/// itself deterministic.
Json manifest(const ManifestInput& input);

/// Output directory for an experiment: output_dir / experiment_id.
std::filesystem::path experiment_dir(const ExperimentConfig& config);

/// Writes text to `path`, creating parent directories. Failures raise
/// std::runtime_error naming the path.
void write_file(const std::filesystem::path& path, const std::string& text);

/// Artifacts of `run`, one experiment per mechanism, all sharing one set of
/// files distinguished by the mechanism column. Returns the file names.
std::vector<std::string> write_run(const std::filesystem::path& dir,
                                   const std::vector<runner::ExperimentResult>& results,
                                   const std::vector<std::string>& overrides);

/// Artifacts of `sweep`.
std::vector<std::string> write_sweep(const std::filesystem::path& dir, const ExperimentConfig& config,
                                     const runner::SweepResult& result, const std::vector<std::string>& overrides);

/// Artifacts of `ablate`.
std::vector<std::string> write_ablation(const std::filesystem::path& dir, const ExperimentConfig& config,
                                        const std::vector<runner::AblationVariant>& variants,
                                        const std::vector<std::string>& overrides);

/// Trials read back from a rounds.jsonl file, grouped by (mechanism, cell,
/// trial) in first-seen order.
struct LoggedTrial {
    std::string mechanism;
    std::string cell;
    std::string axis1;
    std::string axis2;
    int trial = 0;
    std::vector<RoundLog> logs;
};
std::vector<LoggedTrial> read_round_logs(const std::filesystem::path& path);

}  // namespace polis::io
