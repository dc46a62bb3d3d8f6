#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polis/agents.hpp"
#include "polis/config.hpp"
#include "polis/diagnostics.hpp"
#include "polis/round_log.hpp"
#include "polis/types.hpp"

namespace polis::runner {

struct WorldState {
    std::vector<TopicState> topics;
    std::vector<AgentState> agents;
};

/// Deterministic, noise-free start: zero progress and social signal, c = 1,
/// stake = 1, confidence = 0.5, beliefs from the population groups in order.
/// With an attacker section, round(fraction * N) agents become attackers,
/// taken from each group in proportion to its size (largest remainder) and
/// from the highest ids within a group. Attackers start on the false topic.
WorldState initial_world(const ExperimentConfig& config);

/// Number of attackers each group contributes.
std::vector<int> attacker_quota(const ExperimentConfig& config);

/// Sweep cell coordinates; (0, 0) for a plain experiment.
struct Cell {
    std::uint64_t i = 0;
    std::uint64_t j = 0;
};

class TrialAborted : public ProtocolError {
public:
    TrialAborted(int trial, int round, const std::string& why);
    int trial() const { return trial_; }
    int round() const { return round_; }

private:
    int trial_;
    int round_;
};

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    std::vector<RoundLog> logs;
    diagnostics::TrialSummary summary;
};

/// Runs one trial with seed base_seed + trial_index. Identical inputs give
/// identical logs. `policy` defaults to the parametric policy of the config.
TrialResult run_trial(const ExperimentConfig& config, int trial_index, Cell cell = {},
                      const agents::AgentPolicy* policy = nullptr);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation over trials
};

struct RoundAggregate {
    int round = 0;
    MeanStd support_true;
    MeanStd influence_share_true;
    MeanStd theta_true;
    MeanStd pi_true;
};

struct ExperimentResult {
    ExperimentConfig config;
    Cell cell;
    std::vector<TrialResult> trials;
    std::vector<RoundAggregate> trajectory;
    MeanStd final_support;
    std::optional<double> path_dependence;  // needs two or more trials
    double lockin_rate = 0.0;
    double lag_normalized_mean = 0.0;
    double herfindahl_mean = 0.0;
    /// Fraction of trials whose final true support reaches lockin_threshold.
    double success_probability = 0.0;
};

struct RunOptions {
    int jobs = 0;  // 0: config.run.jobs, then hardware concurrency
    bool keep_agent_logs = true;
};

/// Trials run in parallel; results are ordered by trial index and do not
/// depend on scheduling.
ExperimentResult run_experiment(const ExperimentConfig& config, Cell cell = {}, RunOptions options = {});

/// Mean/std trajectory and diagnostics aggregates over completed trials.
void aggregate_trials(ExperimentResult& result);

struct SweepAxis {
    std::string path;
    std::vector<Json> values;
};

struct SweepSpec {
    SweepAxis axis1;
    std::optional<SweepAxis> axis2;
    int trials_per_cell = 10;
};

SweepSpec sweep_from_json(const Json& tree);
SweepSpec load_sweep(const std::filesystem::path& path);
Json sweep_to_json(const SweepSpec& spec);

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(std::int64_t cost, std::int64_t budget);
    std::int64_t cost() const { return cost_; }
    std::int64_t budget() const { return budget_; }

private:
    std::int64_t cost_;
    std::int64_t budget_;
};

struct SweepCell {
    std::size_t i = 0;
    std::size_t j = 0;
    Json value1;
    Json value2;  // null without a second axis
    ExperimentResult result;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepCell> cells;                      // row-major over (i, j)
    std::vector<std::vector<double>> success_grid;     // [i][j]
    std::vector<diagnostics::Polyline> contour;        // empty unless both axes are numeric
};

std::size_t cell_count(const SweepSpec& spec);

/// Agent-rounds a sweep would execute.
std::int64_t sweep_cost(const ExperimentConfig& config, const SweepSpec& spec);

/// Resolves every cell's config up front; a path or value that does not
/// resolve raises ConfigError before anything runs. Throws BudgetExceeded
/// when the cost exceeds run.budget_agent_rounds and `force` is false.
std::vector<ExperimentConfig> resolve_cells(const ExperimentConfig& config, const SweepSpec& spec);
SweepResult run_sweep(const ExperimentConfig& config, const SweepSpec& spec, bool force = false,
                      RunOptions options = {});

struct AblationVariant {
    std::string name;
    ExperimentResult result;
};

/// Full CG followed by the four single-switch variants, all on the same seeds.
std::vector<ExperimentConfig> ablation_configs(const ExperimentConfig& config);
std::vector<AblationVariant> run_ablation_battery(const ExperimentConfig& config, RunOptions options = {});

inline constexpr const char* kAblationNames[] = {"full", "no_credibility_update", "no_anti_bubble",
                                                  "no_early_mover", "reward_basis_pi"};

}  // namespace polis::runner
