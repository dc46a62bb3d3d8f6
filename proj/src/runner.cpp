#include "polis/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "polis/governance.hpp"
#include "polis/physical.hpp"
#include "polis/rng.hpp"

namespace polis::runner {

namespace {

bool all_finite(const WorldState& w) {
    for (const auto& t : w.topics) {
        if (!std::isfinite(t.progress) || !std::isfinite(t.social_signal) || !std::isfinite(t.prev_allocation)) {
            return false;
        }
    }
    for (const auto& a : w.agents) {
        if (!std::isfinite(a.confidence) || !std::isfinite(a.credibility) || !std::isfinite(a.stake_balance)) {
            return false;
        }
    }
    return true;
}

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd out;
    if (xs.empty()) {
        return out;
    }
    const double n = static_cast<double>(xs.size());
    out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - out.mean) * (x - out.mean);
    }
    out.std = std::sqrt(ss / n);
    return out;
}

int resolve_jobs(const ExperimentConfig& config, const RunOptions& options) {
    int jobs = options.jobs > 0 ? options.jobs : config.run.jobs;
    if (jobs <= 0) {
        jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
    return jobs;
}

// Runs fn(index) for index in [0, count) on up to `jobs` threads. The first
// exception is rethrown after every worker has joined.
template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : workers) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace

TrialAborted::TrialAborted(int trial, int round, const std::string& why)
    : ProtocolError("trial " + std::to_string(trial) + " aborted in round " + std::to_string(round) + ": " + why),
      trial_(trial),
      round_(round) {}

BudgetExceeded::BudgetExceeded(std::int64_t cost, std::int64_t budget)
    : std::runtime_error("sweep needs " + std::to_string(cost) + " agent-rounds, budget is " +
                         std::to_string(budget) + " (use --force to run anyway)"),
      cost_(cost),
      budget_(budget) {}

std::vector<int> attacker_quota(const ExperimentConfig& config) {
    const std::size_t groups = config.population.size();
    std::vector<int> quota(groups, 0);
    if (!config.attacker || groups == 0) {
        return quota;
    }
    const int n = config.population_size();
    const int total = static_cast<int>(std::lround(config.attacker->fraction * n));
    std::vector<double> remainder(groups, 0.0);
    int assigned = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        const double exact = static_cast<double>(total) * config.population[g].count / n;
        quota[g] = static_cast<int>(std::floor(exact));
        remainder[g] = exact - quota[g];
        assigned += quota[g];
    }
    std::vector<std::size_t> order(groups);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t idx = 0; assigned < total; idx = (idx + 1) % groups) {
        const std::size_t g = order[idx];
        if (quota[g] < config.population[g].count) {
            ++quota[g];
            ++assigned;
        }
    }
    return quota;
}

WorldState initial_world(const ExperimentConfig& config) {
    WorldState w;
    const std::size_t k_count = config.world.topic_count();
    const int n = config.population_size();
    for (TopicId k = 0; k < k_count; ++k) {
        TopicState t;
        t.topic_id = k;
        t.is_true_topic = config.world.topics[k].is_true;
        w.topics.push_back(t);
    }
    const auto quota = attacker_quota(config);
    AgentId next_id = 0;
    for (std::size_t g = 0; g < config.population.size(); ++g) {
        const auto& group = config.population[g];
        for (int m = 0; m < group.count; ++m) {
            AgentState a;
            a.agent_id = next_id++;
            a.persona = group.persona;
            if (m >= group.count - quota[g]) {
                a.role = Role::attacker;
                a.belief = config.false_topic();
            } else {
                a.role = group.role;
                a.belief = group.initial_belief;
            }
            w.agents.push_back(a);
        }
    }
    // Round 1 compares against the split implied by the initial beliefs
    // under equal weights.
    std::vector<double> counts(k_count, 0.0);
    for (const auto& a : w.agents) {
        counts[a.belief] += 1.0;
    }
    for (TopicId k = 0; k < k_count; ++k) {
        w.topics[k].prev_allocation = counts[k] / n;
    }
    return w;
}

TrialResult run_trial(const ExperimentConfig& config, int trial_index, Cell cell, const agents::AgentPolicy* policy) {
    const auto attacker_behavior =
        config.attacker ? std::optional<AttackerBehavior>(config.attacker->behavior) : std::nullopt;
    const agents::ParametricPolicy default_policy(config.policy, attacker_behavior);
    if (policy == nullptr) {
        policy = &default_policy;
    }

    TrialResult result;
    result.trial = trial_index;
    result.seed = config.run.base_seed + static_cast<std::uint64_t>(trial_index);
    const rng::StreamFactory streams(result.seed, cell.i, cell.j);

    WorldState world = initial_world(config);
    governance::Governance gov(config.mechanism, world.agents);
    const auto& mech = config.mechanism;
    const std::size_t k_count = world.topics.size();
    const std::size_t n = world.agents.size();
    const TopicId true_topic = config.true_topic();
    const TopicId false_topic = config.false_topic();
    std::vector<double> last_theta_delta(k_count, 0.0);

    result.logs.reserve(static_cast<std::size_t>(config.run.rounds));
    for (int round = 1; round <= config.run.rounds; ++round) {
        // (1) perception of the state left by round t-1
        const auto signals =
            physical::build_perception(world.topics, mech.mechanism, config.noise, config.shock, round, streams);

        // (2) opinion formation, agents in id order
        agents::DecisionContext ctx{signals, last_theta_delta, mech.mechanism, false_topic};
        std::vector<bool> switched(n, false);
        for (auto& agent : world.agents) {
            auto stream = streams.stream(rng::Purpose::agent, static_cast<std::uint64_t>(round), agent.agent_id);
            const auto update = policy->decide(agent, ctx, stream);
            switched[agent.agent_id] = update.belief != agent.belief;
            agent.belief = update.belief;
            agent.confidence = update.confidence;
            if (switched[agent.agent_id] && mech.mechanism == Mechanism::CG && mech.apply_inconsistency_penalty) {
                agent.credibility = governance::inconsistency_penalty(agent.credibility, mech);
            }
        }

        // (3) weights from t-1 attributes and allocation r^t
        governance::Allocation allocation;
        try {
            allocation = gov.allocate(world.agents, k_count);
        } catch (const ProtocolError& e) {
            throw TrialAborted(trial_index, round, e.what());
        }

        // (4) physical step
        const auto phys = physical::step_physical(world.topics, allocation.allocations, config.world, streams, round);
        for (std::size_t k = 0; k < k_count; ++k) {
            world.topics[k].progress = phys.progress[k];
        }

        // (5) social signal and attribute updates
        std::vector<double> theta_prev(k_count);
        for (std::size_t k = 0; k < k_count; ++k) {
            theta_prev[k] = world.topics[k].social_signal;
        }
        const auto friction = governance::stake_friction(mech, n, streams, round);
        const auto outcome = gov.settle(world.topics, world.agents, allocation, phys.delta_progress, friction);
        for (std::size_t k = 0; k < k_count; ++k) {
            last_theta_delta[k] = outcome.new_social_signals[k] - theta_prev[k];
        }

        if (!all_finite(world)) {
            throw TrialAborted(trial_index, round, "non-finite state");
        }

        // (6) log
        RoundLog log;
        log.trial = trial_index;
        log.round = round;
        log.topics.resize(k_count);
        std::vector<double> votes_per_topic(k_count, 0.0);
        for (const auto& a : world.agents) {
            votes_per_topic[a.belief] += 1.0;
        }
        for (std::size_t k = 0; k < k_count; ++k) {
            auto& rec = log.topics[k];
            rec.progress = world.topics[k].progress;
            rec.delta_progress = phys.delta_progress[k];
            rec.social_signal = world.topics[k].social_signal;
            rec.allocation = outcome.allocations[k];
            rec.perceived = signals[k].noisy_progress;
            rec.support = votes_per_topic[k] / static_cast<double>(n);
            if (!outcome.supporter_quality.empty()) {
                rec.supporter_quality = outcome.supporter_quality[k];
                rec.bubble_penalty = outcome.bubble_penalty[k];
            }
        }
        log.agents.resize(n);
        double share_true = 0.0;
        double hhi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = world.agents[i];
            auto& rec = log.agents[i];
            rec.vote = a.belief;
            rec.confidence = a.confidence;
            rec.weight = outcome.weight_snapshot[i];
            rec.normalized_weight = outcome.normalized_weights[i];
            rec.credibility = a.credibility;
            rec.stake = a.stake_balance;
            rec.switched = switched[i];
            if (a.belief == true_topic) {
                share_true += rec.normalized_weight;
            }
        }
        hhi = diagnostics::herfindahl(outcome.weight_snapshot);
        log.support_true = log.topics[true_topic].support;
        log.influence_share_true = share_true;
        log.herfindahl = hhi;
        result.logs.push_back(std::move(log));
    }

    result.summary = diagnostics::summarize_trial(result.logs, true_topic, mech.mechanism, config.diagnostics);
    return result;
}

void aggregate_trials(ExperimentResult& result) {
    const auto& config = result.config;
    const TopicId true_topic = config.true_topic();
    const auto rounds = static_cast<std::size_t>(config.run.rounds);
    result.trajectory.clear();
    for (std::size_t t = 0; t < rounds; ++t) {
        std::vector<double> support;
        std::vector<double> share;
        std::vector<double> theta;
        std::vector<double> pi;
        for (const auto& trial : result.trials) {
            const auto& log = trial.logs[t];
            support.push_back(log.support_true);
            share.push_back(log.influence_share_true);
            theta.push_back(log.topics[true_topic].social_signal);
            pi.push_back(log.topics[true_topic].progress);
        }
        result.trajectory.push_back(
            {static_cast<int>(t) + 1, mean_std(support), mean_std(share), mean_std(theta), mean_std(pi)});
    }

    std::vector<double> finals;
    double lockins = 0.0;
    double lag = 0.0;
    double hhi = 0.0;
    double successes = 0.0;
    for (const auto& trial : result.trials) {
        finals.push_back(trial.summary.final_true_support);
        lockins += trial.summary.lockin ? 1.0 : 0.0;
        lag += trial.summary.lag.normalized;
        hhi += trial.summary.herfindahl_mean;
        successes += trial.summary.final_true_support >= config.diagnostics.lockin_threshold ? 1.0 : 0.0;
    }
    const double count = static_cast<double>(result.trials.size());
    result.final_support = mean_std(finals);
    result.path_dependence =
        finals.size() >= 2 ? std::optional<double>(diagnostics::path_dependence(finals)) : std::nullopt;
    result.lockin_rate = lockins / count;
    result.lag_normalized_mean = lag / count;
    result.herfindahl_mean = hhi / count;
    result.success_probability = successes / count;
}

ExperimentResult run_experiment(const ExperimentConfig& config, Cell cell, RunOptions options) {
    ExperimentResult result;
    result.config = config;
    result.cell = cell;
    result.trials.resize(static_cast<std::size_t>(config.run.trials));
    parallel_for(config.run.trials, resolve_jobs(config, options), [&](int trial) {
        auto r = run_trial(config, trial, cell);
        if (!options.keep_agent_logs) {
            for (auto& log : r.logs) {
                log.agents.clear();
                log.agents.shrink_to_fit();
            }
        }
        result.trials[static_cast<std::size_t>(trial)] = std::move(r);
    });
    aggregate_trials(result);
    return result;
}

SweepSpec sweep_from_json(const Json& tree) {
    std::vector<ConfigIssue> issues;
    SweepSpec spec;
    auto read_axis = [&](const Json& node, const std::string& path) {
        SweepAxis axis;
        if (!node.is_object() || !node.contains("path") || !node["path"].is_string()) {
            issues.push_back({path + ".path", "expected a parameter path string"});
        } else {
            axis.path = node["path"].get<std::string>();
        }
        if (!node.is_object() || !node.contains("values") || !node["values"].is_array() || node["values"].empty()) {
            issues.push_back({path + ".values", "expected a non-empty list"});
        } else {
            for (const auto& v : node["values"]) {
                axis.values.push_back(v);
            }
        }
        if (node.is_object()) {
            for (const auto& [key, value] : node.items()) {
                if (key != "path" && key != "values") {
                    issues.push_back({path + "." + key, "unknown key"});
                }
            }
        }
        return axis;
    };
    if (!tree.is_object()) {
        throw ConfigError(std::vector<ConfigIssue>{{"sweep", "expected an object"}});
    }
    for (const auto& [key, value] : tree.items()) {
        if (key != "axes" && key != "trials_per_cell") {
            issues.push_back({"sweep." + key, "unknown key"});
        }
    }
    if (!tree.contains("axes") || !tree["axes"].is_array() || tree["axes"].empty() || tree["axes"].size() > 2) {
        issues.push_back({"sweep.axes", "expected one or two axes"});
    } else {
        spec.axis1 = read_axis(tree["axes"][0], "sweep.axes.0");
        if (tree["axes"].size() == 2) {
            spec.axis2 = read_axis(tree["axes"][1], "sweep.axes.1");
        }
    }
    if (tree.contains("trials_per_cell")) {
        if (!tree["trials_per_cell"].is_number_integer() || tree["trials_per_cell"].get<int>() < 1) {
            issues.push_back({"sweep.trials_per_cell", "must be an integer >= 1"});
        } else {
            spec.trials_per_cell = tree["trials_per_cell"].get<int>();
        }
    }
    if (!issues.empty()) {
        throw ConfigError(std::move(issues));
    }
    return spec;
}

SweepSpec load_sweep(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(std::vector<ConfigIssue>{{path.string(), "cannot open sweep file"}});
    }
    try {
        return sweep_from_json(Json::parse(in, nullptr, true, true));
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::vector<ConfigIssue>{{path.string(), std::string("parse error: ") + e.what()}});
    }
}

Json sweep_to_json(const SweepSpec& spec) {
    Json axes = Json::array();
    axes.push_back({{"path", spec.axis1.path}, {"values", spec.axis1.values}});
    if (spec.axis2) {
        axes.push_back({{"path", spec.axis2->path}, {"values", spec.axis2->values}});
    }
    return {{"axes", axes}, {"trials_per_cell", spec.trials_per_cell}};
}

std::size_t cell_count(const SweepSpec& spec) {
    return spec.axis1.values.size() * (spec.axis2 ? spec.axis2->values.size() : 1);
}

std::int64_t sweep_cost(const ExperimentConfig& config, const SweepSpec& spec) {
    return static_cast<std::int64_t>(cell_count(spec)) * spec.trials_per_cell * config.run.rounds *
           config.population_size();
}

std::vector<ExperimentConfig> resolve_cells(const ExperimentConfig& config, const SweepSpec& spec) {
    const std::size_t cols = spec.axis2 ? spec.axis2->values.size() : 1;
    std::vector<ExperimentConfig> out;
    out.reserve(cell_count(spec));
    for (std::size_t i = 0; i < spec.axis1.values.size(); ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            auto cell = apply_override(config, spec.axis1.path, spec.axis1.values[i]);
            if (spec.axis2) {
                cell = apply_override(cell, spec.axis2->path, spec.axis2->values[j]);
            }
            cell.run.trials = spec.trials_per_cell;
            out.push_back(validate_config(std::move(cell)));
        }
    }
    return out;
}

SweepResult run_sweep(const ExperimentConfig& config, const SweepSpec& spec, bool force, RunOptions options) {
    const auto configs = resolve_cells(config, spec);
    const auto cost = sweep_cost(config, spec);
    if (!force && cost > config.run.budget_agent_rounds) {
        throw BudgetExceeded(cost, config.run.budget_agent_rounds);
    }
    const std::size_t rows = spec.axis1.values.size();
    const std::size_t cols = spec.axis2 ? spec.axis2->values.size() : 1;

    SweepResult result;
    result.spec = spec;
    result.success_grid.assign(rows, std::vector<double>(cols, 0.0));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const auto& cfg = configs[i * cols + j];
            SweepCell cell;
            cell.i = i;
            cell.j = j;
            cell.value1 = spec.axis1.values[i];
            cell.value2 = spec.axis2 ? spec.axis2->values[j] : Json();
            cell.result = run_experiment(cfg, Cell{i, j}, options);
            result.success_grid[i][j] = cell.result.success_probability;
            result.cells.push_back(std::move(cell));
        }
    }

    auto numeric = [](const std::vector<Json>& values) {
        return std::all_of(values.begin(), values.end(), [](const Json& v) { return v.is_number(); });
    };
    if (spec.axis2 && numeric(spec.axis1.values) && numeric(spec.axis2->values)) {
        std::vector<double> a1;
        std::vector<double> a2;
        for (const auto& v : spec.axis1.values) a1.push_back(v.get<double>());
        for (const auto& v : spec.axis2->values) a2.push_back(v.get<double>());
        result.contour = diagnostics::failure_boundary(result.success_grid, a1, a2, config.diagnostics.success_threshold);
    }
    return result;
}

std::vector<ExperimentConfig> ablation_configs(const ExperimentConfig& config) {
    if (config.mechanism.mechanism != Mechanism::CG) {
        throw ConfigError(std::vector<ConfigIssue>{{"mechanism.name", "the ablation battery needs CG"}});
    }
    std::vector<ExperimentConfig> out(5, config);
    for (auto& c : out) {
        c.mechanism.ablations = Ablations{};
    }
    out[1].mechanism.ablations.no_credibility_update = true;
    out[2].mechanism.ablations.no_anti_bubble = true;
    out[3].mechanism.ablations.no_early_mover = true;
    out[4].mechanism.ablations.reward_basis_pi = true;
    return out;
}

std::vector<AblationVariant> run_ablation_battery(const ExperimentConfig& config, RunOptions options) {
    const auto configs = ablation_configs(config);
    std::vector<AblationVariant> out;
    for (std::size_t v = 0; v < configs.size(); ++v) {
        out.push_back({kAblationNames[v], run_experiment(configs[v], Cell{}, options)});
    }
    return out;
}

}  // namespace polis::runner
