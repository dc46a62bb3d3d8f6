#include "polis/governance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polis/agents.hpp"

namespace polis::governance {

double clamp_credibility(double credibility, const MechanismParams& params) {
    return std::clamp(credibility, params.credibility_min, params.credibility_max);
}

double influence_weight(const MechanismParams& params, double confidence, double credibility, double visible_stake) {
    switch (params.mechanism) {
        case Mechanism::CG:
            return confidence * std::exp(params.lambda_influence * clamp_credibility(credibility, params));
        case Mechanism::WS:
            return confidence * visible_stake;
        case Mechanism::SM:
        case Mechanism::NG:
            return 1.0;
    }
    return 1.0;
}

std::vector<double> influence_weights(std::span<const AgentState> agents, std::span<const double> visible_stakes,
                                      const MechanismParams& params) {
    if (params.mechanism == Mechanism::WS && visible_stakes.size() != agents.size()) {
        throw ProtocolError("influence_weights: WS needs one visible stake per agent");
    }
    std::vector<double> w(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const double stake = params.mechanism == Mechanism::WS ? visible_stakes[i] : 0.0;
        w[i] = influence_weight(params, agents[i].confidence, agents[i].credibility, stake);
    }
    return w;
}

std::vector<double> aggregate(std::span<const TopicId> votes, std::span<const double> weights,
                              std::size_t topic_count) {
    if (votes.size() != weights.size()) {
        throw ProtocolError("aggregate: votes and weights differ in length");
    }
    std::vector<double> r(topic_count, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < votes.size(); ++i) {
        if (votes[i] >= topic_count) {
            throw ProtocolError("aggregate: vote for unknown topic " + std::to_string(votes[i]));
        }
        r[votes[i]] += weights[i];
        total += weights[i];
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw ProtocolError("aggregate: total influence weight is not positive and finite");
    }
    for (auto& share : r) {
        share /= total;
    }
    return r;
}

std::vector<double> supporter_quality(std::span<const TopicId> votes, std::span<const double> credibilities,
                                      std::size_t topic_count) {
    std::vector<double> sum(topic_count, 0.0);
    std::vector<std::size_t> count(topic_count, 0);
    for (std::size_t i = 0; i < votes.size(); ++i) {
        sum[votes[i]] += credibilities[i];
        ++count[votes[i]];
    }
    std::vector<double> q(topic_count, 0.0);
    for (std::size_t k = 0; k < topic_count; ++k) {
        if (count[k] > 0) {
            q[k] = sum[k] / static_cast<double>(count[k]);
        }
    }
    return q;
}

double anti_bubble(double r_t, double r_prev, double qbar, const MechanismParams& params) {
    if (params.ablations.no_anti_bubble) {
        return 0.0;
    }
    return agents::logistic(params.sigmoid_slope * (r_t - r_prev)) * (1.0 - qbar);
}

double cg_update_theta(double theta_prev, double r_t, double r_prev, double qbar, double bubble,
                       const MechanismParams& params) {
    return (1.0 - params.lambda_s) * theta_prev +
           params.lambda_s * ((r_t - r_prev) * qbar - params.gamma_bubble * bubble);
}

std::vector<double> cg_update_credibility(std::span<const double> credibilities, std::span<const TopicId> votes,
                                          std::span<const double> theta_t, std::span<const double> theta_prev,
                                          std::span<const double> r_t, std::span<const double> delta_pi,
                                          const MechanismParams& params) {
    std::vector<double> out(credibilities.begin(), credibilities.end());
    if (params.ablations.no_credibility_update) {
        return out;
    }
    const double kappa = params.ablations.no_early_mover ? 0.0 : params.kappa;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const TopicId a = votes[i];
        const double reward = params.ablations.reward_basis_pi ? delta_pi[a] : theta_t[a] - theta_prev[a];
        out[i] = clamp_credibility(out[i] + params.eta * reward * std::exp(-kappa * r_t[a]), params);
    }
    return out;
}

std::vector<double> ws_update_stakes(std::span<const double> balances, std::span<const TopicId> votes,
                                     std::span<const double> weights, std::span<const double> delta_pi,
                                     std::span<const double> friction_noise, const MechanismParams& params) {
    std::vector<double> out(balances.size());
    for (std::size_t i = 0; i < balances.size(); ++i) {
        const double noise = friction_noise.empty() ? 0.0 : friction_noise[i];
        out[i] = std::max(0.0, balances[i] + params.gamma_stake * weights[i] * delta_pi[votes[i]] + noise);
    }
    return out;
}

double inconsistency_penalty(double credibility, const MechanismParams& params) {
    return credibility - params.beta_inconsistency * credibility;
}

Governance::Governance(MechanismParams params, std::span<const AgentState> initial_agents)
    : params_(params) {
    std::vector<double> balances;
    balances.reserve(initial_agents.size());
    for (const auto& a : initial_agents) {
        balances.push_back(a.stake_balance);
    }
    stake_window_.push_back(std::move(balances));
}

Allocation Governance::allocate(std::span<const AgentState> agents, std::size_t topic_count) const {
    Allocation out;
    out.votes.reserve(agents.size());
    for (const auto& a : agents) {
        out.votes.push_back(a.belief);
    }
    out.weights = influence_weights(agents, visible_stakes(), params_);
    double total = 0.0;
    for (double w : out.weights) {
        total += w;
    }
    out.normalized_weights.resize(out.weights.size());
    for (std::size_t i = 0; i < out.weights.size(); ++i) {
        out.normalized_weights[i] = out.weights[i] / total;
    }
    out.allocations = aggregate(out.votes, out.weights, topic_count);
    return out;
}

GovernanceOutcome Governance::settle(std::span<TopicState> topics, std::span<AgentState> agents,
                                     const Allocation& allocation, std::span<const double> delta_pi,
                                     std::span<const double> stake_noise) {
    const std::size_t k_count = topics.size();
    GovernanceOutcome out;
    if (allocation.allocations.size() != k_count) {
        throw ProtocolError("governance: allocation does not cover every topic");
    }
    out.allocations = allocation.allocations;
    out.weight_snapshot = allocation.weights;
    out.normalized_weights = allocation.normalized_weights;

    double total = 0.0;
    for (double r : out.allocations) {
        if (!(r >= 0.0)) {
            throw ProtocolError("governance: negative allocation");
        }
        total += r;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ProtocolError("governance: allocations sum to " + std::to_string(total));
    }

    std::vector<double> theta_prev(k_count);
    std::vector<double> r_prev(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
        theta_prev[k] = topics[k].social_signal;
        r_prev[k] = topics[k].prev_allocation;
    }
    out.new_social_signals.assign(k_count, 0.0);

    switch (params_.mechanism) {
        case Mechanism::CG: {
            std::vector<double> cred(agents.size());
            for (std::size_t i = 0; i < agents.size(); ++i) {
                cred[i] = agents[i].credibility;
            }
            out.supporter_quality = supporter_quality(allocation.votes, cred, k_count);
            out.bubble_penalty.resize(k_count);
            for (std::size_t k = 0; k < k_count; ++k) {
                out.bubble_penalty[k] =
                    anti_bubble(out.allocations[k], r_prev[k], out.supporter_quality[k], params_);
                out.new_social_signals[k] = cg_update_theta(theta_prev[k], out.allocations[k], r_prev[k],
                                                            out.supporter_quality[k], out.bubble_penalty[k], params_);
            }
            const auto updated = cg_update_credibility(cred, allocation.votes, out.new_social_signals, theta_prev,
                                                       out.allocations, delta_pi, params_);
            for (std::size_t i = 0; i < agents.size(); ++i) {
                agents[i].credibility = updated[i];
            }
            break;
        }
        case Mechanism::WS: {
            out.new_social_signals = out.allocations;
            std::vector<double> balances(agents.size());
            for (std::size_t i = 0; i < agents.size(); ++i) {
                balances[i] = agents[i].stake_balance;
            }
            auto updated =
                ws_update_stakes(balances, allocation.votes, allocation.weights, delta_pi, stake_noise, params_);
            for (std::size_t i = 0; i < agents.size(); ++i) {
                agents[i].stake_balance = updated[i];
            }
            stake_window_.push_back(std::move(updated));
            while (stake_window_.size() > static_cast<std::size_t>(params_.stake_delay) + 1) {
                stake_window_.pop_front();
            }
            break;
        }
        case Mechanism::SM:
            out.new_social_signals = out.allocations;
            break;
        case Mechanism::NG:
            break;
    }

    for (std::size_t k = 0; k < k_count; ++k) {
        topics[k].social_signal = out.new_social_signals[k];
        topics[k].prev_allocation = out.allocations[k];
    }
    return out;
}

GovernanceOutcome Governance::step(std::span<TopicState> topics, std::span<AgentState> agents,
                                   std::span<const double> delta_pi, std::span<const double> stake_noise) {
    const auto allocation = allocate(agents, topics.size());
    return settle(topics, agents, allocation, delta_pi, stake_noise);
}

std::vector<double> stake_friction(const MechanismParams& params, std::size_t agent_count,
                                   const rng::StreamFactory& streams, int round) {
    std::vector<double> noise(agent_count, 0.0);
    if (params.mechanism != Mechanism::WS || !(params.stake_noise_std > 0.0)) {
        return noise;
    }
    for (std::size_t i = 0; i < agent_count; ++i) {
        noise[i] = params.stake_noise_std * streams.stream(rng::Purpose::stake, static_cast<std::uint64_t>(round), i).normal();
    }
    return noise;
}

}  // namespace polis::governance
