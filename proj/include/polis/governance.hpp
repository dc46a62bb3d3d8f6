#pragma once

#include <deque>
#include <span>
#include <vector>

#include "polis/rng.hpp"
#include "polis/types.hpp"

namespace polis::governance {

// ---------------------------------------------------------------------------
// Closed-form pieces. All of them are pure.
// ---------------------------------------------------------------------------

/// Credibility clamped to [credibility_min, credibility_max].
double clamp_credibility(double credibility, const MechanismParams& params);

/// CG: confidence * exp(lambda * c). WS: confidence * visible stake.
/// SM and NG: 1.
double influence_weight(const MechanismParams& params, double confidence, double credibility, double visible_stake);

/// One weight per agent. `visible_stakes` is only read under WS and must then
/// hold one balance per agent.
std::vector<double> influence_weights(std::span<const AgentState> agents, std::span<const double> visible_stakes,
                                      const MechanismParams& params);

/// r_k = sum of weights voting k / total weight. Throws ProtocolError when the
/// total is not positive and finite.
std::vector<double> aggregate(std::span<const TopicId> votes, std::span<const double> weights,
                              std::size_t topic_count);

/// Mean credibility of each topic's supporters; 0 for a topic nobody backs.
std::vector<double> supporter_quality(std::span<const TopicId> votes, std::span<const double> credibilities,
                                      std::size_t topic_count);

/// B = logistic(slope * (r - r_prev)) * (1 - qbar); 0 under the
/// no_anti_bubble ablation.
double anti_bubble(double r_t, double r_prev, double qbar, const MechanismParams& params);

/// Theta^t = (1 - lambda_s) Theta^{t-1} + lambda_s [ (r - r_prev) qbar - gamma_bubble B ]
double cg_update_theta(double theta_prev, double r_t, double r_prev, double qbar, double bubble,
                       const MechanismParams& params);

/// c^t = c^{t-1} + eta * reward * exp(-kappa * r_a), clamped. The reward is
/// Theta_a^t - Theta_a^{t-1}, or delta_pi_a under reward_basis_pi; kappa is 0
/// under no_early_mover; no_credibility_update returns the input unchanged.
std::vector<double> cg_update_credibility(std::span<const double> credibilities, std::span<const TopicId> votes,
                                          std::span<const double> theta_t, std::span<const double> theta_prev,
                                          std::span<const double> r_t, std::span<const double> delta_pi,
                                          const MechanismParams& params);

/// bal^t = max(0, bal^{t-1} + gamma_stake * w * delta_pi_a + friction_noise).
std::vector<double> ws_update_stakes(std::span<const double> balances, std::span<const TopicId> votes,
                                     std::span<const double> weights, std::span<const double> delta_pi,
                                     std::span<const double> friction_noise, const MechanismParams& params);

/// Optional, off by default: c <- c - beta * c on a belief switch.
double inconsistency_penalty(double credibility, const MechanismParams& params);

// ---------------------------------------------------------------------------
// Per-trial mechanism state.
// ---------------------------------------------------------------------------

struct Allocation {
    std::vector<TopicId> votes;
    std::vector<double> weights;             // w^{t-1} as used this round
    std::vector<double> normalized_weights;  // weights / sum
    std::vector<double> allocations;         // r^t
};

struct GovernanceOutcome {
    std::vector<double> allocations;
    std::vector<double> new_social_signals;
    std::vector<double> weight_snapshot;
    std::vector<double> normalized_weights;
    std::vector<double> supporter_quality;  // CG only, empty otherwise
    std::vector<double> bubble_penalty;     // CG only, empty otherwise
};

/// Owns what a mechanism remembers between rounds beyond TopicState: the
/// window of past stake balances that delayed visibility reads from.
class Governance {
public:
    Governance(MechanismParams params, std::span<const AgentState> initial_agents);

    const MechanismParams& params() const { return params_; }

    /// Balances whose weights are used this round: bal^{t-1-delay}, or the
    /// initial balances while fewer rounds have elapsed.
    std::span<const double> visible_stakes() const { return stake_window_.front(); }

    /// Weights and allocation r^t from the agents' current votes. Pure.
    Allocation allocate(std::span<const AgentState> agents, std::size_t topic_count) const;

    /// Social signal and attribute updates after the physical step. Writes
    /// Theta^t and r^t into `topics` and credibility / stake into `agents`.
    GovernanceOutcome settle(std::span<TopicState> topics, std::span<AgentState> agents, const Allocation& allocation,
                             std::span<const double> delta_pi, std::span<const double> stake_noise);

    /// allocate() followed by settle() with externally supplied increments.
    GovernanceOutcome step(std::span<TopicState> topics, std::span<AgentState> agents,
                           std::span<const double> delta_pi, std::span<const double> stake_noise);

private:
    MechanismParams params_;
    std::deque<std::vector<double>> stake_window_;
};

/// Stake friction draws for one round, keyed by (round, agent); all zero when
/// the mechanism is not WS or the friction std is 0.
std::vector<double> stake_friction(const MechanismParams& params, std::size_t agent_count,
                                   const rng::StreamFactory& streams, int round);

}  // namespace polis::governance
