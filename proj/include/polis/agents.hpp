#pragma once

#include <memory>
#include <span>
#include <vector>

#include "polis/physical.hpp"
#include "polis/rng.hpp"
#include "polis/types.hpp"

namespace polis::agents {

using physical::PerceivedSignal;

double logistic(double x);

/// Min-max normalisation across topics; a constant vector maps to all 0.5.
std::vector<double> min_max(std::span<const double> values);

/// score_k = w_phys * z(pi-tilde)_k + w_soc * z(Theta)_k
std::vector<double> evidence_scores(std::span<const PerceivedSignal> signals, const PersonaParams& persona);

/// Highest score, ties to the lowest topic id.
TopicId best_topic(std::span<const double> scores);

/// (1 - stability) * logistic(slope * gap) for a positive gap, else 0.
double switch_probability(double gap, double stability, double slope);

struct BeliefUpdate {
    TopicId belief = 0;
    double confidence = 0.5;
    bool switched = false;
    double switch_probability = 0.0;
};

inline constexpr double kMinConfidence = 0.05;
inline constexpr double kMaxConfidence = 1.0;

/// One uniform draw decides the switch. A switch moves the agent to the
/// best-scoring topic with confidence 0.5; otherwise confidence drifts by
/// confidence_rate * (score_current - 0.5), clamped to [0.05, 1].
BeliefUpdate update_belief(const AgentState& agent, std::span<const double> scores, double switch_slope,
                           double uniform_draw);
BeliefUpdate update_belief(const AgentState& agent, std::span<const double> scores, double switch_slope,
                           rng::Stream& stream);

/// Vote of an attacker. constant_false targets `false_topic`, momentum_rider
/// picks the largest last-round Theta increase (ties to the lowest id),
/// noise_flooder picks uniformly. Throws std::logic_error for non-attackers.
TopicId attacker_vote(const AgentState& agent, AttackerBehavior behavior, std::span<const double> last_theta_delta,
                      TopicId false_topic, rng::Stream& stream);

/// Everything a policy may look at when choosing a vote.
struct DecisionContext {
    std::span<const PerceivedSignal> signals;
    std::span<const double> last_theta_delta;
    Mechanism mechanism = Mechanism::CG;
    TopicId false_topic = 0;
};

/// Extension point for replacing the parametric rule, e.g. with a
/// language-model adapter. decide() must be deterministic given the stream.
class AgentPolicy {
public:
    virtual ~AgentPolicy() = default;
    virtual BeliefUpdate decide(const AgentState& agent, const DecisionContext& ctx, rng::Stream& stream) const = 0;
};

/// The default logistic-choice policy, including attackers.
class ParametricPolicy final : public AgentPolicy {
public:
    ParametricPolicy(PolicyParams params, std::optional<AttackerBehavior> attacker_behavior)
        : params_(params), attacker_behavior_(attacker_behavior) {}

    BeliefUpdate decide(const AgentState& agent, const DecisionContext& ctx, rng::Stream& stream) const override;

private:
    PolicyParams params_;
    std::optional<AttackerBehavior> attacker_behavior_;
};

}  // namespace polis::agents
