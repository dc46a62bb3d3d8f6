#include "polis/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polis::agents {

double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::vector<double> min_max(std::span<const double> values) {
    std::vector<double> out(values.size(), 0.5);
    if (values.empty()) {
        return out;
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double range = *hi - *lo;
    if (!(range > 0.0)) {
        return out;
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        out[k] = (values[k] - *lo) / range;
    }
    return out;
}

std::vector<double> evidence_scores(std::span<const PerceivedSignal> signals, const PersonaParams& persona) {
    std::vector<double> progress;
    std::vector<double> social;
    progress.reserve(signals.size());
    social.reserve(signals.size());
    for (const auto& s : signals) {
        progress.push_back(s.noisy_progress);
        social.push_back(s.social_signal);
    }
    const auto zp = min_max(progress);
    const auto zs = min_max(social);
    std::vector<double> scores(signals.size());
    for (std::size_t k = 0; k < signals.size(); ++k) {
        scores[k] = persona.evidence_weight_physical * zp[k] + persona.evidence_weight_social * zs[k];
    }
    return scores;
}

TopicId best_topic(std::span<const double> scores) {
    TopicId best = 0;
    for (TopicId k = 1; k < scores.size(); ++k) {
        if (scores[k] > scores[best]) {
            best = k;
        }
    }
    return best;
}

double switch_probability(double gap, double stability, double slope) {
    if (!(gap > 0.0)) {
        return 0.0;
    }
    return (1.0 - stability) * logistic(slope * gap);
}

BeliefUpdate update_belief(const AgentState& agent, std::span<const double> scores, double switch_slope,
                           double uniform_draw) {
    BeliefUpdate out;
    out.belief = agent.belief;
    const TopicId best = best_topic(scores);
    const double gap = scores[best] - scores[agent.belief];
    out.switch_probability = switch_probability(gap, agent.persona.stability, switch_slope);
    if (uniform_draw < out.switch_probability) {
        out.belief = best;
        out.confidence = 0.5;
        out.switched = true;
        return out;
    }
    out.confidence = std::clamp(agent.confidence + agent.persona.confidence_rate * (scores[agent.belief] - 0.5),
                                kMinConfidence, kMaxConfidence);
    return out;
}

BeliefUpdate update_belief(const AgentState& agent, std::span<const double> scores, double switch_slope,
                           rng::Stream& stream) {
    return update_belief(agent, scores, switch_slope, stream.uniform());
}

TopicId attacker_vote(const AgentState& agent, AttackerBehavior behavior, std::span<const double> last_theta_delta,
                      TopicId false_topic, rng::Stream& stream) {
    if (agent.role != Role::attacker) {
        throw std::logic_error("attacker_vote called for a non-attacker agent");
    }
    switch (behavior) {
        case AttackerBehavior::constant_false:
            return false_topic;
        case AttackerBehavior::momentum_rider:
            return best_topic(last_theta_delta);
        case AttackerBehavior::noise_flooder:
            return static_cast<TopicId>(stream.below(last_theta_delta.size()));
    }
    return false_topic;
}

BeliefUpdate ParametricPolicy::decide(const AgentState& agent, const DecisionContext& ctx, rng::Stream& stream) const {
    if (agent.role == Role::attacker) {
        BeliefUpdate out;
        out.belief = attacker_vote(agent, attacker_behavior_.value_or(AttackerBehavior::constant_false),
                                   ctx.last_theta_delta, ctx.false_topic, stream);
        out.confidence = 1.0;
        out.switched = out.belief != agent.belief;
        return out;
    }
    PersonaParams persona = agent.persona;
    if (params_.credibility_prompting && ctx.mechanism == Mechanism::CG) {
        persona.evidence_weight_social += params_.prompting_boost;
    }
    const auto scores = evidence_scores(ctx.signals, persona);
    return update_belief(agent, scores, params_.switch_slope, stream);
}

}  // namespace polis::agents
