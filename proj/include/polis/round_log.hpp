#pragma once

#include <vector>

#include "polis/types.hpp"

namespace polis {

struct TopicRecord {
    double progress = 0.0;
    double delta_progress = 0.0;
    double social_signal = 0.0;
    double allocation = 0.0;
    double perceived = 0.0;  // pi-tilde the agents saw this round
    double support = 0.0;    // vote share
    double supporter_quality = 0.0;
    double bubble_penalty = 0.0;
};

struct AgentRecord {
    TopicId vote = 0;
    double confidence = 0.0;
    double weight = 0.0;
    double normalized_weight = 0.0;
    double credibility = 0.0;
    double stake = 0.0;
    bool switched = false;
};

/// Everything one round produced. Agents are in agent_id order.
struct RoundLog {
    int trial = 0;
    int round = 0;
    std::vector<TopicRecord> topics;
    std::vector<AgentRecord> agents;
    double support_true = 0.0;
    double influence_share_true = 0.0;
    double herfindahl = 0.0;
};

}  // namespace polis
