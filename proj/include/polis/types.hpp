#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polis {

using TopicId = std::size_t;
using AgentId = std::size_t;

enum class Mechanism { CG, WS, SM, NG };

enum class Role { misaligned_majority, truth_minority, high_conviction_core, attacker };

enum class AttackerBehavior { constant_false, momentum_rider, noise_flooder };

std::string_view to_string(Mechanism m);
std::string_view to_string(Role r);
std::string_view to_string(AttackerBehavior b);

std::optional<Mechanism> parse_mechanism(std::string_view s);
std::optional<Role> parse_role(std::string_view s);
std::optional<AttackerBehavior> parse_attacker_behavior(std::string_view s);

/// Per-topic constants of the physical world.
struct TopicParams {
    std::string name;
    bool is_true = false;
    double baseline_velocity = 1.0;  // v_k
    double saturation_limit = 10.0;  // M_k
};

/// Constants shared by every topic's progress rule.
struct PhysicsParams {
    double accel_factor = 0.8;    // gamma, acceleration stage
    double late_factor = 0.4;     // gamma', saturation stage
    double threshold_low = 2.0;   // pi_1
    double threshold_high = 5.0;  // pi_2
    double env_noise_std = 0.1;   // sigma
};

struct WorldParams {
    std::vector<TopicParams> topics;
    PhysicsParams physics;

    std::size_t topic_count() const { return topics.size(); }
};

/// State a topic carries across both worlds.
struct TopicState {
    TopicId topic_id = 0;
    double progress = 0.0;         // cumulative pi
    double social_signal = 0.0;    // Theta
    double prev_allocation = 0.0;  // r of the previous round
    bool is_true_topic = false;
};

struct PersonaParams {
    double stability = 0.5;  // 1 means never switch
    double evidence_weight_physical = 1.0;
    double evidence_weight_social = 1.0;
    double confidence_rate = 0.2;
};

struct AgentState {
    AgentId agent_id = 0;
    TopicId belief = 0;
    double confidence = 0.5;
    double credibility = 1.0;
    double stake_balance = 1.0;
    PersonaParams persona;
    Role role = Role::misaligned_majority;
};

struct Ablations {
    bool no_credibility_update = false;
    bool no_anti_bubble = false;
    bool no_early_mover = false;
    bool reward_basis_pi = false;

    bool any() const {
        return no_credibility_update || no_anti_bubble || no_early_mover || reward_basis_pi;
    }
};

struct MechanismParams {
    Mechanism mechanism = Mechanism::CG;
    double lambda_influence = 2.0;
    double lambda_s = 0.4;
    double eta = 0.1;
    double kappa = 0.5;
    double gamma_bubble = 0.5;
    double sigmoid_slope = 5.0;
    double gamma_stake = 0.1;
    int stake_delay = 1;
    double stake_noise_std = 0.02;
    double credibility_min = 0.0;
    double credibility_max = 10.0;
    // Listed with the other CG constants but inert unless the switch is on.
    double beta_inconsistency = 0.3;
    bool apply_inconsistency_penalty = false;
    Ablations ablations;
};

/// Unified noise knob: the effective contamination and observation noise
/// are rho * nu and obs_noise_std * nu.
struct NoiseParams {
    double nu = 1.0;
    double rho = 0.2;
    double obs_noise_std = 0.05;
    // Observation noise also lands on the social signal agents see (never
    // under NG, which reports none).
    bool social_obs_noise = false;

    double effective_rho() const { return rho * nu; }
    double effective_obs_std() const { return obs_noise_std * nu; }
};

struct ShockSpec {
    int start_round = 1;
    int end_round = 1;
    double magnitude = 0.0;
    TopicId target_topic = 0;

    bool active(int round) const { return round >= start_round && round <= end_round; }
};

struct AttackerSpec {
    AttackerBehavior behavior = AttackerBehavior::constant_false;
    double fraction = 0.0;
};

struct PopulationGroup {
    Role role = Role::misaligned_majority;
    int count = 0;
    TopicId initial_belief = 0;
    PersonaParams persona;
};

/// Knobs of the parametric agent policy.
struct PolicyParams {
    double switch_slope = 4.0;
    // Emulation of explicit credibility prompting; not faithful to an LLM
    // instruction change. Adds prompting_boost to the social evidence weight
    // under CG only.
    bool credibility_prompting = false;
    double prompting_boost = 0.25;
};

struct DiagnosticsParams {
    double lockin_threshold = 0.7;
    int early_window = 10;
    double correction_margin = 0.05;
    double success_threshold = 0.5;
};

struct RunParams {
    std::string experiment_id = "experiment";
    int rounds = 30;
    int trials = 10;
    std::uint64_t base_seed = 20240601;
    std::string output_dir = "polis_out";
    int jobs = 0;  // 0 selects hardware concurrency
    std::int64_t budget_agent_rounds = 200000;
    bool write_round_logs = true;
};

struct ExperimentConfig {
    WorldParams world;
    std::vector<PopulationGroup> population;
    PolicyParams policy;
    MechanismParams mechanism;
    NoiseParams noise;
    std::optional<ShockSpec> shock;
    std::optional<AttackerSpec> attacker;
    DiagnosticsParams diagnostics;
    RunParams run;

    int population_size() const;
    TopicId true_topic() const;
    /// Lowest-id topic that is not the true topic.
    TopicId false_topic() const;
};

/// Raised when a governance step breaks the allocation contract or a state
/// value stops being finite.
class ProtocolError : public std::runtime_error {
public:
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polis
