#include "polis/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace polis {

namespace {

struct NamePair {
    std::string_view name;
    int value;
};

constexpr NamePair kMechanismNames[] = {
    {"CG", static_cast<int>(Mechanism::CG)},
    {"WS", static_cast<int>(Mechanism::WS)},
    {"SM", static_cast<int>(Mechanism::SM)},
    {"NG", static_cast<int>(Mechanism::NG)},
};

constexpr NamePair kRoleNames[] = {
    {"misaligned_majority", static_cast<int>(Role::misaligned_majority)},
    {"truth_minority", static_cast<int>(Role::truth_minority)},
    {"high_conviction_core", static_cast<int>(Role::high_conviction_core)},
    {"attacker", static_cast<int>(Role::attacker)},
};

constexpr NamePair kBehaviorNames[] = {
    {"constant_false", static_cast<int>(AttackerBehavior::constant_false)},
    {"momentum_rider", static_cast<int>(AttackerBehavior::momentum_rider)},
    {"noise_flooder", static_cast<int>(AttackerBehavior::noise_flooder)},
};

template <typename Enum, std::size_t N>
std::string_view name_of(const NamePair (&table)[N], Enum value) {
    for (const auto& entry : table) {
        if (entry.value == static_cast<int>(value)) {
            return entry.name;
        }
    }
    return "?";
}

template <typename Enum, std::size_t N>
std::optional<Enum> value_of(const NamePair (&table)[N], std::string_view name) {
    for (const auto& entry : table) {
        if (entry.name == name) {
            return static_cast<Enum>(entry.value);
        }
    }
    return std::nullopt;
}

PersonaParams default_persona(Role role) {
    PersonaParams p;
    switch (role) {
        case Role::misaligned_majority:
        case Role::truth_minority:
            p.stability = 0.5;
            break;
        case Role::high_conviction_core:
            p.stability = 0.95;
            break;
        case Role::attacker:
            p.stability = 1.0;
            break;
    }
    return p;
}

// Reads fields of one JSON object, recording type errors and, on finish(),
// any key that was never asked for.
class Reader {
public:
    Reader(const Json& node, std::string path, std::vector<ConfigIssue>& issues)
        : node_(node), path_(std::move(path)), issues_(issues) {
        if (!node_.is_object()) {
            issues_.push_back({path_, "expected an object"});
        }
    }

    bool valid() const { return node_.is_object(); }

    std::string field_path(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    const Json* find(std::string_view key) {
        if (!valid()) {
            return nullptr;
        }
        seen_.insert(std::string(key));
        auto it = node_.find(std::string(key));
        return it == node_.end() ? nullptr : &*it;
    }

    void number(std::string_view key, double& out) {
        if (const Json* v = find(key)) {
            if (v->is_number()) {
                out = v->get<double>();
            } else {
                issues_.push_back({field_path(key), "expected a number"});
            }
        }
    }

    template <typename Int>
    void integer(std::string_view key, Int& out) {
        if (const Json* v = find(key)) {
            if (v->is_number_integer()) {
                if constexpr (std::is_unsigned_v<Int>) {
                    if (v->is_number_unsigned()) {
                        out = v->get<Int>();
                    } else {
                        issues_.push_back({field_path(key), "expected a non-negative integer"});
                    }
                } else {
                    out = v->get<Int>();
                }
            } else if (v->is_number_float() && std::floor(v->get<double>()) == v->get<double>()) {
                out = static_cast<Int>(v->get<double>());
            } else {
                issues_.push_back({field_path(key), "expected an integer"});
            }
        }
    }

    void boolean(std::string_view key, bool& out) {
        if (const Json* v = find(key)) {
            if (v->is_boolean()) {
                out = v->get<bool>();
            } else {
                issues_.push_back({field_path(key), "expected true or false"});
            }
        }
    }

    void string(std::string_view key, std::string& out) {
        if (const Json* v = find(key)) {
            if (v->is_string()) {
                out = v->get<std::string>();
            } else {
                issues_.push_back({field_path(key), "expected a string"});
            }
        }
    }

    void finish() {
        if (!valid()) {
            return;
        }
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.count(key)) {
                issues_.push_back({field_path(key), "unknown key"});
            }
        }
    }

private:
    const Json& node_;
    std::string path_;
    std::vector<ConfigIssue>& issues_;
    std::set<std::string> seen_;
};

std::optional<TopicId> topic_by_name(const WorldParams& world, std::string_view name) {
    for (TopicId k = 0; k < world.topics.size(); ++k) {
        if (world.topics[k].name == name) {
            return k;
        }
    }
    return std::nullopt;
}

void read_persona(Reader& r, PersonaParams& p) {
    r.number("stability", p.stability);
    r.number("evidence_weight_physical", p.evidence_weight_physical);
    r.number("evidence_weight_social", p.evidence_weight_social);
    r.number("confidence_rate", p.confidence_rate);
}

void read_world(const Json& node, WorldParams& world, std::vector<ConfigIssue>& issues) {
    Reader r(node, "world", issues);
    if (const Json* topics = r.find("topics")) {
        if (!topics->is_array()) {
            issues.push_back({"world.topics", "expected a list"});
        } else {
            world.topics.clear();
            for (std::size_t i = 0; i < topics->size(); ++i) {
                TopicParams t;
                t.name = "T" + std::to_string(i);
                Reader tr((*topics)[i], "world.topics." + std::to_string(i), issues);
                tr.string("name", t.name);
                tr.boolean("is_true", t.is_true);
                tr.number("baseline_velocity", t.baseline_velocity);
                tr.number("saturation_limit", t.saturation_limit);
                tr.finish();
                world.topics.push_back(std::move(t));
            }
        }
    }
    r.number("accel_factor", world.physics.accel_factor);
    r.number("late_factor", world.physics.late_factor);
    r.number("threshold_low", world.physics.threshold_low);
    r.number("threshold_high", world.physics.threshold_high);
    r.number("env_noise_std", world.physics.env_noise_std);
    r.finish();
}

void read_topic_ref(Reader& r, std::string_view key, const WorldParams& world, TopicId& out,
                    std::vector<ConfigIssue>& issues) {
    if (const Json* v = r.find(key)) {
        if (v->is_string()) {
            if (auto id = topic_by_name(world, v->get<std::string>())) {
                out = *id;
            } else {
                issues.push_back({r.field_path(key), "unknown topic '" + v->get<std::string>() + "'"});
            }
        } else if (v->is_number_unsigned()) {
            out = v->get<TopicId>();
        } else {
            issues.push_back({r.field_path(key), "expected a topic name"});
        }
    }
}

void read_population(const Json& node, ExperimentConfig& cfg, std::vector<ConfigIssue>& issues) {
    Reader r(node, "population", issues);
    if (const Json* groups = r.find("groups")) {
        if (!groups->is_array()) {
            issues.push_back({"population.groups", "expected a list"});
        } else {
            cfg.population.clear();
            for (std::size_t i = 0; i < groups->size(); ++i) {
                const std::string path = "population.groups." + std::to_string(i);
                PopulationGroup g;
                Reader gr((*groups)[i], path, issues);
                if (const Json* role = gr.find("role")) {
                    auto parsed = role->is_string() ? parse_role(role->get<std::string>()) : std::nullopt;
                    if (parsed) {
                        g.role = *parsed;
                    } else {
                        issues.push_back({path + ".role", "unknown role"});
                    }
                } else {
                    issues.push_back({path + ".role", "missing"});
                }
                g.persona = default_persona(g.role);
                gr.integer("count", g.count);
                read_topic_ref(gr, "initial_belief", cfg.world, g.initial_belief, issues);
                read_persona(gr, g.persona);
                gr.finish();
                cfg.population.push_back(g);
            }
        }
    }
    r.number("switch_slope", cfg.policy.switch_slope);
    r.boolean("credibility_prompting", cfg.policy.credibility_prompting);
    r.number("prompting_boost", cfg.policy.prompting_boost);
    r.finish();
}

void read_mechanism(const Json& node, MechanismParams& m, std::vector<ConfigIssue>& issues) {
    Reader r(node, "mechanism", issues);
    if (const Json* name = r.find("name")) {
        auto parsed = name->is_string() ? parse_mechanism(name->get<std::string>()) : std::nullopt;
        if (parsed) {
            m.mechanism = *parsed;
        } else {
            issues.push_back({"mechanism.name", "unknown mechanism '" + name->dump() + "'"});
        }
    }
    r.number("lambda", m.lambda_influence);
    r.number("lambda_s", m.lambda_s);
    r.number("eta", m.eta);
    r.number("kappa", m.kappa);
    r.number("gamma_bubble", m.gamma_bubble);
    r.number("sigmoid_slope", m.sigmoid_slope);
    r.number("gamma_stake", m.gamma_stake);
    r.integer("stake_delay", m.stake_delay);
    r.number("stake_noise_std", m.stake_noise_std);
    r.number("credibility_min", m.credibility_min);
    r.number("credibility_max", m.credibility_max);
    r.number("beta_inconsistency", m.beta_inconsistency);
    r.boolean("apply_inconsistency_penalty", m.apply_inconsistency_penalty);
    if (const Json* ab = r.find("ablations")) {
        Reader ar(*ab, "mechanism.ablations", issues);
        ar.boolean("no_credibility_update", m.ablations.no_credibility_update);
        ar.boolean("no_anti_bubble", m.ablations.no_anti_bubble);
        ar.boolean("no_early_mover", m.ablations.no_early_mover);
        ar.boolean("reward_basis_pi", m.ablations.reward_basis_pi);
        ar.finish();
    }
    r.finish();
}

void read_noise(const Json& node, NoiseParams& n, std::vector<ConfigIssue>& issues) {
    Reader r(node, "noise", issues);
    r.number("nu", n.nu);
    r.number("rho", n.rho);
    r.number("obs_noise_std", n.obs_noise_std);
    r.boolean("social_obs_noise", n.social_obs_noise);
    r.finish();
}

void read_shock(const Json& node, ExperimentConfig& cfg, std::vector<ConfigIssue>& issues) {
    if (node.is_null()) {
        cfg.shock.reset();
        return;
    }
    ShockSpec s;
    s.target_topic = cfg.false_topic();
    Reader r(node, "shock", issues);
    r.integer("start_round", s.start_round);
    r.integer("end_round", s.end_round);
    r.number("magnitude", s.magnitude);
    read_topic_ref(r, "target_topic", cfg.world, s.target_topic, issues);
    r.finish();
    cfg.shock = s;
}

void read_attacker(const Json& node, ExperimentConfig& cfg, std::vector<ConfigIssue>& issues) {
    if (node.is_null()) {
        cfg.attacker.reset();
        return;
    }
    AttackerSpec a;
    Reader r(node, "attacker", issues);
    if (const Json* b = r.find("behavior")) {
        auto parsed = b->is_string() ? parse_attacker_behavior(b->get<std::string>()) : std::nullopt;
        if (parsed) {
            a.behavior = *parsed;
        } else {
            issues.push_back({"attacker.behavior", "unknown attacker behavior"});
        }
    }
    r.number("fraction", a.fraction);
    r.finish();
    cfg.attacker = a;
}

void read_diagnostics(const Json& node, DiagnosticsParams& d, std::vector<ConfigIssue>& issues) {
    Reader r(node, "diagnostics", issues);
    r.number("lockin_threshold", d.lockin_threshold);
    r.integer("early_window", d.early_window);
    r.number("correction_margin", d.correction_margin);
    r.number("success_threshold", d.success_threshold);
    r.finish();
}

void read_run(const Json& node, RunParams& run, std::vector<ConfigIssue>& issues) {
    Reader r(node, "run", issues);
    r.string("experiment_id", run.experiment_id);
    r.integer("rounds", run.rounds);
    r.integer("trials", run.trials);
    r.integer("base_seed", run.base_seed);
    r.string("output_dir", run.output_dir);
    r.integer("jobs", run.jobs);
    r.integer("budget_agent_rounds", run.budget_agent_rounds);
    r.boolean("write_round_logs", run.write_round_logs);
    r.finish();
}

void check_persona(const PersonaParams& p, const std::string& path, std::vector<ConfigIssue>& issues) {
    if (!(p.stability >= 0.0 && p.stability <= 1.0)) {
        issues.push_back({path + ".stability", "must lie in [0, 1]"});
    }
    if (!(p.evidence_weight_physical >= 0.0)) {
        issues.push_back({path + ".evidence_weight_physical", "must be >= 0"});
    }
    if (!(p.evidence_weight_social >= 0.0)) {
        issues.push_back({path + ".evidence_weight_social", "must be >= 0"});
    }
    if (!(p.confidence_rate > 0.0 && p.confidence_rate <= 1.0)) {
        issues.push_back({path + ".confidence_rate", "must lie in (0, 1]"});
    }
}

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto dot = path.find('.', start);
        if (dot == std::string_view::npos) {
            dot = path.size();
        }
        parts.emplace_back(path.substr(start, dot - start));
        start = dot + 1;
    }
    return parts;
}

std::string_view expand_alias(std::string_view path) {
    if (path == "mechanism") return "mechanism.name";
    if (path == "nu") return "noise.nu";
    if (path == "rounds") return "run.rounds";
    if (path == "trials") return "run.trials";
    if (path == "seed") return "run.base_seed";
    return path;
}

// Returns the addressed node in a resolved tree, or nullptr.
Json* resolve(Json& tree, const std::vector<std::string>& parts) {
    Json* node = &tree;
    for (const auto& part : parts) {
        if (node->is_object()) {
            auto it = node->find(part);
            if (it == node->end()) {
                return nullptr;
            }
            node = &*it;
        } else if (node->is_array()) {
            if (part.empty() || !std::all_of(part.begin(), part.end(), ::isdigit)) {
                return nullptr;
            }
            const auto index = std::stoul(part);
            if (index >= node->size()) {
                return nullptr;
            }
            node = &(*node)[index];
        } else {
            return nullptr;
        }
    }
    return node;
}

}  // namespace

std::string_view to_string(Mechanism m) { return name_of(kMechanismNames, m); }
std::string_view to_string(Role r) { return name_of(kRoleNames, r); }
std::string_view to_string(AttackerBehavior b) { return name_of(kBehaviorNames, b); }

std::optional<Mechanism> parse_mechanism(std::string_view s) { return value_of<Mechanism>(kMechanismNames, s); }
std::optional<Role> parse_role(std::string_view s) { return value_of<Role>(kRoleNames, s); }
std::optional<AttackerBehavior> parse_attacker_behavior(std::string_view s) {
    return value_of<AttackerBehavior>(kBehaviorNames, s);
}

int ExperimentConfig::population_size() const {
    int n = 0;
    for (const auto& g : population) {
        n += g.count;
    }
    return n;
}

TopicId ExperimentConfig::true_topic() const {
    for (TopicId k = 0; k < world.topics.size(); ++k) {
        if (world.topics[k].is_true) {
            return k;
        }
    }
    return 0;
}

TopicId ExperimentConfig::false_topic() const {
    for (TopicId k = 0; k < world.topics.size(); ++k) {
        if (!world.topics[k].is_true) {
            return k;
        }
    }
    return 0;
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "invalid config";
          for (const auto& issue : issues) {
              os << "\n  " << issue.path << ": " << issue.message;
          }
          return os.str();
      }()),
      issues_(std::move(issues)) {}

bool ConfigError::mentions(std::string_view path) const {
    return std::any_of(issues_.begin(), issues_.end(), [&](const ConfigIssue& i) { return i.path == path; });
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.world.topics = {
        TopicParams{"A", true, 1.0, 10.0},
        TopicParams{"B", false, 0.8, 8.0},
    };
    cfg.population = {
        PopulationGroup{Role::misaligned_majority, 70, 1, default_persona(Role::misaligned_majority)},
        PopulationGroup{Role::truth_minority, 20, 0, default_persona(Role::truth_minority)},
        PopulationGroup{Role::high_conviction_core, 10, 0, default_persona(Role::high_conviction_core)},
    };
    return cfg;
}

ExperimentConfig validate_config(ExperimentConfig config) {
    std::vector<ConfigIssue> issues;
    const auto& world = config.world;
    const auto& phys = world.physics;

    if (world.topics.size() < 2) {
        issues.push_back({"world.topics", "at least two topics are required"});
    }
    const auto true_count = std::count_if(world.topics.begin(), world.topics.end(),
                                          [](const TopicParams& t) { return t.is_true; });
    if (!world.topics.empty() && true_count != 1) {
        issues.push_back({"world.topics", "exactly one topic must be marked is_true"});
    }
    std::set<std::string> names;
    for (std::size_t k = 0; k < world.topics.size(); ++k) {
        const auto& t = world.topics[k];
        const std::string path = "world.topics." + std::to_string(k);
        if (!names.insert(t.name).second) {
            issues.push_back({path + ".name", "duplicate topic name '" + t.name + "'"});
        }
        if (!(t.baseline_velocity > 0.0)) {
            issues.push_back({path + ".baseline_velocity", "must be > 0"});
        }
        if (!(t.saturation_limit > 0.0)) {
            issues.push_back({path + ".saturation_limit", "must be > 0"});
        } else if (!(phys.threshold_high < t.saturation_limit)) {
            issues.push_back({path + ".saturation_limit", "must exceed threshold_high"});
        }
    }
    if (!(phys.threshold_low < phys.threshold_high)) {
        issues.push_back({"world.threshold_low", "thresholds out of order"});
    }
    if (!(phys.env_noise_std >= 0.0)) {
        issues.push_back({"world.env_noise_std", "must be >= 0"});
    }

    if (config.population.empty()) {
        issues.push_back({"population.groups", "population is empty"});
    }
    for (std::size_t i = 0; i < config.population.size(); ++i) {
        const auto& g = config.population[i];
        const std::string path = "population.groups." + std::to_string(i);
        if (g.count < 0) {
            issues.push_back({path + ".count", "must be >= 0"});
        }
        if (g.role == Role::attacker) {
            issues.push_back({path + ".role", "attackers are configured in the attacker section"});
        }
        if (g.initial_belief >= world.topics.size()) {
            issues.push_back({path + ".initial_belief", "unknown topic"});
        }
        check_persona(g.persona, path, issues);
    }
    if (!config.population.empty() && config.population_size() < 1) {
        issues.push_back({"population.groups", "population counts sum to zero"});
    }
    if (!(config.policy.switch_slope >= 0.0)) {
        issues.push_back({"population.switch_slope", "must be >= 0"});
    }
    if (!(config.policy.prompting_boost >= 0.0)) {
        issues.push_back({"population.prompting_boost", "must be >= 0"});
    }

    const auto& m = config.mechanism;
    if (!(m.lambda_s > 0.0 && m.lambda_s <= 1.0)) {
        issues.push_back({"mechanism.lambda_s", "must lie in (0, 1]"});
    }
    if (!(m.gamma_bubble >= 0.0)) {
        issues.push_back({"mechanism.gamma_bubble", "must be >= 0"});
    }
    if (!(m.sigmoid_slope > 0.0)) {
        issues.push_back({"mechanism.sigmoid_slope", "must be > 0"});
    }
    if (m.stake_delay < 0) {
        issues.push_back({"mechanism.stake_delay", "must be >= 0"});
    }
    if (!(m.stake_noise_std >= 0.0)) {
        issues.push_back({"mechanism.stake_noise_std", "must be >= 0"});
    }
    if (!(m.credibility_min < m.credibility_max)) {
        issues.push_back({"mechanism.credibility_min", "must be below credibility_max"});
    } else if (!(m.credibility_min <= 1.0 && 1.0 <= m.credibility_max)) {
        issues.push_back({"mechanism.credibility_min", "credibility range must contain the initial value 1"});
    }
    for (double v : {m.lambda_influence, m.eta, m.kappa, m.gamma_stake, m.beta_inconsistency}) {
        if (!std::isfinite(v)) {
            issues.push_back({"mechanism", "coefficients must be finite"});
            break;
        }
    }

    if (!(config.noise.nu >= 0.0)) {
        issues.push_back({"noise.nu", "must be >= 0"});
    }
    if (!(config.noise.obs_noise_std >= 0.0)) {
        issues.push_back({"noise.obs_noise_std", "must be >= 0"});
    }
    if (!std::isfinite(config.noise.rho)) {
        issues.push_back({"noise.rho", "must be finite"});
    }

    if (config.run.rounds < 1) {
        issues.push_back({"run.rounds", "must be >= 1"});
    }
    if (config.run.trials < 1) {
        issues.push_back({"run.trials", "must be >= 1"});
    }
    if (config.run.jobs < 0) {
        issues.push_back({"run.jobs", "must be >= 0"});
    }
    if (config.run.budget_agent_rounds < 0) {
        issues.push_back({"run.budget_agent_rounds", "must be >= 0"});
    }
    if (config.run.experiment_id.empty() ||
        config.run.experiment_id.find_first_of("/\\") != std::string::npos) {
        issues.push_back({"run.experiment_id", "must be a non-empty name without path separators"});
    }

    if (config.shock) {
        const auto& s = *config.shock;
        if (s.start_round < 1 || s.end_round < s.start_round || s.end_round > config.run.rounds) {
            issues.push_back({"shock", "shock window must lie within [1, rounds] with start <= end"});
        }
        if (s.target_topic >= world.topics.size()) {
            issues.push_back({"shock.target_topic", "unknown topic"});
        }
        if (!std::isfinite(s.magnitude)) {
            issues.push_back({"shock.magnitude", "must be finite"});
        }
    }
    if (config.attacker && !(config.attacker->fraction >= 0.0 && config.attacker->fraction <= 1.0)) {
        issues.push_back({"attacker.fraction", "must lie in [0, 1]"});
    }

    const auto& d = config.diagnostics;
    if (!(d.lockin_threshold > 0.0 && d.lockin_threshold < 1.0)) {
        issues.push_back({"diagnostics.lockin_threshold", "must lie in (0, 1)"});
    }
    if (d.early_window < 1) {
        issues.push_back({"diagnostics.early_window", "must be >= 1"});
    }
    if (!(d.correction_margin >= 0.0)) {
        issues.push_back({"diagnostics.correction_margin", "must be >= 0"});
    }
    if (!(d.success_threshold > 0.0 && d.success_threshold < 1.0)) {
        issues.push_back({"diagnostics.success_threshold", "must lie in (0, 1)"});
    }

    if (!issues.empty()) {
        throw ConfigError(std::move(issues));
    }
    return config;
}

ExperimentConfig config_from_json(const Json& tree) {
    ExperimentConfig cfg = default_config();
    std::vector<ConfigIssue> issues;
    Reader root(tree, "", issues);
    if (!root.valid()) {
        throw ConfigError(std::move(issues));
    }
    // World first: population and shock refer to topics by name.
    if (const Json* n = root.find("world")) read_world(*n, cfg.world, issues);
    if (const Json* n = root.find("population")) read_population(*n, cfg, issues);
    if (const Json* n = root.find("mechanism")) read_mechanism(*n, cfg.mechanism, issues);
    if (const Json* n = root.find("noise")) read_noise(*n, cfg.noise, issues);
    if (const Json* n = root.find("shock")) read_shock(*n, cfg, issues);
    if (const Json* n = root.find("attacker")) read_attacker(*n, cfg, issues);
    if (const Json* n = root.find("diagnostics")) read_diagnostics(*n, cfg.diagnostics, issues);
    if (const Json* n = root.find("run")) read_run(*n, cfg.run, issues);
    root.finish();
    if (!issues.empty()) {
        // Fields that failed to parse kept their defaults; report structural
        // problems of the rest in the same error.
        try {
            validate_config(cfg);
        } catch (const ConfigError& e) {
            issues.insert(issues.end(), e.issues().begin(), e.issues().end());
        }
        throw ConfigError(std::move(issues));
    }
    return validate_config(std::move(cfg));
}

Json config_to_json(const ExperimentConfig& c) {
    auto topic_name = [&](TopicId k) -> Json {
        if (k < c.world.topics.size()) {
            return c.world.topics[k].name;
        }
        return k;
    };

    Json topics = Json::array();
    for (const auto& t : c.world.topics) {
        topics.push_back({{"name", t.name},
                          {"is_true", t.is_true},
                          {"baseline_velocity", t.baseline_velocity},
                          {"saturation_limit", t.saturation_limit}});
    }
    Json groups = Json::array();
    for (const auto& g : c.population) {
        groups.push_back({{"role", to_string(g.role)},
                          {"count", g.count},
                          {"initial_belief", topic_name(g.initial_belief)},
                          {"stability", g.persona.stability},
                          {"evidence_weight_physical", g.persona.evidence_weight_physical},
                          {"evidence_weight_social", g.persona.evidence_weight_social},
                          {"confidence_rate", g.persona.confidence_rate}});
    }
    const auto& m = c.mechanism;

    Json out;
    out["world"] = {{"topics", topics},
                    {"accel_factor", c.world.physics.accel_factor},
                    {"late_factor", c.world.physics.late_factor},
                    {"threshold_low", c.world.physics.threshold_low},
                    {"threshold_high", c.world.physics.threshold_high},
                    {"env_noise_std", c.world.physics.env_noise_std}};
    out["population"] = {{"groups", groups},
                         {"switch_slope", c.policy.switch_slope},
                         {"credibility_prompting", c.policy.credibility_prompting},
                         {"prompting_boost", c.policy.prompting_boost}};
    out["mechanism"] = {{"name", to_string(m.mechanism)},
                        {"lambda", m.lambda_influence},
                        {"lambda_s", m.lambda_s},
                        {"eta", m.eta},
                        {"kappa", m.kappa},
                        {"gamma_bubble", m.gamma_bubble},
                        {"sigmoid_slope", m.sigmoid_slope},
                        {"gamma_stake", m.gamma_stake},
                        {"stake_delay", m.stake_delay},
                        {"stake_noise_std", m.stake_noise_std},
                        {"credibility_min", m.credibility_min},
                        {"credibility_max", m.credibility_max},
                        {"beta_inconsistency", m.beta_inconsistency},
                        {"apply_inconsistency_penalty", m.apply_inconsistency_penalty},
                        {"ablations",
                         {{"no_credibility_update", m.ablations.no_credibility_update},
                          {"no_anti_bubble", m.ablations.no_anti_bubble},
                          {"no_early_mover", m.ablations.no_early_mover},
                          {"reward_basis_pi", m.ablations.reward_basis_pi}}}};
    out["noise"] = {{"nu", c.noise.nu}, {"rho", c.noise.rho}, {"obs_noise_std", c.noise.obs_noise_std},
                    {"social_obs_noise", c.noise.social_obs_noise}};
    if (c.shock) {
        out["shock"] = {{"start_round", c.shock->start_round},
                        {"end_round", c.shock->end_round},
                        {"magnitude", c.shock->magnitude},
                        {"target_topic", topic_name(c.shock->target_topic)}};
    } else {
        out["shock"] = nullptr;
    }
    if (c.attacker) {
        out["attacker"] = {{"behavior", to_string(c.attacker->behavior)}, {"fraction", c.attacker->fraction}};
    } else {
        out["attacker"] = nullptr;
    }
    out["diagnostics"] = {{"lockin_threshold", c.diagnostics.lockin_threshold},
                          {"early_window", c.diagnostics.early_window},
                          {"correction_margin", c.diagnostics.correction_margin},
                          {"success_threshold", c.diagnostics.success_threshold}};
    out["run"] = {{"experiment_id", c.run.experiment_id},
                  {"rounds", c.run.rounds},
                  {"trials", c.run.trials},
                  {"base_seed", c.run.base_seed},
                  {"output_dir", c.run.output_dir},
                  {"jobs", c.run.jobs},
                  {"budget_agent_rounds", c.run.budget_agent_rounds},
                  {"write_round_logs", c.run.write_round_logs}};
    return out;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({{path.string(), "cannot open config file"}});
    }
    Json tree;
    try {
        tree = Json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const Json::parse_error& e) {
        throw ConfigError({{path.string(), std::string("parse error: ") + e.what()}});
    }
    // A run manifest carries its resolved config and can be fed back in.
    if (tree.is_object() && tree.contains("manifest_version") && tree.contains("config")) {
        return config_from_json(tree["config"]);
    }
    return config_from_json(tree);
}

std::string canonical_path(const ExperimentConfig& config, std::string_view path) {
    const std::string expanded(expand_alias(path));
    Json tree = config_to_json(config);
    if (expanded.empty() || resolve(tree, split_path(expanded)) == nullptr) {
        throw ConfigError({{std::string(path), "parameter path does not resolve"}});
    }
    return expanded;
}

ExperimentConfig apply_override(const ExperimentConfig& config, std::string_view path, const Json& value) {
    const std::string expanded = canonical_path(config, path);
    Json tree = config_to_json(config);
    *resolve(tree, split_path(expanded)) = value;
    return config_from_json(tree);
}

ExperimentConfig apply_override(const ExperimentConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError({{std::string(assignment), "override must look like key=value"}});
    }
    const auto key = assignment.substr(0, eq);
    const std::string raw(assignment.substr(eq + 1));
    Json value;
    try {
        value = Json::parse(raw);
    } catch (const Json::parse_error&) {
        value = raw;
    }
    return apply_override(config, key, value);
}

}  // namespace polis
