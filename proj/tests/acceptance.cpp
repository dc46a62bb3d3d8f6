// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails. INFO lines are context, not criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli.hpp"
#include "oracles.hpp"
#include "polis/agents.hpp"
#include "polis/config.hpp"
#include "polis/diagnostics.hpp"
#include "polis/governance.hpp"
#include "polis/physical.hpp"
#include "polis/runner.hpp"

namespace fs = std::filesystem;
using namespace polis;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path source_dir() { return fs::path(POLIS_SOURCE_DIR); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ExperimentConfig with_mechanism(ExperimentConfig c, Mechanism m) {
    c.mechanism.mechanism = m;
    return validate_config(std::move(c));
}

const Mechanism kAll[] = {Mechanism::CG, Mechanism::WS, Mechanism::SM, Mechanism::NG};

// ---------------------------------------------------------------------------

Outcome determinism() {
    const auto root = fs::temp_directory_path() / fmt::format("polis_accept_{}", std::random_device{}());
    const std::vector<std::string> files{"summary.csv", "trajectory.csv", "diagnostics.csv", "aggregate.json",
                                         "rounds.jsonl", "manifest.json"};
    std::vector<std::string> first;
    double worst = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        fs::remove_all(root);
        std::ostringstream out, err;
        const auto t0 = Clock::now();
        const int code = cli::run_cli({"run", "--out", root.string(), "--set", "run.experiment_id=determinism"},
                                      out, err);
        worst = std::max(worst, seconds_since(t0));
        if (code != 0) {
            fs::remove_all(root);
            return {false, "run exited " + std::to_string(code) + ": " + err.str()};
        }
        for (std::size_t f = 0; f < files.size(); ++f) {
            const auto text = slurp(root / "determinism" / files[f]);
            if (pass == 0) {
                first.push_back(text);
            } else if (text != first[f]) {
                fs::remove_all(root);
                return {false, files[f] + " differs between invocations"};
            }
        }
    }
    fs::remove_all(root);
    const bool fast = worst < 10.0;
    return {fast, fmt::format("{} files identical (rounds.jsonl fnv1a {:016x}); slowest run {:.2f} s for N=100, "
                              "T=30, 10 trials (limit 10 s)",
                              files.size(), fnv1a(first[4]), worst)};
}

Outcome formula_suite() {
    const auto cfg = default_config();
    const auto& world = cfg.world;
    const auto& A = world.topics[0];
    MechanismParams cg;
    cg.mechanism = Mechanism::CG;
    MechanismParams ws;
    ws.mechanism = Mechanism::WS;
    NoiseParams noise;
    DiagnosticsParams dp;
    const std::vector<double> zero2{0.0, 0.0};
    const std::optional<ShockSpec> no_shock;

    struct Case {
        std::string name;
        double got;
        double want;
    };
    std::vector<Case> cases;
    cases.push_back({"acceleration increment", physical::progress_increment(2.0, 0.5, A, world.physics, 0.0), 1.12});
    cases.push_back({"saturation increment", physical::progress_increment(5.0, 1.0, A, world.physics, 0.0), 0.2});
    {
        std::vector<TopicState> t{TopicState{0, 3.0, 0.5, 0.0, true}, TopicState{1, 1.0, 0.0, 0.0, false}};
        cases.push_back({"contaminated perception",
                         physical::build_perception(t, Mechanism::CG, noise, no_shock, 1, zero2)[0].noisy_progress,
                         3.1});
        NoiseParams quiet = noise;
        quiet.nu = 0.0;
        const ShockSpec shock{1, 3, 2.0, 1};
        cases.push_back({"shocked perception",
                         physical::build_perception(t, Mechanism::CG, quiet, shock, 2, zero2)[1].noisy_progress, 3.0});
        std::vector<TopicState> t2{TopicState{0, 2.0, 0.0, 0.0, true}, TopicState{1, 2.0, 0.0, 0.0, false}};
        const auto step = physical::step_physical(t2, std::vector<double>{1.0, 0.0}, world, zero2);
        cases.push_back({"two-topic step (true)", step.progress[0], 2.0 + (1.0 + 0.8) * (1.0 - 2.0 / 10.0)});
        cases.push_back({"two-topic step (false)", step.progress[1], 2.6});
    }
    // Closed forms whose published values are rounded are compared with the
    // exact expression.
    cases.push_back({"CG weight 0.5 e^2", governance::influence_weight(cg, 0.5, 1.0, 0.0), 0.5 * std::exp(2.0)});
    cases.push_back({"WS weight", governance::influence_weight(ws, 0.5, 1.0, 1.0), 0.5});
    {
        const auto r = governance::aggregate(std::vector<TopicId>{0, 1}, std::vector<double>{3.0, 1.0}, 2);
        cases.push_back({"aggregate r_A", r[0], 0.75});
        cases.push_back({"aggregate r_B", r[1], 0.25});
        cases.push_back({"supporter quality",
                         governance::supporter_quality(std::vector<TopicId>{0, 0}, std::vector<double>{0.5, 1.5}, 2)[0],
                         1.0});
    }
    cases.push_back({"anti-bubble at zero change", governance::anti_bubble(0.3, 0.3, 0.0, cg), 0.5});
    cases.push_back({"anti-bubble 0.5 logistic(2)", governance::anti_bubble(0.7, 0.3, 0.5, cg),
                     0.5 / (1.0 + std::exp(-2.0))});
    cases.push_back({"theta decay", governance::cg_update_theta(0.5, 0.4, 0.4, 1.0, 0.0, cg), 0.3});
    cases.push_back({"theta growth", governance::cg_update_theta(0.0, 0.6, 0.4, 1.0, 0.0, cg), 0.08});
    cases.push_back({"theta bubble", governance::cg_update_theta(0.0, 0.4, 0.4, 0.0, 0.5, cg), -0.1});
    {
        const std::vector<TopicId> votes{0};
        const std::vector<double> c{1.0}, th{0.5, 0.0}, th_prev{0.0, 0.0};
        cases.push_back({"credibility gain at r=0",
                         governance::cg_update_credibility(c, votes, th, th_prev, std::vector<double>{0.0, 1.0}, zero2,
                                                           cg)[0] - 1.0,
                         0.05});
        cases.push_back({"credibility gain 0.05 e^-0.5",
                         governance::cg_update_credibility(c, votes, th, th_prev, std::vector<double>{1.0, 0.0}, zero2,
                                                           cg)[0] - 1.0,
                         0.05 * std::exp(-0.5)});
        cases.push_back({"stake update",
                         governance::ws_update_stakes(std::vector<double>{1.0}, votes, std::vector<double>{0.5},
                                                      std::vector<double>{1.12, 0.0}, {}, ws)[0],
                         1.056});
    }
    {
        PersonaParams persona;
        const std::vector<physical::PerceivedSignal> sig{{0, 2.0, 1.0}, {1, 4.0, 0.0}};
        const auto s = agents::evidence_scores(sig, persona);
        cases.push_back({"evidence score A", s[0], 1.0});
        cases.push_back({"evidence score B", s[1], 1.0});
        cases.push_back({"switch probability 0.5 logistic(2)", agents::switch_probability(0.5, 0.5, 4.0),
                         0.5 / (1.0 + std::exp(-2.0))});
    }
    {
        std::vector<AgentState> agents(100);
        for (AgentId i = 0; i < 100; ++i) {
            agents[i].agent_id = i;
            agents[i].belief = i < 30 ? 0 : 1;
        }
        MechanismParams sm;
        sm.mechanism = Mechanism::SM;
        std::vector<TopicState> topics{TopicState{0, 0, 0, 0.5, true}, TopicState{1, 0, 0, 0.5, false}};
        governance::Governance g(sm, agents);
        g.step(topics, agents, zero2, {});
        cases.push_back({"SM theta A", topics[0].social_signal, 0.3});
        cases.push_back({"SM theta B", topics[1].social_signal, 0.7});
    }
    cases.push_back({"herfindahl uniform N=100", diagnostics::herfindahl(std::vector<double>(100, 0.01)), 0.01});
    cases.push_back({"influence concentration", diagnostics::influence_concentration({{0.5, 0.5}, {1.0, 0.0}}), 0.75});
    cases.push_back({"path dependence", diagnostics::path_dependence(std::vector<double>{1.0, 0.0}), 0.25});
    {
        diagnostics::TopicSeries support(30, {0.4, 0.6});
        support[2] = {0.2, 0.8};
        const bool lock = diagnostics::early_lockin(support, 0, dp);
        cases.push_back({"early lock-in", lock ? 1.0 : 0.0, 1.0});
        diagnostics::TopicSeries s2(20, {0.3, 0.7}), ev(20, {0.0, 0.0});
        for (int t = 5; t <= 20; ++t) ev[t - 1] = {0.2, 0.0};
        for (int t = 9; t <= 20; ++t) s2[t - 1] = {0.8, 0.2};
        const auto lag = diagnostics::correction_lag(s2, ev, 0, dp);
        cases.push_back({"correction lag", static_cast<double>(lag.lag.value_or(-1)), 4.0});
    }
    {
        const std::vector<double> ax{0.0, 1.0};
        const auto c = diagnostics::failure_boundary({{1, 1}, {0, 0}}, ax, ax, 0.5);
        const bool ok = c.size() == 1 && c[0].size() == 2 && c[0][0].axis1 == 0.5 && c[0][1].axis1 == 0.5;
        cases.push_back({"contour hand case", ok ? 1.0 : 0.0, 1.0});
    }

    std::vector<std::string> bad;
    double worst = 0.0;
    for (const auto& c : cases) {
        const double err = std::abs(c.got - c.want);
        worst = std::max(worst, err);
        if (!(err <= 1e-9)) bad.push_back(fmt::format("{} got {} want {}", c.name, c.got, c.want));
    }
    if (!bad.empty()) {
        std::string d;
        for (const auto& b : bad) d += b + "; ";
        return {false, d};
    }
    return {true, fmt::format("{} closed-form cases within 1e-9 (max error {:.3g})", cases.size(), worst)};
}

Outcome simplex() {
    double worst = 0.0;
    double most_negative = 0.0;
    int rounds = 0;
    for (auto m : kAll) {
        auto c = default_config();
        c.run.rounds = 1000;
        c.run.trials = 1;
        for (double nu : {0.0, 1.0, 10.0}) {
            c.noise.nu = nu;
            const auto t = runner::run_trial(with_mechanism(c, m), 0);
            for (const auto& log : t.logs) {
                double s = 0.0;
                for (const auto& topic : log.topics) {
                    s += topic.allocation;
                    most_negative = std::min(most_negative, topic.allocation);
                }
                worst = std::max(worst, std::abs(s - 1.0));
                ++rounds;
            }
        }
    }
    const bool ok = worst <= 1e-9 && most_negative >= 0.0;
    return {ok, fmt::format("{} rounds over 4 mechanisms x 3 noise levels; max |sum r - 1| = {:.3g}, min r = {}",
                            rounds, worst, most_negative)};
}

Outcome cg_reductions() {
    // lambda = 0: CG weights are confidences, so r must equal the
    // confidence-weighted vote shares of the same round.
    double worst = 0.0;
    auto base = default_config();
    base.run.trials = 20;
    auto flat = base;
    flat.mechanism.lambda_influence = 0.0;
    const auto r0 = runner::run_experiment(with_mechanism(flat, Mechanism::CG));
    for (const auto& trial : r0.trials) {
        for (const auto& log : trial.logs) {
            std::vector<double> num(log.topics.size(), 0.0);
            double den = 0.0;
            for (const auto& a : log.agents) {
                num[a.vote] += a.confidence;
                den += a.confidence;
            }
            for (std::size_t k = 0; k < num.size(); ++k) {
                worst = std::max(worst, std::abs(log.topics[k].allocation - num[k] / den));
            }
        }
    }

    // eta = 0: credibility stays 1; supported topics have qbar = 1 and B = 0.
    auto frozen = base;
    frozen.mechanism.eta = 0.0;
    const auto r1 = runner::run_experiment(with_mechanism(frozen, Mechanism::CG));
    bool cred_ok = true;
    bool q_ok = true;
    bool b_ok = true;
    int supported = 0;
    int unsupported = 0;
    for (const auto& trial : r1.trials) {
        for (const auto& log : trial.logs) {
            for (const auto& a : log.agents) cred_ok = cred_ok && a.credibility == 1.0;
            for (const auto& topic : log.topics) {
                if (topic.support > 0.0) {
                    ++supported;
                    q_ok = q_ok && topic.supporter_quality == 1.0;
                    b_ok = b_ok && topic.bubble_penalty == 0.0;
                } else {
                    ++unsupported;
                }
            }
        }
    }
    // A topic nobody backs has qbar = 0 by convention, so its B is
    // logistic(slope * dr) there; the reduction is checked where qbar is a
    // mean over supporters.
    const bool ok = worst < 1e-9 && cred_ok && q_ok && b_ok;
    return {ok, fmt::format("lambda=0 max |r - confidence share| = {:.3g} over 20 seeds; eta=0 credibility==1 {}, "
                            "qbar==1 {} and B==0 {} on {} supported topic-rounds ({} topic-rounds without "
                            "supporters use the qbar=0 convention)",
                            worst, cred_ok, q_ok, b_ok, supported, unsupported)};
}

Outcome ablation_semantics() {
    auto base = default_config();
    base.run.trials = 10;
    const auto variants = runner::run_ablation_battery(validate_config(base));
    const auto& p = base.mechanism;
    const auto clamp = [&](double c) { return std::min(std::max(c, p.credibility_min), p.credibility_max); };

    // (a) credibility constant
    bool a_ok = true;
    for (const auto& t : variants[1].result.trials) {
        for (const auto& log : t.logs) {
            for (const auto& a : log.agents) a_ok = a_ok && a.credibility == 1.0;
        }
    }

    // (c) and (d): replay the credibility rule from the logged state.
    const auto replay = [&](const runner::ExperimentResult& r, bool pi_basis) {
        std::size_t mismatches = 0;
        std::size_t checked = 0;
        for (const auto& t : r.trials) {
            std::vector<double> cred(t.logs[0].agents.size(), 1.0);
            std::vector<double> theta_prev(t.logs[0].topics.size(), 0.0);
            for (const auto& log : t.logs) {
                for (std::size_t i = 0; i < cred.size(); ++i) {
                    const auto a = log.agents[i].vote;
                    double expected;
                    if (pi_basis) {
                        expected = clamp(cred[i] + p.eta * log.topics[a].delta_progress *
                                                       std::exp(-p.kappa * log.topics[a].allocation));
                    } else {
                        expected = clamp(cred[i] + p.eta * (log.topics[a].social_signal - theta_prev[a]));
                    }
                    mismatches += log.agents[i].credibility != expected;
                    ++checked;
                    cred[i] = log.agents[i].credibility;
                }
                for (std::size_t k = 0; k < theta_prev.size(); ++k) theta_prev[k] = log.topics[k].social_signal;
            }
        }
        return std::pair{mismatches, checked};
    };
    const auto [c_bad, c_n] = replay(variants[3].result, false);
    const auto [d_bad, d_n] = replay(variants[4].result, true);
    const bool names = variants[1].name == "no_credibility_update" && variants[3].name == "no_early_mover" &&
                       variants[4].name == "reward_basis_pi";
    const bool ok = names && a_ok && c_bad == 0 && d_bad == 0;
    return {ok, fmt::format("(a) constant credibility {}; (c) kappa=0 replay {} mismatches of {}; (d) delta-pi "
                            "replay {} mismatches of {}",
                            a_ok, c_bad, c_n, d_bad, d_n)};
}

Outcome diagnostics_oracles() {
    std::mt19937_64 gen(777);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DiagnosticsParams p;
    int mismatches = 0;
    int lockins = 0;
    int uncensored = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int T = 10 + static_cast<int>(gen() % 31);
        const std::size_t K = 2 + gen() % 3;
        const std::size_t N = 2 + gen() % 50;
        const std::size_t tt = gen() % K;
        diagnostics::TopicSeries support(T, std::vector<double>(K)), evidence(T, std::vector<double>(K));
        std::vector<std::vector<double>> weights(T, std::vector<double>(N));
        // A drifting leader makes lock-in and recovery both reachable.
        std::size_t leader = gen() % K;
        for (int t = 0; t < T; ++t) {
            if (u(gen) < 0.15) leader = gen() % K;
            double total = 0;
            for (std::size_t k = 0; k < K; ++k) total += (support[t][k] = u(gen) * (k == leader ? 8.0 : 1.0));
            for (auto& s : support[t]) s /= total;
            for (auto& e : evidence[t]) e = u(gen) * 0.6 - 0.3;
            double wt = 0;
            for (auto& w : weights[t]) wt += (w = std::pow(u(gen), 3.0));
            for (auto& w : weights[t]) w /= wt;
        }
        const bool lock = diagnostics::early_lockin(support, tt, p);
        mismatches += lock != oracle::early_lockin(support, tt, p.lockin_threshold, p.early_window);
        lockins += lock;
        const auto lag = diagnostics::correction_lag(support, evidence, tt, p);
        const auto ref = oracle::correction_lag(support, evidence, tt, p.lockin_threshold, p.correction_margin);
        mismatches += lag.evidence_round != ref.star || lag.lag != ref.lag ||
                      !(std::abs(lag.normalized - ref.normalized) <= 1e-12);
        uncensored += !lag.censored();
        mismatches +=
            !(std::abs(diagnostics::influence_concentration(weights) - oracle::influence_concentration(weights)) <=
              1e-12);
        std::vector<double> finals(2 + gen() % 30);
        for (auto& f : finals) f = u(gen);
        mismatches += !(std::abs(diagnostics::path_dependence(finals) - oracle::path_dependence(finals)) <= 1e-12);
    }

    // Herfindahl under SM and NG, every round.
    double worst = 0.0;
    int rounds = 0;
    for (auto m : {Mechanism::SM, Mechanism::NG}) {
        auto c = default_config();
        c.run.trials = 10;
        const auto r = runner::run_experiment(with_mechanism(c, m));
        for (const auto& t : r.trials) {
            for (const auto& log : t.logs) {
                const double n = static_cast<double>(log.agents.size());
                worst = std::max(worst, std::abs(log.herfindahl - 1.0 / n));
                ++rounds;
            }
        }
    }
    const bool ok = mismatches == 0 && worst == 0.0;
    return {ok, fmt::format("50 random trajectories: {} mismatches ({} lock-ins, {} uncensored lags); SM/NG "
                            "herfindahl max |H - 1/N| = {:.3g} over {} rounds",
                            mismatches, lockins, uncensored, worst, rounds)};
}

std::vector<double> mean_final(const ExperimentConfig& base, std::uint64_t seed, int trials) {
    std::vector<double> out;
    for (auto m : kAll) {
        auto c = base;
        c.run.base_seed = seed;
        c.run.trials = trials;
        out.push_back(runner::run_experiment(with_mechanism(c, m), {}, {0, false}).final_support.mean);
    }
    return out;
}

Outcome cg_advantage() {
    const auto cfg = load_config(source_dir() / "configs" / "cg_advantage.json");
    const auto t0 = Clock::now();
    const auto m = mean_final(cfg, cfg.run.base_seed, 20);
    const double elapsed = seconds_since(t0);
    const double margin = m[0] - std::max(m[1], m[2]);
    const bool ok = margin >= 0.05 && elapsed < 120.0;
    return {ok, fmt::format("mean final true support over 20 seeds: CG {:.4f}, WS {:.4f}, SM {:.4f}, NG {:.4f}; "
                            "CG margin {:.4f} (need >= 0.05); {:.1f} s",
                            m[0], m[1], m[2], m[3], margin, elapsed)};
}

Outcome extreme_noise() {
    const auto cfg = load_config(source_dir() / "configs" / "extreme_noise.json");
    const auto m = mean_final(cfg, cfg.run.base_seed, 20);
    bool ok = true;
    for (double x : m) ok = ok && x >= 0.35 && x <= 0.65;
    return {ok, fmt::format("nu = {}: CG {:.4f}, WS {:.4f}, SM {:.4f}, NG {:.4f} (band [0.35, 0.65])", cfg.noise.nu,
                            m[0], m[1], m[2], m[3])};
}

// How often the directional results hold on fresh seed blocks.
void robustness_info() {
    const auto advantage_cfg = load_config(source_dir() / "configs" / "cg_advantage.json");
    const auto noise_cfg = load_config(source_dir() / "configs" / "extreme_noise.json");
    int advantage_hold = 0;
    int noise_hold = 0;
    const int blocks = 10;
    std::vector<double> lo(4, 1.0), hi(4, 0.0);
    for (int b = 0; b < blocks; ++b) {
        const std::uint64_t seed = 1000 + 20 * static_cast<std::uint64_t>(b);
        const auto m1 = mean_final(advantage_cfg, seed, 20);
        advantage_hold += m1[0] - std::max(m1[1], m1[2]) >= 0.05;
        const auto m4 = mean_final(noise_cfg, seed, 20);
        bool in = true;
        for (std::size_t k = 0; k < 4; ++k) {
            in = in && m4[k] >= 0.35 && m4[k] <= 0.65;
            lo[k] = std::min(lo[k], m4[k]);
            hi[k] = std::max(hi[k], m4[k]);
        }
        noise_hold += in;
    }
    std::cout << fmt::format("INFO robustness: over {} disjoint 20-seed blocks (base seeds 1000..{}), CG advantage holds in {}, "
                             "extreme-noise band holds in {}\n",
                             blocks, 1000 + 20 * (blocks - 1), advantage_hold, noise_hold);
    std::cout << fmt::format("INFO robustness: extreme-noise block means range CG [{:.3f}, {:.3f}], WS [{:.3f}, {:.3f}], "
                             "SM [{:.3f}, {:.3f}], NG [{:.3f}, {:.3f}]\n",
                             lo[0], hi[0], lo[1], hi[1], lo[2], hi[2], lo[3], hi[3]);
}

Outcome adversary() {
    bool zero_success = true;
    bool identical = true;
    std::string detail;
    for (auto m : kAll) {
        auto c = default_config();
        c.run.trials = 10;
        auto full = c;
        full.attacker = AttackerSpec{AttackerBehavior::constant_false, 1.0};
        const auto r = runner::run_experiment(with_mechanism(full, m));
        zero_success = zero_success && r.success_probability == 0.0;
        detail += fmt::format("{} P(success)={} ", to_string(m), r.success_probability);

        auto none = c;
        none.attacker = AttackerSpec{AttackerBehavior::constant_false, 0.0};
        const auto a = runner::run_experiment(with_mechanism(c, m));
        const auto b = runner::run_experiment(with_mechanism(none, m));
        for (std::size_t t = 0; t < a.trials.size(); ++t) {
            for (std::size_t round = 0; round < a.trials[t].logs.size(); ++round) {
                const auto& x = a.trials[t].logs[round];
                const auto& y = b.trials[t].logs[round];
                for (std::size_t k = 0; k < x.topics.size(); ++k) {
                    identical = identical && x.topics[k].progress == y.topics[k].progress &&
                                x.topics[k].social_signal == y.topics[k].social_signal &&
                                x.topics[k].allocation == y.topics[k].allocation;
                }
                for (std::size_t i = 0; i < x.agents.size(); ++i) {
                    identical = identical && x.agents[i].vote == y.agents[i].vote &&
                                x.agents[i].confidence == y.agents[i].confidence &&
                                x.agents[i].credibility == y.agents[i].credibility &&
                                x.agents[i].stake == y.agents[i].stake;
                }
            }
        }
    }
    return {zero_success && identical,
            detail + fmt::format("at fraction 1; fraction 0 identical to no attacker: {}", identical)};
}

Outcome physics() {
    const auto world = default_config().world;
    const double rs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    int comparisons = 0;
    bool monotone = true;
    for (const auto& topic : world.topics) {
        for (double prev = world.physics.threshold_low; prev < topic.saturation_limit; prev += 0.25) {
            for (int i = 1; i < 5; ++i) {
                monotone = monotone && physical::progress_increment(prev, rs[i], topic, world.physics, 0.0) >
                                           physical::progress_increment(prev, rs[i - 1], topic, world.physics, 0.0);
                ++comparisons;
            }
        }
    }
    // pi <= M along noise-free trajectories from every stage, under random
    // allocations.
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double max_ratio = 0.0;
    const std::vector<double> eps{0.0, 0.0};
    for (int run = 0; run < 200; ++run) {
        std::vector<TopicState> topics{
            TopicState{0, u(gen) * world.topics[0].saturation_limit, 0, 0, true},
            TopicState{1, u(gen) * world.topics[1].saturation_limit, 0, 0, false}};
        for (int round = 0; round < 200; ++round) {
            const double a = u(gen);
            const auto s = physical::step_physical(topics, std::vector<double>{a, 1.0 - a}, world, eps);
            for (std::size_t k = 0; k < 2; ++k) {
                topics[k].progress = s.progress[k];
                max_ratio = std::max(max_ratio, s.progress[k] / world.topics[k].saturation_limit);
            }
        }
    }
    const bool ok = monotone && max_ratio <= 1.0;
    return {ok, fmt::format("epsilon=0: {} increasing-in-r comparisons on branches 2-3 hold: {}; max pi/M over 40000 "
                            "noise-free steps = {:.6f}",
                            comparisons, monotone, max_ratio)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"determinism", determinism},
        {"formula-suite", formula_suite},
        {"simplex-invariant", simplex},
        {"cg-reductions", cg_reductions},
        {"ablation-semantics", ablation_semantics},
        {"diagnostics-oracles", diagnostics_oracles},
        {"directional-cg-advantage", cg_advantage},
        {"directional-extreme-noise", extreme_noise},
        {"adversary-degenerate", adversary},
        {"physical-properties", physics},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << '\n' << std::flush;
    }
    try {
        robustness_info();
    } catch (const std::exception& e) {
        std::cout << "INFO robustness: not computed (" << e.what() << ")\n";
    }
    std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
