#include "polis/physical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace polis::physical {

double progress_increment(double progress_prev, double allocation, const TopicParams& topic,
                          const PhysicsParams& physics, double noise_draw) {
    if (progress_prev < physics.threshold_low) {
        return noise_draw;
    }
    const double headroom = 1.0 - progress_prev / topic.saturation_limit;
    if (progress_prev < physics.threshold_high) {
        return (topic.baseline_velocity + physics.accel_factor * allocation) * headroom + noise_draw;
    }
    return physics.late_factor * allocation * headroom + noise_draw;
}

PhysicalStep step_physical(std::span<const TopicState> topics, std::span<const double> allocations,
                           const WorldParams& world, std::span<const double> noise) {
    if (allocations.size() != topics.size() || noise.size() != topics.size()) {
        throw ProtocolError("step_physical: expected one allocation and one noise draw per topic");
    }
    const double total = std::accumulate(allocations.begin(), allocations.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) {
        throw ProtocolError("step_physical: allocations sum to " + std::to_string(total));
    }
    PhysicalStep out;
    out.progress.reserve(topics.size());
    out.delta_progress.reserve(topics.size());
    for (std::size_t k = 0; k < topics.size(); ++k) {
        const double prev = topics[k].progress;
        const double delta = progress_increment(prev, allocations[k], world.topics[k], world.physics, noise[k]);
        out.delta_progress.push_back(delta);
        out.progress.push_back(std::max(0.0, prev + delta));
    }
    return out;
}

PhysicalStep step_physical(std::span<const TopicState> topics, std::span<const double> allocations,
                           const WorldParams& world, const rng::StreamFactory& streams, int round) {
    std::vector<double> noise(topics.size(), 0.0);
    const double sigma = world.physics.env_noise_std;
    if (sigma > 0.0) {
        for (std::size_t k = 0; k < topics.size(); ++k) {
            noise[k] = sigma * streams.stream(rng::Purpose::physical, static_cast<std::uint64_t>(round), k).normal();
        }
    }
    return step_physical(topics, allocations, world, noise);
}

std::vector<PerceivedSignal> build_perception(std::span<const TopicState> topics, Mechanism mechanism,
                                              const NoiseParams& noise, const std::optional<ShockSpec>& shock,
                                              int round, std::span<const double> obs_noise,
                                              std::span<const double> social_noise) {
    const bool social = mechanism != Mechanism::NG;
    const double rho = noise.effective_rho();
    std::vector<PerceivedSignal> out;
    out.reserve(topics.size());
    for (std::size_t k = 0; k < topics.size(); ++k) {
        PerceivedSignal s;
        s.topic_id = topics[k].topic_id;
        s.social_signal = social ? topics[k].social_signal : 0.0;
        if (social && !social_noise.empty()) {
            s.social_signal += social_noise[k];
        }
        s.noisy_progress = topics[k].progress + obs_noise[k];
        if (social) {
            s.noisy_progress += rho * topics[k].social_signal;
        }
        if (shock && shock->active(round) && shock->target_topic == k) {
            s.noisy_progress += shock->magnitude;
        }
        out.push_back(s);
    }
    return out;
}

std::vector<PerceivedSignal> build_perception(std::span<const TopicState> topics, Mechanism mechanism,
                                              const NoiseParams& noise, const std::optional<ShockSpec>& shock,
                                              int round, const rng::StreamFactory& streams) {
    std::vector<double> draws(topics.size(), 0.0);
    std::vector<double> social_draws;
    const double xi = noise.effective_obs_std();
    const auto r = static_cast<std::uint64_t>(round);
    if (xi > 0.0) {
        for (std::size_t k = 0; k < topics.size(); ++k) {
            draws[k] = xi * streams.stream(rng::Purpose::perception, r, k).normal();
        }
        if (noise.social_obs_noise && mechanism != Mechanism::NG) {
            social_draws.resize(topics.size());
            for (std::size_t k = 0; k < topics.size(); ++k) {
                social_draws[k] = xi * streams.stream(rng::Purpose::social_perception, r, k).normal();
            }
        }
    }
    return build_perception(topics, mechanism, noise, shock, round, draws, social_draws);
}

}  // namespace polis::physical
