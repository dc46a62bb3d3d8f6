#pragma once

#include <optional>
#include <span>
#include <vector>

#include "polis/rng.hpp"
#include "polis/types.hpp"

namespace polis::physical {

/// What an agent sees of one topic at the start of a round.
struct PerceivedSignal {
    TopicId topic_id = 0;
    double noisy_progress = 0.0;  // pi-tilde of the previous round
    double social_signal = 0.0;   // Theta of the previous round; 0 under NG
};

/// Three-stage progress increment. The stage and the saturation factor both
/// use progress_prev:
///   progress_prev <  threshold_low : noise only (exploration)
///   progress_prev <  threshold_high: (v + accel * r)(1 - pi/M) + noise
///   otherwise                      : late * r (1 - pi/M) + noise
double progress_increment(double progress_prev, double allocation, const TopicParams& topic,
                          const PhysicsParams& physics, double noise_draw);

struct PhysicalStep {
    std::vector<double> progress;        // pi^t, clamped at 0
    std::vector<double> delta_progress;  // raw increments
};

/// Draws one environmental noise value per topic from the streams keyed by
/// (round, topic) and applies progress_increment. Throws ProtocolError when
/// allocations do not sum to 1 within 1e-9.
PhysicalStep step_physical(std::span<const TopicState> topics, std::span<const double> allocations,
                           const WorldParams& world, const rng::StreamFactory& streams, int round);

/// Same step with caller-supplied noise (one draw per topic).
PhysicalStep step_physical(std::span<const TopicState> topics, std::span<const double> allocations,
                           const WorldParams& world, std::span<const double> noise);

/// pi-tilde = pi + rho_eff * Theta + xi (+ shock magnitude on the target topic
/// while the shock window covers `round`). The Theta term and the reported
/// social signal are dropped under NG. With noise.social_obs_noise the
/// reported social signal is Theta + xi', an independent draw of the same
/// scale. Observation noise is keyed by (round, topic).
std::vector<PerceivedSignal> build_perception(std::span<const TopicState> topics, Mechanism mechanism,
                                              const NoiseParams& noise, const std::optional<ShockSpec>& shock,
                                              int round, const rng::StreamFactory& streams);

/// Same construction with caller-supplied observation noise draws (already
/// scaled, one per topic). `social_noise` is added to the reported social
/// signal when non-empty and the mechanism is not NG.
std::vector<PerceivedSignal> build_perception(std::span<const TopicState> topics, Mechanism mechanism,
                                              const NoiseParams& noise, const std::optional<ShockSpec>& shock,
                                              int round, std::span<const double> obs_noise,
                                              std::span<const double> social_noise = {});

}  // namespace polis::physical
