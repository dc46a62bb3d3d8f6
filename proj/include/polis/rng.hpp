#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace polis::rng {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Stable 64-bit hash of a coordinate tuple. Folds left:
///   h0 = mix64(0x6a09e667f3bcc909)
///   h  = mix64(h ^ (c + 0x9e3779b97f4a7c15 * (i + 1)))   for coordinate i
std::uint64_t hash_coords(std::initializer_list<std::uint64_t> coords);

/// Philox4x32-10 block function (Salmon et al. 2011, the Random123 family).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// What a stream is used for; part of every stream key so draws for
/// different purposes never share a sequence.
enum class Purpose : std::uint64_t {
    physical = 1,
    perception = 2,
    agent = 3,
    stake = 4,
    social_perception = 5,
};

/// A counter-based stream: the key is fixed, each block advances the counter.
/// Two streams with equal keys produce identical draws.
class Stream {
public:
    explicit Stream(std::uint64_t key) : key_(key) {}

    std::uint32_t next_u32();
    /// Uniform on [0, 1) with 53 bits.
    double uniform();
    /// Standard normal via Box-Muller; draws two uniforms per call.
    double normal();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

/// Derives keyed streams for one trial. The trial seed is base_seed + trial
/// index; a sweep cell contributes its coordinates.
class StreamFactory {
public:
    StreamFactory(std::uint64_t trial_seed, std::uint64_t cell_a = 0, std::uint64_t cell_b = 0)
        : trial_seed_(trial_seed), cell_a_(cell_a), cell_b_(cell_b) {}

    Stream stream(Purpose purpose, std::uint64_t round, std::uint64_t entity) const {
        return Stream(hash_coords({trial_seed_, cell_a_, cell_b_, round, entity, static_cast<std::uint64_t>(purpose)}));
    }

private:
    std::uint64_t trial_seed_;
    std::uint64_t cell_a_;
    std::uint64_t cell_b_;
};

}  // namespace polis::rng
