#include <doctest.h>

#include <cmath>
#include <set>

#include "polis/rng.hpp"

using namespace polis::rng;

TEST_CASE("philox4x32-10 known-answer vectors") {
    using W = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("equal keys give equal streams") {
    Stream a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u32();
        CHECK(x == b.next_u32());
        differs = differs || x != c.next_u32();
    }
    CHECK(differs);
}

TEST_CASE("stream keys depend on every coordinate") {
    const StreamFactory f(7, 0, 0);
    std::set<std::uint64_t> keys;
    keys.insert(f.stream(Purpose::agent, 1, 0).key());
    keys.insert(f.stream(Purpose::agent, 1, 1).key());
    keys.insert(f.stream(Purpose::agent, 2, 0).key());
    keys.insert(f.stream(Purpose::perception, 1, 0).key());
    keys.insert(StreamFactory(8, 0, 0).stream(Purpose::agent, 1, 0).key());
    keys.insert(StreamFactory(7, 1, 0).stream(Purpose::agent, 1, 0).key());
    keys.insert(StreamFactory(7, 0, 1).stream(Purpose::agent, 1, 0).key());
    CHECK(keys.size() == 7);
}

TEST_CASE("uniform and normal moments") {
    Stream s(123);
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0;
    double umin = 1, umax = 0;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        su += u;
        const double z = s.normal();
        sn += z;
        sn2 += z * z;
    }
    CHECK(umin >= 0.0);
    CHECK(umax < 1.0);
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("below stays in range and hits every value") {
    Stream s(5);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto v = s.below(3);
        CHECK(v < 3);
        seen.insert(v);
    }
    CHECK(seen.size() == 3);
}
