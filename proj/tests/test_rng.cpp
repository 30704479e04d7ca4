#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hsg/rng.hpp"

#include <cmath>
#include <set>

using namespace hsg;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Reference vectors from the Random123 test suite.
    {
        auto out = Philox4x32::block({0u, 0u, 0u, 0u}, {0u, 0u});
        CHECK(out[0] == 0x6627e8d5u);
        CHECK(out[1] == 0xe169c58du);
        CHECK(out[2] == 0xbc57ac4cu);
        CHECK(out[3] == 0x9b00dbd8u);
    }
    {
        auto out = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                     {0xffffffffu, 0xffffffffu});
        CHECK(out[0] == 0x408f276du);
        CHECK(out[1] == 0x41c83b0eu);
        CHECK(out[2] == 0xa20bc7c6u);
        CHECK(out[3] == 0x6d5451fdu);
    }
    {
        auto out = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                     {0xa4093822u, 0x299f31d0u});
        CHECK(out[0] == 0xd16cfe09u);
        CHECK(out[1] == 0x94fdccebu);
        CHECK(out[2] == 0x5001e420u);
        CHECK(out[3] == 0x24126ea1u);
    }
}

TEST_CASE("streams are deterministic and order-independent") {
    RngStream a(42, 7);
    RngStream b(42, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c(42, 8);
    bool all_equal = true;
    RngStream a2(42, 7);
    for (int i = 0; i < 16; ++i) all_equal = all_equal && (a2.next_u64() == c.next_u64());
    CHECK_FALSE(all_equal);

    // Position offsets partition the counter space.
    RngStream d(1, 3, 256);
    RngStream e(1, 3, 0);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 64; ++i) seen.insert(e.next_u64());
    for (int i = 0; i < 64; ++i) CHECK(seen.count(d.next_u64()) == 0);
}

TEST_CASE("normals have the right first moments") {
    RngStream r(2024, 1);
    const int n = 200000;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        s1 += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    const double mean = s1 / n;
    const double var = s2 / n;
    const double kurt = s4 / n;
    CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::fabs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::fabs(kurt - 3.0) < 0.1);
}

TEST_CASE("complex normals: variance splits between components") {
    RngStream r(7, 99);
    const int n = 100000;
    double sre = 0.0, sim = 0.0, cross = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto z = r.cnormal(1.0);
        sre += z.real() * z.real();
        sim += z.imag() * z.imag();
        cross += z.real() * z.imag();
    }
    CHECK(std::fabs(sre / n - 0.5) < 0.01);
    CHECK(std::fabs(sim / n - 0.5) < 0.01);
    CHECK(std::fabs(cross / n) < 0.01);
}
