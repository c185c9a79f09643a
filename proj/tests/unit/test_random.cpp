#include <catch_amalgamated.hpp>
#include <cstdint>

#include "mgfml/random.hpp"

using namespace mgfml;

TEST_CASE("Philox4x32-10 known-answer vectors", "[random]")
{
    // Random123 kat_vectors.
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
    static_assert(philox4x32_10({0, 0, 0, 0}, {0, 0})[0] == 0x6627e8d5u);
}

TEST_CASE("streams are keyed by seed and iteration", "[random]")
{
    PhiloxStream a(42, 7);
    PhiloxStream b(42, 7);
    PhiloxStream c(42, 8);
    PhiloxStream d(43, 7);
    for (int i = 0; i < 10; ++i) {
        const auto va = a();
        CHECK(va == b());
        CHECK(va != c());
        CHECK(va != d());
    }
    // Block 0 of stream (seed, iteration) is philox(iteration, key = seed).
    PhiloxStream e(5, 3);
    const auto block = philox4x32_10({3, 0, 0, 0}, {5, 0});
    for (const auto word : block) {
        CHECK(e() == word);
    }
}

TEST_CASE("uniform doubles lie strictly inside (0, 1)", "[random]")
{
    PhiloxStream g(1, 0);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = g.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.005);
}
