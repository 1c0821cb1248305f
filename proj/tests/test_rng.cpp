#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "rvehom/rng.hpp"

using namespace rvehom;

TEST_CASE("streams are deterministic and keyed") {
    CounterRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    CHECK(a.key() == b.key());
    CHECK(a.key() != c.key());
    CHECK(a.key() != d.key());
}

TEST_CASE("bounded draws are in range and roughly uniform") {
    CounterRng rng(1, 1);
    const std::uint64_t bound = 10;
    std::vector<long> counts(bound, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const std::uint64_t v = rng.below(bound);
        REQUIRE(v < bound);
        ++counts[v];
    }
    for (const long c : counts) {
        CHECK(c > draws / 10 - 4 * 100);  // ~4 sigma around draws/10
        CHECK(c < draws / 10 + 4 * 100);
    }
}

TEST_CASE("position counts draws") {
    CounterRng rng(5, 5);
    CHECK(rng.position() == 0);
    rng.next();
    rng.next();
    CHECK(rng.position() == 2);
}

TEST_CASE("derived stream seeds differ by tag") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t tag = 0; tag < 64; ++tag) seen.insert(derive_stream_seed(99, tag));
    CHECK(seen.size() == 64);
}
