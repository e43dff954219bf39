#include <catch2/catch_amalgamated.hpp>

#include "linf/rng.hpp"

using namespace linf;

// These values are part of the compatibility contract: seeded experiment
// output must stay reproducible across releases and platforms, so the
// generator primitives are pinned to known outputs.
TEST_CASE("rng primitives are frozen") {
    CHECK(splitmix64(0) == 16294208416658607535ULL);
    CHECK(splitmix64(42) == 13679457532755275413ULL);
    CHECK(stream_seed(7, 3) == 13015481187462834606ULL);

    Rng a(42);
    CHECK(a.next_u64() == 13930160852258120406ULL);
    Rng b(42);
    CHECK(b.next_unit() == 0.75515553295453897);

    // derived streams differ across indices and match across calls
    CHECK(stream_seed(7, 3) != stream_seed(7, 4));
    CHECK(stream_seed(7, 3) != stream_seed(8, 3));
    CHECK(stream_seed(7, 3) == stream_seed(7, 3));
}

TEST_CASE("unit draws stay in [0,1)") {
    Rng r(123);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}
