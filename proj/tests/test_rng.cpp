#include <doctest.h>

#include "gtt/rng.hpp"

using gtt::Rng;

TEST_CASE("identical seeds give identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.raw() == b.raw());
}

TEST_CASE("different seeds diverge") {
    Rng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 100; ++i)
        if (a.raw() == b.raw()) ++same;
    CHECK(same == 0);
}

TEST_CASE("uniform stays inside the open unit interval") {
    Rng rng(7);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("uniform_index covers [0, n) without obvious bias") {
    Rng rng(11);
    int counts[5] = {0};
    for (int i = 0; i < 50000; ++i) {
        const auto k = rng.uniform_index(5);
        REQUIRE(k < 5);
        ++counts[k];
    }
    for (int c : counts) CHECK(c > 9000);  // expectation 10000
}

TEST_CASE("derived streams differ from each other and the root") {
    Rng root(3);
    Rng s0 = Rng::stream(3, 0);
    Rng s1 = Rng::stream(3, 1);
    CHECK(s0.raw() != s1.raw());
    CHECK(Rng::stream(3, 0).raw() == Rng::stream(3, 0).raw());
}

TEST_CASE("state save/load resumes the exact stream") {
    Rng rng(99);
    rng.raw();
    const std::string state = rng.save_state();
    const auto next = rng.raw();
    Rng other(0);
    other.load_state(state);
    CHECK(other.raw() == next);
}
