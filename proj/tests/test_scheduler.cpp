#include <catch2/catch_amalgamated.hpp>

#include "dal/scheduler.hpp"

#include <cmath>

TEST_CASE("alpha_k matches the hand evaluation", "[scheduler]") {
    REQUIRE(dal::alpha_k(1, 1, 10, 50000) ==
            Catch::Approx(6.0401577239004026e-05).margin(1e-15));
    // Long-double oracle value of ceil(10 / alpha_1): 10 / 6.0401577e-5 is
    // 165558.59, so the first cycle has 165559 slots.
    dal::ExplorationScheduler sched(50000, 10, 1);
    REQUIRE(sched.cycle_length == 165559);
}

TEST_CASE("alpha_k is monotone in k and clamps at one", "[scheduler]") {
    double prev = 0.0;
    for (long k = 1; k <= 20; ++k) {
        const double a = dal::alpha_k(k, 1, 10, 50000);
        REQUIRE(a > prev);
        prev = a;
    }
    // Huge k forces the clamp.
    REQUIRE(dal::alpha_k(100000000, 50, 100, 1000) == 1.0);
    REQUIRE_THROWS_AS(dal::alpha_k(0, 1, 1, 100), std::domain_error);
    REQUIRE_THROWS_AS(dal::alpha_k(1, 0, 1, 100), std::domain_error);
    REQUIRE_THROWS_AS(dal::alpha_k(1, 1, 0, 100), std::domain_error);
    REQUIRE_THROWS_AS(dal::alpha_k(1, 1, 1, 2), std::domain_error);
}

TEST_CASE("Scheduler enumerates forced slots at each cycle start", "[scheduler]") {
    // tau=0, N_e=3, cycle_length=10: t in {1,2,3} forced with indices 0,1,2;
    // t in {4..10} delegate; t=11 wraps to forced index 0.
    dal::ExplorationScheduler sched(100, 3, 1);
    sched.alpha = 0.3;
    sched.cycle_length = 10;
    for (long t = 1; t <= 3; ++t) {
        const auto pos = sched.position(t);
        REQUIRE(pos.forced);
        REQUIRE(pos.cover_index == static_cast<std::size_t>(t - 1));
    }
    for (long t = 4; t <= 10; ++t) REQUIRE_FALSE(sched.position(t).forced);
    REQUIRE(sched.position(11).forced);
    REQUIRE(sched.position(11).cover_index == 0);
    REQUIRE_THROWS_AS(sched.position(0), std::domain_error);
}

TEST_CASE("Every slot is forced when the cycle equals the cover", "[scheduler]") {
    dal::ExplorationScheduler sched(100, 4, 1);
    sched.alpha = 1.0;
    sched.cycle_length = 4;
    for (long t = 1; t <= 12; ++t) REQUIRE(sched.position(t).forced);
}

TEST_CASE("Each full cycle contains exactly N_e forced plays", "[scheduler]") {
    dal::ExplorationScheduler sched(50000, 7, 3);
    REQUIRE(sched.cycle_length >= 7);
    long forced = 0;
    const long start = 101;
    for (long t = start; t < start + sched.cycle_length; ++t)
        forced += sched.position(t).forced ? 1 : 0;
    // Shifted windows of one cycle length hold the same count.
    REQUIRE(forced == 7);
}

TEST_CASE("Restart advances the phase and recomputes the cycle", "[scheduler]") {
    dal::ExplorationScheduler sched(50000, 10, 1);
    const double a1 = sched.alpha;
    const long c1 = sched.cycle_length;
    sched.restart(1234);
    REQUIRE(sched.tau == 1234);
    REQUIRE(sched.k == 2);
    REQUIRE(sched.alpha == Catch::Approx(a1 * std::sqrt(2.0)).margin(1e-15));
    REQUIRE(sched.cycle_length < c1);
    // The first post-restart round starts a fresh cycle.
    REQUIRE(sched.position(1235).forced);
    REQUIRE(sched.position(1235).cover_index == 0);
}
