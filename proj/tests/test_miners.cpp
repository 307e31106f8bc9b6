// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <powlab/miners.hpp>
#include <powlab/rng.hpp>

#include <cmath>
#include <stdexcept>

using namespace powlab;
using namespace powlab::miners;

namespace {

MinerPopulation scenario_population() {
    return MinerPopulation{1.0, 4.0, 4.0, 0.05, 40.0};
}

} // namespace

TEST_CASE("profitability tracks the inverse difficulty") {
    CHECK(profitability_change(1800.0, 1800.0).x == doctest::Approx(0.0));
    CHECK(profitability_change(1800.0 / 1.05, 1800.0).x == doctest::Approx(0.05));
    CHECK(profitability_change(3600.0, 1800.0).x == doctest::Approx(-0.5));
    CHECK_THROWS_AS(profitability_change(0.0, 1800.0), std::domain_error);
    CHECK_THROWS_AS(profitability_change(1800.0, -1.0), std::domain_error);
}

TEST_CASE("greedy miners are all or nothing at the threshold") {
    const MinerPopulation pop = scenario_population();
    CHECK(greedy_allocation({0.05}, pop) == 4.0);   // inclusive
    CHECK(greedy_allocation({0.049}, pop) == 0.0);
    CHECK(greedy_allocation({-0.2}, pop) == 0.0);
    CHECK(greedy_allocation({2.0}, pop) == 4.0);
}

TEST_CASE("logistic allocation matches the curve") {
    const MinerPopulation pop = scenario_population();
    CHECK(logistic_allocation({0.0}, pop) == doctest::Approx(2.0));
    // x = +/-0.15 puts the exponent at -/+6
    CHECK(logistic_allocation({0.15}, pop) ==
          doctest::Approx(4.0 / (1.0 + std::exp(-6.0))).epsilon(1e-12));
    CHECK(logistic_allocation({-0.15}, pop) ==
          doctest::Approx(4.0 / (1.0 + std::exp(6.0))).epsilon(1e-12));
}

TEST_CASE("logistic allocation is monotone, bounded and symmetric") {
    const MinerPopulation pop = scenario_population();
    Rng rng(2026);
    double prev_x = -10.0;
    double prev_alloc = logistic_allocation({prev_x}, pop);
    for (int i = 0; i < 10000; ++i) {
        const double x = -2.0 + 4.0 * rng.next_open_unit();
        const double alloc = logistic_allocation({x}, pop);
        CHECK(alloc >= 0.0);
        CHECK(alloc <= pop.variable_hashrate);
        CHECK(logistic_allocation({x}, pop) + logistic_allocation({-x}, pop) ==
              doctest::Approx(pop.variable_hashrate).epsilon(1e-12));
        if (x > prev_x) CHECK(alloc >= prev_alloc);
        prev_x = x;
        prev_alloc = alloc;
    }
    // saturation at extreme signals
    CHECK(logistic_allocation({1e9}, pop) == doctest::Approx(4.0));
    CHECK(logistic_allocation({-1e9}, pop) == doctest::Approx(0.0));
}

TEST_CASE("total hash rate adds the three classes and stays bounded") {
    const MinerPopulation pop = scenario_population();
    CHECK(total_hashrate({0.0}, pop) == doctest::Approx(3.0));  // 1 + 0 + 2
    CHECK(total_hashrate({1e9}, pop) == doctest::Approx(9.0));
    CHECK(total_hashrate({-1e9}, pop) == doctest::Approx(1.0));
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double x = -5.0 + 10.0 * rng.next_open_unit();
        const double total = total_hashrate({x}, pop);
        CHECK(total >= pop.base_hashrate);
        CHECK(total <= pop.base_hashrate + pop.greedy_hashrate + pop.variable_hashrate);
    }
}

TEST_CASE("population validation") {
    MinerPopulation pop = scenario_population();
    pop.base_hashrate = 0.0;
    CHECK_THROWS_AS(pop.validate(), std::domain_error);
    pop = scenario_population();
    pop.greedy_hashrate = -1.0;
    CHECK_THROWS_AS(pop.validate(), std::domain_error);
    pop = scenario_population();
    pop.logistic_steepness = 0.0;
    CHECK_THROWS_AS(pop.validate(), std::domain_error);
    CHECK_NOTHROW(scenario_population().validate());
}
