#include "robplan/errors.hpp"
#include "robplan/oracle_check.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace robplan;
using robplan::testing::Rng;
using robplan::testing::uniform;

namespace {

const Utility kMarket = market_bidding(1.0, 1.6);

double mass_near(const DiscreteDistribution& d, double x, double tol = 1e-8) {
    double m = 0.0;
    for (const auto& a : d.atoms())
        if (std::abs(a.location - x) <= tol) m += a.probability;
    return m;
}

void check_distribution(const DiscreteDistribution& d, const ForecastSet& fs) {
    double total = 0.0;
    for (const auto& a : d.atoms()) {
        CHECK(a.probability >= 0.0);
        CHECK(fs.domain().contains(a.location));
        total += a.probability;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    CHECK(d.max_constraint_violation(fs) <= 1e-9);
}

} // namespace

TEST_CASE("brute-force worst case on desk-scale instances") {
    const auto spread = to_generic(testing::spread_m2());
    const auto r = brute_force_worst_case(spread, kMarket, 0.5);
    CHECK(r.value == doctest::Approx(-0.06).epsilon(1e-9).scale(1.0));
    CHECK(mass_near(r.worst, 0.0) == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(mass_near(r.worst, 0.5) == doctest::Approx(0.3).epsilon(1e-9));
    check_distribution(r.worst, spread);

    const auto vacuous = to_generic(testing::vacuous_m2());
    const auto v = brute_force_worst_case(vacuous, kMarket, 0.5);
    CHECK(v.value == doctest::Approx(-0.3).epsilon(1e-9));
    REQUIRE(v.worst.size() == 1);
    CHECK(v.worst.atoms()[0].location == 0.0);

    // All mass forced into [0.5, 1]; the minimum sits at the left endpoint.
    const auto pinned = to_generic(testing::upper_half_m2());
    const auto p = brute_force_worst_case(pinned, kMarket, 0.8);
    CHECK(p.value == doctest::Approx(kMarket.eval(0.5, 0.8)).epsilon(1e-9));
    CHECK(mass_near(p.worst, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("brute-force plan over a decision grid") {
    const auto pinned = brute_force_plan(testing::mean_pinned(), kMarket, 101);
    CHECK(pinned.b == 1.0);
    CHECK(pinned.value == doctest::Approx(0.2).epsilon(1e-9));
    const auto pair = brute_force_plan(to_generic(testing::binding_pair_m2()), kMarket, 101);
    CHECK(pair.b == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pair.value == doctest::Approx(0.18).epsilon(1e-9));
    const auto vac = brute_force_plan(to_generic(testing::vacuous_m2()), kMarket, 101);
    CHECK(vac.b == 0.0);
    CHECK(vac.value == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(brute_force_plan(testing::mean_pinned(), kMarket, 1), PreconditionError);
}

TEST_CASE("duality gap examples") {
    for (const auto& pi : {testing::spread_m2(), testing::binding_pair_m2(), testing::vacuous_m2()}) {
        const auto fs = to_generic(pi);
        for (double b : {0.0, 0.5, 1.0}) CHECK(duality_gap(fs, kMarket, b) <= 1e-6);
    }
    const Utility constant({{0.7, 0.0, 0.0}}, {0.0, 1.0});
    const auto fs = to_generic(testing::spread_m2());
    CHECK(duality_gap(fs, constant, 0.3) == 0.0);
    CHECK(brute_force_worst_case(fs, constant, 0.3).value == 0.7);
    CHECK(worst_case_value(fs, constant, 0.3).value == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(duality_gap(testing::mean_pinned(), kMarket, 1.0) <= 1e-3);
}

TEST_CASE("random interval instances: primal equals dual and the greedy oracle") {
    Rng rng(81);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = testing::random_interval_instance(rng);
        const auto fs = to_generic(inst.pi);
        for (int k = 0; k < 3; ++k) {
            const double b = uniform(rng, 0.0, 1.0);
            const auto r = brute_force_worst_case(fs, inst.utility, b);
            check_distribution(r.worst, fs);
            CHECK(std::abs(r.value - testing::greedy_worst_case(inst.pi, inst.utility, b)) <= 1e-6);
            CHECK(duality_gap(fs, inst.utility, b) <= 1e-6);
        }
    }
}

TEST_CASE("grid plan never beats the dual optimum") {
    Rng rng(82);
    for (int trial = 0; trial < 6; ++trial) {
        const auto inst = testing::random_interval_instance(rng, 2, 4);
        const auto fs = to_generic(inst.pi);
        GridSpec grid;
        grid.base_points = 64;
        const auto plan = brute_force_plan(fs, inst.utility, 21, grid);
        const double best = solve(fs, inst.utility).objective;
        CHECK(plan.value <= best + 1e-8);
    }
    const auto fs = to_generic(testing::binding_pair_m2());
    CHECK(brute_force_plan(fs, kMarket, 11).value == doctest::Approx(solve(fs, kMarket).objective).epsilon(1e-6));
}

TEST_CASE("grid specification checks") {
    const auto fs = to_generic(testing::spread_m2());
    GridSpec grid;
    grid.base_points = 1;
    CHECK_THROWS_AS(grid.validate(fs), ValidationError);
    grid = {};
    grid.epsilon_shift = 0.0;
    CHECK_THROWS_AS(grid.validate(fs), ValidationError);
    grid.epsilon_shift = 0.6;
    CHECK_THROWS_AS(brute_force_worst_case(fs, kMarket, 0.5, grid), ValidationError);
    CHECK_THROWS_AS(brute_force_worst_case(fs, kMarket, 2.0), DomainError);
}

TEST_CASE("empty sets are detected by the primal too") {
    const ForecastSet impossible({0.0, 1.0}, {{Affine{0.0, -1.0}, -2.0, std::nullopt}});
    CHECK_THROWS_AS(brute_force_worst_case(impossible, kMarket, 0.5), AmbiguitySetEmpty);
}

TEST_CASE("worst-case distribution attached to a solution") {
    const auto fs = to_generic(testing::binding_pair_m2());
    const auto sol = with_worst_case(solve(fs, kMarket), fs, kMarket);
    REQUIRE(sol.worst_case_distribution.has_value());
    check_distribution(*sol.worst_case_distribution, fs);
    CHECK(true_expected(*sol.worst_case_distribution, kMarket, sol.b_star) ==
          doctest::Approx(sol.objective).epsilon(1e-9));
}
