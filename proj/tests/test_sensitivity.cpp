#include "robplan/errors.hpp"
#include "robplan/robust_solver.hpp"
#include "robplan/sensitivity.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace robplan;
using robplan::testing::Rng;
using robplan::testing::uniform;

namespace {
const Utility kMarket = market_bidding(1.0, 1.6);
}

TEST_CASE("vacuous forecasts carry no sensitivity") {
    const auto fs = to_generic(testing::vacuous_m2());
    const auto report = sensitivities(solve(fs, kMarket), fs);
    REQUIRE(report.entries.size() == 4);
    for (const auto& e : report.entries) CHECK(e.lambda == doctest::Approx(0.0).scale(1.0));
    // All zero: the tie-break leaves forecast order intact.
    for (std::size_t i = 0; i < 4; ++i) CHECK(report.entries[i].forecast_index == i);
}

TEST_CASE("binding pair splits 0.8 between two equivalent constraints") {
    const auto fs = to_generic(testing::binding_pair_m2());
    const auto sol = solve(fs, kMarket);
    const auto report = sensitivities(sol, fs);
    const auto lambda = report.lambdas_by_index();
    CHECK(lambda == sol.lambda_star);
    CHECK(lambda[0] + lambda[3] == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(lambda[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(lambda[2] == doctest::Approx(0.0).scale(1.0));
    CHECK(report.base_objective == sol.objective);
    CHECK(report.entries.front().lambda >= report.entries.back().lambda);
}

TEST_CASE("entries carry bound metadata and sort by lambda") {
    Rng rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = testing::random_interval_instance(rng);
        const auto fs = to_generic(inst.pi);
        const auto sol = solve(fs, inst.utility);
        const auto report = sensitivities(sol, fs);
        REQUIRE(report.entries.size() == fs.size());
        const std::size_t m = inst.pi.num_intervals();
        for (std::size_t k = 0; k < report.entries.size(); ++k) {
            const auto& e = report.entries[k];
            CHECK(e.lambda == sol.lambda_star[e.forecast_index]);
            CHECK(e.kind == (e.forecast_index < m ? BoundKind::Upper : BoundKind::Lower));
            REQUIRE(e.interval_index.has_value());
            CHECK(*e.interval_index == e.forecast_index % m);
            if (k > 0) {
                const auto& prev = report.entries[k - 1];
                CHECK(prev.lambda >= e.lambda);
                if (prev.lambda == e.lambda) CHECK(prev.forecast_index < e.forecast_index);
            }
        }
        for (std::size_t i = 0; i < m; ++i)
            if (inst.pi.lower_probs[i] < inst.pi.upper_probs[i])
                CHECK(std::min(sol.lambda_star[i], sol.lambda_star[m + i]) <= 1e-8);
    }
}

TEST_CASE("zero change returns the base objective") {
    const auto fs = to_generic(testing::spread_m2());
    const auto report = sensitivities(solve(fs, kMarket), fs);
    CHECK(lower_bound_after_change(report, std::vector<double>(4, 0.0)) == report.base_objective);
}

TEST_CASE("tightening the binding upper bound is predicted exactly") {
    const auto fs = to_generic(testing::binding_pair_m2());
    const auto report = sensitivities(solve(fs, kMarket), fs);
    const auto delta = interval_tightening(2, 0, BoundKind::Upper, 0.1);
    CHECK(delta == std::vector<double>{0.1, 0.0, 0.0, 0.0});
    const double bound = lower_bound_after_change(report, delta);
    CHECK(bound <= 0.26 + 1e-12);
    const auto tightened = testing::two_intervals(0.0, 0.6, 0.3, 1.0);
    const double resolved = solve_prediction_intervals(tightened, kMarket).objective;
    CHECK(resolved == doctest::Approx(0.26).epsilon(1e-9));
    CHECK(resolved >= bound - 1e-8);
    // Counting the whole 0.8 mass on this coordinate makes the bound tight.
    CHECK(report.base_objective + 0.8 * 0.1 == doctest::Approx(resolved).epsilon(1e-9));
}

TEST_CASE("the one-sided bound holds for random perturbations of either sign") {
    Rng rng(62);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = testing::random_interval_instance(rng);
        const auto fs = to_generic(inst.pi);
        const auto report = sensitivities(solve(fs, inst.utility), fs);
        const auto slack = strict_feasibility_slack(fs, 64);
        REQUIRE(slack.zeta > 0.0);
        const double radius = feasibility_ball_radius(slack.zeta, fs.epsilons());
        const double per_coord = radius / std::sqrt(static_cast<double>(fs.size()));
        std::vector<double> delta(fs.size());
        for (auto& d : delta) d = uniform(rng, -per_coord, per_coord);
        auto eps = fs.epsilons();
        for (std::size_t i = 0; i < eps.size(); ++i) eps[i] -= delta[i];
        const double resolved = solve(fs.with_epsilons(eps), inst.utility).objective;
        CHECK(resolved >= lower_bound_after_change(report, delta) - 1e-8);
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("size mismatches and bad interval edits are rejected") {
    const auto fs = to_generic(testing::spread_m2());
    auto sol = solve(fs, kMarket);
    const auto report = sensitivities(sol, fs);
    CHECK_THROWS_AS(lower_bound_after_change(report, std::vector<double>(3, 0.0)), PreconditionError);
    sol.lambda_star.pop_back();
    CHECK_THROWS_AS(sensitivities(sol, fs), PreconditionError);
    CHECK_THROWS_AS(interval_tightening(2, 2, BoundKind::Upper, 0.1), PreconditionError);
    CHECK_THROWS_AS(interval_tightening(2, 0, BoundKind::Generic, 0.1), PreconditionError);
    CHECK(interval_tightening(3, 1, BoundKind::Lower, 0.2) == std::vector<double>{0, 0, 0, 0, 0.2, 0});
}

TEST_CASE("bound kind names") {
    CHECK(bound_kind_name(BoundKind::Upper) == "upper");
    CHECK(bound_kind_name(BoundKind::Lower) == "lower");
    CHECK(bound_kind_name(BoundKind::Generic) == "generic");
}
