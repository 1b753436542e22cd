#include "robplan/errors.hpp"
#include "robplan/refine.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <functional>

using namespace robplan;
using robplan::testing::Rng;
using robplan::testing::uniform;

namespace {

const Utility kMarket = market_bidding(1.0, 1.6);

class ScriptedOracle final : public RefinementOracle {
public:
    using Fn = std::function<std::optional<double>(std::size_t, double)>;
    explicit ScriptedOracle(Fn fn) : fn_(std::move(fn)) {}
    std::optional<double> refine(std::size_t index, double current) override {
        calls.push_back(index);
        return fn_(index, current);
    }
    std::vector<std::size_t> calls;

private:
    Fn fn_;
};

void check_trace_invariants(const RefinementTrace& trace, const ForecastSet& fs, const Utility& u) {
    REQUIRE_FALSE(trace.iterations.empty());
    for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
        const auto& r = trace.iterations[k];
        CHECK(r.iteration == k);
        CHECK(r.epsilon.size() == fs.size());
        CHECK(r.lambda.size() == fs.size());
        if (k + 1 == trace.iterations.size()) {
            CHECK_FALSE(r.refined_index.has_value());
            continue;
        }
        REQUIRE(r.refined_index.has_value());
        const auto& next = trace.iterations[k + 1];
        const std::size_t j = *r.refined_index;
        CHECK(next.epsilon[j] == *r.new_epsilon);
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (i == j)
                CHECK(next.epsilon[i] < r.epsilon[i]);
            else
                CHECK(next.epsilon[i] == r.epsilon[i]);
        }
        CHECK(next.objective >= r.objective - 1e-8);
        CHECK(next.objective >= r.objective + r.lambda[j] * (r.epsilon[j] - next.epsilon[j]) - 1e-8);
    }
    // Each record's objective is the robust optimum at its bound vector.
    for (const auto& r : trace.iterations) {
        const auto pi = as_prediction_intervals(fs.with_epsilons(r.epsilon));
        if (pi) CHECK(r.objective == doctest::Approx(testing::greedy_plan(*pi, u).second).epsilon(1e-9).scale(1.0));
    }
}

} // namespace

TEST_CASE("clamped step oracle semantics") {
    const auto fs = to_generic(testing::binding_pair_m2());
    const DiscreteDistribution truth({{0.25, 0.25}, {0.75, 0.75}});
    ClampedStepOracle oracle(truth, fs, 0.1, 0.05);
    CHECK(oracle.true_values() == std::vector<double>{0.25, 0.75, -0.25, -0.75});
    CHECK(*oracle.refine(0, 0.4) == doctest::Approx(0.3));
    CHECK(*oracle.refine(0, 0.32) == doctest::Approx(0.3));
    CHECK_FALSE(oracle.refine(0, 0.3).has_value());
    CHECK_FALSE(oracle.refine(0, 0.3 + 5e-13).has_value());
    CHECK(*oracle.refine(3, -0.6) == doctest::Approx(-0.7));
    CHECK_THROWS_AS(ClampedStepOracle(truth, fs, 0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(ClampedStepOracle(truth, fs, 0.1, -1.0), ValidationError);
}

TEST_CASE("an exhausted oracle stops after the first solve") {
    const auto fs = to_generic(testing::binding_pair_m2());
    ExhaustedOracle oracle;
    const auto trace = refine_loop(fs, kMarket, oracle);
    REQUIRE(trace.iterations.size() == 1);
    CHECK(trace.termination == TerminationReason::NoRefinableForecast);
    CHECK(trace.iterations[0].epsilon == fs.epsilons());
    CHECK_FALSE(trace.iterations[0].refined_index.has_value());
}

TEST_CASE("binding pair refinement starts 0.18 then 0.26") {
    const auto fs = to_generic(testing::binding_pair_m2());
    ClampedStepOracle oracle(DiscreteDistribution({{0.25, 0.25}, {0.75, 0.75}}), fs, 0.1, 0.05);
    const auto trace = refine_loop(fs, kMarket, oracle);
    REQUIRE(trace.iterations.size() >= 2);
    CHECK(trace.iterations[0].objective == doctest::Approx(0.18).epsilon(1e-9));
    CHECK(trace.iterations[1].objective == doctest::Approx(0.26).epsilon(1e-9));
    const std::size_t first = *trace.iterations[0].refined_index;
    CHECK((first == 0 || first == 3));
    for (std::size_t k = 0; k + 2 < trace.iterations.size(); ++k)
        CHECK(trace.iterations[k + 1].objective > trace.iterations[k].objective);
    check_trace_invariants(trace, fs, kMarket);
    CHECK(trace.termination == TerminationReason::NoRefinableForecast);
}

TEST_CASE("zero sensitivities are never refined") {
    const auto fs = to_generic(testing::vacuous_m2());
    ScriptedOracle oracle([](std::size_t, double cur) { return cur - 0.1; });
    const auto trace = refine_loop(fs, kMarket, oracle);
    CHECK(trace.iterations.size() == 1);
    CHECK(trace.termination == TerminationReason::NoRefinableForecast);
    CHECK(oracle.calls.empty());
}

TEST_CASE("loosening a bound violates the oracle contract") {
    const auto fs = to_generic(testing::binding_pair_m2());
    ScriptedOracle oracle([](std::size_t, double cur) { return cur + 0.01; });
    CHECK_THROWS_AS(refine_loop(fs, kMarket, oracle), ContractViolation);
}

TEST_CASE("refusals walk down the sensitivity ranking") {
    const auto fs = to_generic(testing::binding_pair_m2());
    ExhaustedOracle none;
    const auto top = refine_loop(fs, kMarket, none).iterations[0].lambda;
    std::size_t best = 0;
    for (std::size_t i = 1; i < top.size(); ++i)
        if (top[i] > top[best]) best = i;
    ScriptedOracle oracle([best](std::size_t i, double cur) -> std::optional<double> {
        if (i == best) return std::nullopt;
        return cur - 0.05;
    });
    RefineOptions options;
    options.max_iterations = 1;
    const auto trace = refine_loop(fs, kMarket, oracle, options);
    REQUIRE(oracle.calls.size() >= 2);
    CHECK(oracle.calls[0] == best);
    CHECK(trace.iterations[0].refined_index == oracle.calls[1]);
    CHECK(trace.termination == TerminationReason::MaxIterations);
    CHECK(trace.iterations.size() == 2);
}

TEST_CASE("an equal offer counts as a refusal") {
    const auto fs = to_generic(testing::binding_pair_m2());
    ScriptedOracle oracle([](std::size_t, double cur) { return cur; });
    const auto trace = refine_loop(fs, kMarket, oracle);
    CHECK(trace.iterations.size() == 1);
    CHECK(trace.termination == TerminationReason::NoRefinableForecast);
}

TEST_CASE("an emptied ambiguity set is rolled back") {
    const auto fs = to_generic(testing::binding_pair_m2());
    ScriptedOracle oracle([](std::size_t, double) { return -5.0; });
    const auto trace = refine_loop(fs, kMarket, oracle);
    CHECK(trace.rolled_back);
    CHECK(trace.termination == TerminationReason::NoRefinableForecast);
    REQUIRE(trace.iterations.size() == 1);
    CHECK(trace.iterations[0].epsilon == fs.epsilons());
    CHECK_FALSE(trace.iterations[0].refined_index.has_value());
}

TEST_CASE("small improvements terminate the loop") {
    const auto fs = to_generic(testing::binding_pair_m2());
    ClampedStepOracle oracle(DiscreteDistribution({{0.25, 0.25}, {0.75, 0.75}}), fs, 0.1, 0.05);
    RefineOptions options;
    options.improvement_tolerance = 1.0;
    const auto trace = refine_loop(fs, kMarket, oracle, options);
    CHECK(trace.termination == TerminationReason::ImprovementBelowTolerance);
    CHECK(trace.iterations.size() == 2);
    CHECK(termination_name(trace.termination) == "improvement_below_tolerance");
}

TEST_CASE("random instances keep the per-step guarantee") {
    Rng rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = testing::random_interval_instance(rng);
        const auto fs = to_generic(inst.pi);
        ClampedStepOracle oracle(inst.truth, fs, uniform(rng, 0.02, 0.15), uniform(rng, 0.0, 0.03));
        RefineOptions options;
        options.improvement_tolerance = 0.0;
        const auto trace = refine_loop(fs, inst.utility, oracle, options);
        check_trace_invariants(trace, fs, inst.utility);
        // The oracle never crosses the truth.
        const auto last = fs.with_epsilons(trace.iterations.back().epsilon);
        CHECK(inst.truth.max_constraint_violation(last) <= 1e-12);
    }
}
