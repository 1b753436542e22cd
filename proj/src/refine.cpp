#include "robplan/refine.hpp"

#include "robplan/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace robplan {

ClampedStepOracle::ClampedStepOracle(DiscreteDistribution truth, const ForecastSet& fs, double step,
                                     double margin)
    : step_(step), margin_(margin) {
    if (!(step > 0.0)) throw ValidationError("step", "must be > 0");
    if (!(margin >= 0.0)) throw ValidationError("margin", "must be >= 0");
    truth.validate_in(fs.domain());
    true_values_.reserve(fs.size());
    for (const auto& c : fs.constraints()) true_values_.push_back(truth.expectation(c.g, fs.domain()));
}

std::optional<double> ClampedStepOracle::refine(std::size_t index, double current_epsilon) {
    const double floor = true_values_.at(index) + margin_;
    if (current_epsilon <= floor + 1e-12) return std::nullopt;
    return std::max(current_epsilon - step_, floor);
}

std::string_view termination_name(TerminationReason reason) {
    switch (reason) {
    case TerminationReason::MaxIterations:
        return "max_iterations";
    case TerminationReason::NoRefinableForecast:
        return "no_refinable_forecast";
    case TerminationReason::ImprovementBelowTolerance:
        return "improvement_below_tolerance";
    }
    return "unknown";
}

namespace {

RefinementRecord make_record(std::size_t k, const std::vector<double>& eps, const PlanningSolution& sol) {
    RefinementRecord r;
    r.iteration = k;
    r.epsilon = eps;
    r.objective = sol.objective;
    r.b_star = sol.b_star;
    r.lambda = sol.lambda_star;
    return r;
}

// Forecast indices by descending lambda, lowest index first on ties, keeping
// only those above the floor.
std::vector<std::size_t> ranking(const std::vector<double>& lambda, double floor) {
    std::vector<std::size_t> order(lambda.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return lambda[a] > lambda[b]; });
    std::erase_if(order, [&](std::size_t i) { return !(lambda[i] > floor); });
    return order;
}

} // namespace

RefinementTrace refine_loop(const ForecastSet& fs, const Utility& u, RefinementOracle& oracle,
                            const RefineOptions& options) {
    RefinementTrace trace;
    std::vector<double> eps = fs.epsilons();
    PlanningSolution sol = solve(fs, u, options.exchange);

    for (std::size_t k = 0;; ++k) {
        trace.iterations.push_back(make_record(k, eps, sol));
        if (k >= options.max_iterations) {
            trace.termination = TerminationReason::MaxIterations;
            return trace;
        }

        std::optional<std::size_t> chosen;
        double new_eps = 0.0;
        for (std::size_t j : ranking(sol.lambda_star, options.sensitivity_floor)) {
            const auto offered = oracle.refine(j, eps[j]);
            if (!offered) continue;
            if (*offered > eps[j]) {
                std::ostringstream msg;
                msg << "oracle raised bound " << j << " from " << eps[j] << " to " << *offered;
                throw ContractViolation(msg.str());
            }
            if (*offered == eps[j]) continue;
            chosen = j;
            new_eps = *offered;
            break;
        }
        if (!chosen) {
            trace.termination = TerminationReason::NoRefinableForecast;
            return trace;
        }

        auto next_eps = eps;
        next_eps[*chosen] = new_eps;
        PlanningSolution next;
        try {
            next = solve(fs.with_epsilons(next_eps), u, options.exchange);
        } catch (const AmbiguitySetEmpty&) {
            trace.rolled_back = true;
            trace.termination = TerminationReason::NoRefinableForecast;
            return trace;
        }

        auto& record = trace.iterations.back();
        record.refined_index = chosen;
        record.new_epsilon = new_eps;

        const double improvement = next.objective - sol.objective;
        eps = std::move(next_eps);
        sol = std::move(next);
        if (improvement < options.improvement_tolerance) {
            trace.iterations.push_back(make_record(k + 1, eps, sol));
            trace.termination = TerminationReason::ImprovementBelowTolerance;
            return trace;
        }
    }
}

} // namespace robplan
