#include "robplan/oracle_check.hpp"

#include "robplan/errors.hpp"
#include "robplan/lp.hpp"

#include <algorithm>
#include <cmath>

namespace robplan {

void GridSpec::validate(const ForecastSet& fs) const {
    if (base_points < 2) throw ValidationError("base_points", "must be >= 2");
    if (!(epsilon_shift > 0.0)) throw ValidationError("epsilon_shift", "must be > 0");
    const auto bps = fs.breakpoints();
    for (std::size_t j = 1; j < bps.size(); ++j)
        if (!(epsilon_shift < bps[j] - bps[j - 1]))
            throw ValidationError("epsilon_shift", "must be smaller than the narrowest interval");
}

BruteForceResult brute_force_worst_case(const ForecastSet& fs, const Utility& u, double b,
                                        const GridSpec& grid) {
    grid.validate(fs);
    u.eval(fs.domain().lower, b); // range check on b

    const auto kinks = u.kinks_in_x(b, fs.domain().lower, fs.domain().upper);
    const auto xs = augmented_grid(fs, grid.base_points, grid.epsilon_shift, kinks);
    const std::size_t atoms = xs.size();

    std::vector<double> utility(atoms);
    u.eval_batch(xs, b, utility);

    lp::LinearProgram problem;
    problem.sense = lp::Sense::Minimize;
    for (std::size_t j = 0; j < atoms; ++j) problem.add_variable(utility[j]);

    std::vector<double> row(atoms);
    for (const auto& c : fs.constraints()) {
        std::fill(row.begin(), row.end(), 0.0);
        accumulate_g(c.g, 1.0, xs, row);
        problem.add_row(row, lp::RowSense::LessEqual, c.epsilon);
    }
    std::fill(row.begin(), row.end(), 1.0);
    problem.add_row(row, lp::RowSense::Equal, 1.0);

    const auto result = lp::solve_lp(problem);
    if (result.status == lp::Status::Infeasible)
        throw AmbiguitySetEmpty("no distribution on the grid satisfies the forecasts");
    if (result.status == lp::Status::Unbounded)
        throw InternalError("brute-force primal reported unbounded");

    const auto& p = *result.solution;
    std::vector<Atom> support;
    double total = 0.0;
    for (std::size_t j = 0; j < atoms; ++j) {
        if (p[j] <= 0.0) continue;
        support.push_back({xs[j], p[j]});
        total += p[j];
    }
    for (auto& a : support) a.probability /= total;
    return {*result.objective_value, DiscreteDistribution(std::move(support))};
}

BruteForcePlan brute_force_plan(const ForecastSet& fs, const Utility& u, std::size_t b_grid,
                                const GridSpec& grid) {
    if (b_grid < 2) throw PreconditionError("b_grid must be >= 2");
    const auto& bounds = u.decision_bounds();
    BruteForcePlan best{bounds.lower, -lp::kInf};
    for (std::size_t i = 0; i < b_grid; ++i) {
        double b = bounds.lower +
                   (bounds.upper - bounds.lower) * static_cast<double>(i) / static_cast<double>(b_grid - 1);
        if (i + 1 == b_grid) b = bounds.upper;
        const double value = brute_force_worst_case(fs, u, b, grid).value;
        if (value > best.value) best = {b, value};
    }
    return best;
}

double duality_gap(const ForecastSet& fs, const Utility& u, double b, const GridSpec& grid,
                   const ExchangeConfig& cfg) {
    const double primal = brute_force_worst_case(fs, u, b, grid).value;
    const double dual = worst_case_value(fs, u, b, cfg).value;
    return std::abs(primal - dual);
}

PlanningSolution with_worst_case(PlanningSolution sol, const ForecastSet& fs, const Utility& u,
                                 const GridSpec& grid) {
    sol.worst_case_distribution = brute_force_worst_case(fs, u, sol.b_star, grid).worst;
    return sol;
}

} // namespace robplan
