#pragma once

// Robust planning: choose b to maximize the worst-case expected utility over
// every distribution consistent with the forecasts.
//
// The max-min problem is solved in its Lagrangian dual form
//
//   maximize_{b, lambda >= 0, eta}  -sum_i lambda_i eps_i - eta
//   subject to J(x, b) + sum_i lambda_i g_i(x) + eta >= 0   for all x,
//
// where the multipliers lambda double as forecast sensitivities. The
// semi-infinite constraint becomes finite in two ways:
//
//  * indicator-only forecasts: g is piecewise constant, J concave in x, so
//    each constant cell only needs its two endpoints;
//  * anything else: an exchange (cutting-plane) loop over a growing working
//    set, with violations located by a dense grid scan.

#include "robplan/forecast.hpp"
#include "robplan/utility.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace robplan {

enum class SolveMethod { IntervalReduction, CellReduction, Exchange };

struct PlanningSolution {
    double b_star = 0.0;
    /// Indexed like the ForecastSet (upper bounds first for interval sets).
    std::vector<double> lambda_star;
    double eta_star = 0.0;
    /// -sum lambda_i eps_i - eta
    double objective = 0.0;
    std::optional<DiscreteDistribution> worst_case_distribution;
    SolveMethod method = SolveMethod::IntervalReduction;
    /// Largest dual-constraint violation found by the final grid scan (0 for
    /// the exact reductions).
    double max_violation = 0.0;
    std::size_t rounds = 0;
};

struct ExchangeConfig {
    std::size_t initial_grid_points = 64;
    double violation_tolerance = 1e-7;
    std::size_t max_rounds = 100;
    std::size_t search_grid_points = 10'000;

    /// Throws ValidationError unless every field is positive.
    void validate() const;
};

class ConvergenceFailure : public std::runtime_error {
public:
    ConvergenceFailure(PlanningSolution best, double residual);

    const PlanningSolution& best() const noexcept { return best_; }
    double residual() const noexcept { return residual_; }

private:
    PlanningSolution best_;
    double residual_;
};

/// Exact finite LP with two endpoint rows per interval and utility piece.
PlanningSolution solve_prediction_intervals(const PredictionIntervals& pi, const Utility& u);

/// Endpoint reduction for any set of Indicator / NegIndicator forecasts.
PlanningSolution solve_indicator_set(const ForecastSet& fs, const Utility& u);

/// Exchange method for arbitrary forecasts.
PlanningSolution solve_generic(const ForecastSet& fs, const Utility& u,
                               const ExchangeConfig& cfg = {});

/// Picks the interval reduction, the cell reduction or the exchange method
/// from the shape of `fs`.
PlanningSolution solve(const ForecastSet& fs, const Utility& u, const ExchangeConfig& cfg = {});

struct WorstCaseValue {
    double value = 0.0;
    std::vector<double> duals;
    double eta = 0.0;
};

/// Worst-case expected utility of a fixed decision b (dual side).
WorstCaseValue worst_case_value(const ForecastSet& fs, const Utility& u, double b,
                                const ExchangeConfig& cfg = {});

struct SweepPoint {
    double b = 0.0;
    double worst_case = 0.0;
};

/// worst_case_value on grid_size evenly spaced decisions, both bounds included.
std::vector<SweepPoint> sweep(const ForecastSet& fs, const Utility& u, std::size_t grid_size,
                              const ExchangeConfig& cfg = {});

/// Expected utility of decision b under a known distribution.
double true_expected(const DiscreteDistribution& truth, const Utility& u, double b);

/// min_x J(x, b*) + sum lambda_i g_i(x) + eta over breakpoints, breakpoints -
/// 1e-9, utility kinks at b* and a uniform grid of `grid_points`. Nonnegative
/// (up to rounding) for a dual-feasible solution.
double min_dual_slack(const ForecastSet& fs, const Utility& u, const PlanningSolution& sol,
                      std::size_t grid_points = 2001);

} // namespace robplan
