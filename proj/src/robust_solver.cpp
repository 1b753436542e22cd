#include "robplan/robust_solver.hpp"

#include "robplan/errors.hpp"
#include "robplan/kernels.hpp"
#include "robplan/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace robplan {
namespace {

// A point x of the domain together with the forecast function values that
// hold on the stretch of domain it represents.
struct ConstraintPoint {
    double x = 0.0;
    std::vector<double> g;
};

// Dual LP over (b, lambda, eta) restricted to finitely many points. With
// `fixed_b` set, b is a constant rather than a variable.
class DualProgram {
public:
    DualProgram(const ForecastSet& fs, const Utility& u, std::optional<double> fixed_b)
        : fs_(fs), u_(u), fixed_b_(fixed_b), n_(fs.size()) {
        problem_.sense = lp::Sense::Maximize;
        if (!fixed_b_) {
            const auto& bounds = u.decision_bounds();
            b_col_ = problem_.add_variable(0.0, bounds.lower, bounds.upper);
        }
        lambda_col_ = problem_.num_variables();
        for (const auto& c : fs.constraints()) problem_.add_variable(-c.epsilon, 0.0, lp::kInf);
        eta_col_ = problem_.add_variable(-1.0, -lp::kInf, lp::kInf);
        row_.assign(problem_.num_variables(), 0.0);
    }

    // J(x, b) + sum lambda_i g_i + eta >= 0, one row per utility piece.
    void add_point(const ConstraintPoint& p) {
        for (const auto& piece : u_.pieces()) {
            std::fill(row_.begin(), row_.end(), 0.0);
            double rhs = -(piece.a + piece.c * p.x);
            if (fixed_b_)
                rhs -= piece.d * *fixed_b_;
            else
                row_[b_col_] = piece.d;
            for (std::size_t i = 0; i < n_; ++i) row_[lambda_col_ + i] = p.g[i];
            row_[eta_col_] = 1.0;
            problem_.add_row(row_, lp::RowSense::GreaterEqual, rhs);
        }
    }

    PlanningSolution solve(SolveMethod method) const {
        const auto result = lp::solve_lp(problem_);
        if (result.status == lp::Status::Unbounded)
            throw AmbiguitySetEmpty("the forecasts admit no probability distribution");
        if (result.status == lp::Status::Infeasible)
            throw InternalError("dual planning LP reported infeasible");
        const auto& x = *result.solution;
        PlanningSolution sol;
        sol.method = method;
        sol.b_star = fixed_b_ ? *fixed_b_ : x[b_col_];
        sol.lambda_star.assign(x.begin() + static_cast<std::ptrdiff_t>(lambda_col_),
                               x.begin() + static_cast<std::ptrdiff_t>(lambda_col_ + n_));
        sol.eta_star = x[eta_col_];
        double objective = -sol.eta_star;
        for (std::size_t i = 0; i < n_; ++i) objective -= sol.lambda_star[i] * fs_[i].epsilon;
        sol.objective = objective;
        return sol;
    }

private:
    const ForecastSet& fs_;
    const Utility& u_;
    std::optional<double> fixed_b_;
    std::size_t n_;
    lp::LinearProgram problem_;
    std::size_t b_col_ = 0;
    std::size_t lambda_col_ = 0;
    std::size_t eta_col_ = 0;
    std::vector<double> row_;
};

std::vector<double> g_values(const ForecastSet& fs, double x) {
    std::vector<double> out(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) out[i] = evaluate_g(fs[i].g, x, fs.domain());
    return out;
}

void check_decision(const Utility& u, double b) {
    const auto& bounds = u.decision_bounds();
    if (!(b >= bounds.lower && b <= bounds.upper)) {
        std::ostringstream msg;
        msg << "decision b = " << b << " outside [" << bounds.lower << ", " << bounds.upper << "]";
        throw DomainError(msg.str());
    }
}

// Two endpoint rows per interval: interval i's multipliers hold on the whole
// closure [x_{i-1}, x_i] because J is continuous.
PlanningSolution interval_reduction(const PredictionIntervals& pi, const ForecastSet& fs,
                                    const Utility& u, std::optional<double> fixed_b) {
    const std::size_t m = pi.num_intervals();
    DualProgram program(fs, u, fixed_b);
    ConstraintPoint point{0.0, std::vector<double>(2 * m, 0.0)};
    for (std::size_t i = 0; i < m; ++i) {
        std::fill(point.g.begin(), point.g.end(), 0.0);
        point.g[i] = 1.0;
        point.g[m + i] = -1.0;
        for (double e : {pi.breakpoints[i], pi.breakpoints[i + 1]}) {
            point.x = e;
            program.add_point(point);
        }
    }
    return program.solve(SolveMethod::IntervalReduction);
}

// Every breakpoint is a cell of its own; between consecutive breakpoints the
// indicators are constant and the closure endpoints carry the interior values.
PlanningSolution cell_reduction(const ForecastSet& fs, const Utility& u,
                                std::optional<double> fixed_b) {
    DualProgram program(fs, u, fixed_b);
    const auto bps = fs.breakpoints();
    for (std::size_t j = 0; j < bps.size(); ++j) {
        program.add_point({bps[j], g_values(fs, bps[j])});
        if (j + 1 < bps.size()) {
            const auto inner = g_values(fs, 0.5 * (bps[j] + bps[j + 1]));
            program.add_point({bps[j], inner});
            program.add_point({bps[j + 1], inner});
        }
    }
    return program.solve(SolveMethod::CellReduction);
}

// Decision values whose utility kinks should be in the initial working set.
std::vector<double> kink_candidates(const ForecastSet& fs, const Utility& u,
                                    std::optional<double> fixed_b) {
    const auto& d = fs.domain();
    if (fixed_b) return u.kinks_in_x(*fixed_b, d.lower, d.upper);
    const auto& bounds = u.decision_bounds();
    std::vector<double> out;
    for (double b : {bounds.lower, 0.5 * (bounds.lower + bounds.upper), bounds.upper}) {
        auto k = u.kinks_in_x(b, d.lower, d.upper);
        out.insert(out.end(), k.begin(), k.end());
    }
    return out;
}

PlanningSolution exchange(const ForecastSet& fs, const Utility& u, const ExchangeConfig& cfg,
                          std::optional<double> fixed_b) {
    cfg.validate();
    const auto initial_kinks = kink_candidates(fs, u, fixed_b);
    std::vector<double> working =
        augmented_grid(fs, std::max<std::size_t>(cfg.initial_grid_points, 2), 1e-9, initial_kinks);

    PlanningSolution best;
    double best_violation = lp::kInf;
    std::vector<double> slack;
    for (std::size_t round = 1; round <= cfg.max_rounds; ++round) {
        DualProgram program(fs, u, fixed_b);
        for (double x : working) program.add_point({x, g_values(fs, x)});
        PlanningSolution sol = program.solve(SolveMethod::Exchange);
        sol.rounds = round;

        const auto kinks = u.kinks_in_x(sol.b_star, fs.domain().lower, fs.domain().upper);
        const auto search = augmented_grid(fs, cfg.search_grid_points, 1e-9, kinks);
        slack.assign(search.size(), 0.0);
        u.eval_batch(search, sol.b_star, slack);
        for (std::size_t i = 0; i < fs.size(); ++i)
            if (sol.lambda_star[i] != 0.0) accumulate_g(fs[i].g, sol.lambda_star[i], search, slack);
        const auto worst = kernels::argmin(slack);
        const double violation = std::max(0.0, -(worst.value + sol.eta_star));
        sol.max_violation = violation;

        if (violation <= cfg.violation_tolerance) return sol;
        if (violation < best_violation) {
            best = sol;
            best_violation = violation;
        }
        const double x_new = search[worst.index];
        const auto pos = std::lower_bound(working.begin(), working.end(), x_new);
        if (pos == working.end() || *pos != x_new) working.insert(pos, x_new);
    }
    throw ConvergenceFailure(best, best_violation);
}

} // namespace

void ExchangeConfig::validate() const {
    if (initial_grid_points == 0)
        throw ValidationError("initial_grid_points", "must be positive");
    if (!(violation_tolerance > 0.0))
        throw ValidationError("violation_tolerance", "must be positive");
    if (max_rounds == 0) throw ValidationError("max_rounds", "must be positive");
    if (search_grid_points < 2) throw ValidationError("search_grid_points", "must be >= 2");
}

ConvergenceFailure::ConvergenceFailure(PlanningSolution best, double residual)
    : std::runtime_error("exchange method did not converge (residual violation " +
                         std::to_string(residual) + ")"),
      best_(std::move(best)), residual_(residual) {}

PlanningSolution solve_prediction_intervals(const PredictionIntervals& pi, const Utility& u) {
    const auto fs = to_generic(pi);
    return interval_reduction(pi, fs, u, std::nullopt);
}

PlanningSolution solve_indicator_set(const ForecastSet& fs, const Utility& u) {
    if (!fs.indicator_only())
        throw PreconditionError("solve_indicator_set needs Indicator/NegIndicator forecasts only");
    return cell_reduction(fs, u, std::nullopt);
}

PlanningSolution solve_generic(const ForecastSet& fs, const Utility& u, const ExchangeConfig& cfg) {
    return exchange(fs, u, cfg, std::nullopt);
}

PlanningSolution solve(const ForecastSet& fs, const Utility& u, const ExchangeConfig& cfg) {
    // The recovered bounds may sit outside [0, 1] after a perturbation; the
    // endpoint LP is still the exact dual of the generic set in that case.
    if (auto pi = as_prediction_intervals(fs)) {
        return interval_reduction(*pi, fs, u, std::nullopt);
    }
    if (fs.indicator_only()) return cell_reduction(fs, u, std::nullopt);
    return exchange(fs, u, cfg, std::nullopt);
}

WorstCaseValue worst_case_value(const ForecastSet& fs, const Utility& u, double b,
                                const ExchangeConfig& cfg) {
    check_decision(u, b);
    PlanningSolution sol;
    if (auto pi = as_prediction_intervals(fs)) {
        sol = interval_reduction(*pi, fs, u, b);
    } else if (fs.indicator_only()) {
        sol = cell_reduction(fs, u, b);
    } else {
        sol = exchange(fs, u, cfg, b);
    }
    return {sol.objective, std::move(sol.lambda_star), sol.eta_star};
}

std::vector<SweepPoint> sweep(const ForecastSet& fs, const Utility& u, std::size_t grid_size,
                              const ExchangeConfig& cfg) {
    if (grid_size < 2) throw PreconditionError("sweep grid_size must be >= 2");
    const auto& bounds = u.decision_bounds();
    std::vector<SweepPoint> out;
    out.reserve(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) {
        double b = bounds.lower + (bounds.upper - bounds.lower) * static_cast<double>(i) /
                                      static_cast<double>(grid_size - 1);
        if (i + 1 == grid_size) b = bounds.upper;
        out.push_back({b, worst_case_value(fs, u, b, cfg).value});
    }
    return out;
}

double true_expected(const DiscreteDistribution& truth, const Utility& u, double b) {
    check_decision(u, b);
    std::vector<double> xs;
    std::vector<double> probs;
    xs.reserve(truth.size());
    probs.reserve(truth.size());
    for (const auto& a : truth.atoms()) {
        xs.push_back(a.location);
        probs.push_back(a.probability);
    }
    std::vector<double> values(xs.size());
    u.eval_batch(xs, b, values);
    return kernels::dot(probs, values);
}

double min_dual_slack(const ForecastSet& fs, const Utility& u, const PlanningSolution& sol,
                      std::size_t grid_points) {
    if (sol.lambda_star.size() != fs.size())
        throw PreconditionError("solution does not match the forecast set");
    const auto kinks = u.kinks_in_x(sol.b_star, fs.domain().lower, fs.domain().upper);
    const auto xs = augmented_grid(fs, grid_points, 1e-9, kinks);
    double worst = lp::kInf;
    for (double x : xs) {
        double v = u.eval(x, sol.b_star) + sol.eta_star;
        for (std::size_t i = 0; i < fs.size(); ++i)
            v += sol.lambda_star[i] * evaluate_g(fs[i].g, x, fs.domain());
        worst = std::min(worst, v);
    }
    return worst;
}

} // namespace robplan
