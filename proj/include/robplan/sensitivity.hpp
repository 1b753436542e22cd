#pragma once

// Forecast sensitivities. The optimal multipliers lambda* give a one-sided
// guarantee for any change of the bound vector:
//
//   P*(eps - d) >= P*(eps) + sum_i lambda*_i d_i
//
// so a large lambda_i marks forecast i as worth refining.

#include "robplan/forecast.hpp"
#include "robplan/robust_solver.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace robplan {

std::string_view bound_kind_name(BoundKind kind);

struct SensitivityEntry {
    std::size_t forecast_index = 0;
    BoundKind kind = BoundKind::Generic;
    std::optional<std::size_t> interval_index;
    double lambda = 0.0;
};

struct SensitivityReport {
    /// Descending by lambda, ties broken by lowest forecast index.
    std::vector<SensitivityEntry> entries;
    double base_objective = 0.0;

    /// lambda values back in forecast order.
    std::vector<double> lambdas_by_index() const;
};

/// Throws PreconditionError when the solution's multiplier count differs from fs.
SensitivityReport sensitivities(const PlanningSolution& sol, const ForecastSet& fs);

/// base_objective + sum_i lambda_i * delta_eps_i. Positive delta_eps_i
/// tightens constraint i.
double lower_bound_after_change(const SensitivityReport& report, std::span<const double> delta_eps);

/// Coordinate change in generic form for a user-facing interval edit: lowering
/// upper_probs[i] by t or raising lower_probs[i] by t both map to +t.
std::vector<double> interval_tightening(std::size_t num_intervals, std::size_t interval,
                                        BoundKind kind, double amount);

} // namespace robplan
