#include "robplan/sensitivity.hpp"

#include "robplan/errors.hpp"

#include <algorithm>

namespace robplan {

std::string_view bound_kind_name(BoundKind kind) {
    switch (kind) {
    case BoundKind::Upper:
        return "upper";
    case BoundKind::Lower:
        return "lower";
    case BoundKind::Generic:
        return "generic";
    }
    return "generic";
}

std::vector<double> SensitivityReport::lambdas_by_index() const {
    std::vector<double> out(entries.size(), 0.0);
    for (const auto& e : entries) out.at(e.forecast_index) = e.lambda;
    return out;
}

SensitivityReport sensitivities(const PlanningSolution& sol, const ForecastSet& fs) {
    if (sol.lambda_star.size() != fs.size())
        throw PreconditionError("solution has " + std::to_string(sol.lambda_star.size()) +
                                " multipliers but the forecast set has " + std::to_string(fs.size()));
    SensitivityReport report;
    report.base_objective = sol.objective;
    report.entries.reserve(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i)
        report.entries.push_back({i, fs[i].kind(), fs[i].interval, sol.lambda_star[i]});
    std::stable_sort(report.entries.begin(), report.entries.end(),
                     [](const SensitivityEntry& a, const SensitivityEntry& b) { return a.lambda > b.lambda; });
    return report;
}

double lower_bound_after_change(const SensitivityReport& report, std::span<const double> delta_eps) {
    if (delta_eps.size() != report.entries.size())
        throw PreconditionError("delta_eps has " + std::to_string(delta_eps.size()) +
                                " entries, expected " + std::to_string(report.entries.size()));
    double bound = report.base_objective;
    for (const auto& e : report.entries) bound += e.lambda * delta_eps[e.forecast_index];
    return bound;
}

std::vector<double> interval_tightening(std::size_t num_intervals, std::size_t interval,
                                        BoundKind kind, double amount) {
    if (interval >= num_intervals) throw PreconditionError("interval index out of range");
    std::vector<double> delta(2 * num_intervals, 0.0);
    switch (kind) {
    case BoundKind::Upper:
        delta[interval] = amount;
        break;
    case BoundKind::Lower:
        delta[num_intervals + interval] = amount;
        break;
    case BoundKind::Generic:
        throw PreconditionError("interval_tightening needs an upper or lower bound");
    }
    return delta;
}

} // namespace robplan
