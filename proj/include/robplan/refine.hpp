#pragma once

// Sensitivity-driven forecast refinement: repeatedly solve, pick the forecast
// with the largest multiplier and ask an external oracle to tighten it,
// holding every other bound fixed.

#include "robplan/forecast.hpp"
#include "robplan/robust_solver.hpp"
#include "robplan/utility.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace robplan {

/// Source of tighter bounds. refine() returns a value <= current_epsilon, or
/// nullopt when it cannot improve forecast `index` right now.
class RefinementOracle {
public:
    virtual ~RefinementOracle() = default;
    virtual std::optional<double> refine(std::size_t index, double current_epsilon) = 0;
};

/// Moves a bound by `step` toward the truth, stopping `margin` short of the
/// true value E_truth g_i.
class ClampedStepOracle final : public RefinementOracle {
public:
    ClampedStepOracle(DiscreteDistribution truth, const ForecastSet& fs, double step, double margin);

    std::optional<double> refine(std::size_t index, double current_epsilon) override;

    const std::vector<double>& true_values() const noexcept { return true_values_; }

private:
    std::vector<double> true_values_;
    double step_;
    double margin_;
};

/// Oracle that never refines anything.
class ExhaustedOracle final : public RefinementOracle {
public:
    std::optional<double> refine(std::size_t, double) override { return std::nullopt; }
};

enum class TerminationReason { MaxIterations, NoRefinableForecast, ImprovementBelowTolerance };

std::string_view termination_name(TerminationReason reason);

struct RefinementRecord {
    std::size_t iteration = 0;
    /// Forecast tightened to produce the next record; empty on the last one.
    std::optional<std::size_t> refined_index;
    /// Bound assigned to refined_index for the next iteration.
    std::optional<double> new_epsilon;
    std::vector<double> epsilon;
    double objective = 0.0;
    double b_star = 0.0;
    std::vector<double> lambda;
};

struct RefinementTrace {
    std::vector<RefinementRecord> iterations;
    TerminationReason termination = TerminationReason::MaxIterations;
    /// Set when a refinement emptied the ambiguity set and was rolled back.
    bool rolled_back = false;
};

struct RefineOptions {
    std::size_t max_iterations = 50;
    double improvement_tolerance = 1e-6;
    /// Forecasts with lambda at or below this are never sent to the oracle.
    double sensitivity_floor = 1e-8;
    ExchangeConfig exchange;
};

/// Throws ContractViolation if the oracle loosens a bound.
RefinementTrace refine_loop(const ForecastSet& fs, const Utility& u, RefinementOracle& oracle,
                            const RefineOptions& options = {});

} // namespace robplan
