#pragma once

// JSON scenario files: domain, decision bounds, utility, forecasts and the
// optional truth distribution, oracle and solver overrides.

#include "robplan/forecast.hpp"
#include "robplan/oracle_check.hpp"
#include "robplan/refine.hpp"
#include "robplan/robust_solver.hpp"
#include "robplan/utility.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace robplan {

struct OracleSpec {
    double step = 0.05;
    double margin = 0.0;
};

struct Scenario {
    ForecastSet forecasts;
    std::optional<PredictionIntervals> intervals;
    Utility utility = market_bidding(1.0, 2.0);
    std::optional<DiscreteDistribution> truth;
    /// False when the truth violates a forecast by more than 1e-9.
    bool truth_consistent = true;
    std::optional<OracleSpec> oracle;
    ExchangeConfig exchange;
    GridSpec grid;
    RefineOptions refine;
};

/// Throws ValidationError whose field() is a dotted path such as
/// "forecasts.upper_probs[0]".
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

} // namespace robplan
