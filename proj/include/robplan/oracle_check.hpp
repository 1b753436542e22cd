#pragma once

// Brute-force primal: the inner minimization as an LP over atom
// probabilities on a fine grid. Independent of the dual reformulation, it is
// the reference the dual path is checked against.

#include "robplan/forecast.hpp"
#include "robplan/robust_solver.hpp"
#include "robplan/utility.hpp"

#include <cstddef>

namespace robplan {

struct GridSpec {
    std::size_t base_points = 512;
    /// Offset of the extra atom placed just left of every breakpoint, standing
    /// in for the left limit of a half-open interval.
    double epsilon_shift = 1e-9;

    /// Throws ValidationError; the shift must be smaller than every gap
    /// between consecutive breakpoints of fs.
    void validate(const ForecastSet& fs) const;
};

struct BruteForceResult {
    double value = 0.0;
    DiscreteDistribution worst;
};

/// min E J(x, b) over distributions on the augmented grid satisfying fs.
/// Throws AmbiguitySetEmpty when no grid distribution satisfies fs.
BruteForceResult brute_force_worst_case(const ForecastSet& fs, const Utility& u, double b,
                                        const GridSpec& grid = {});

struct BruteForcePlan {
    double b = 0.0;
    double value = 0.0;
};

/// Maximizes brute_force_worst_case over b_grid evenly spaced decisions;
/// lowest b wins ties.
BruteForcePlan brute_force_plan(const ForecastSet& fs, const Utility& u, std::size_t b_grid,
                                const GridSpec& grid = {});

/// |brute_force_worst_case - worst_case_value| at b.
double duality_gap(const ForecastSet& fs, const Utility& u, double b, const GridSpec& grid = {},
                   const ExchangeConfig& cfg = {});

/// Copy of `sol` with the brute-force worst-case distribution at b_star attached.
PlanningSolution with_worst_case(PlanningSolution sol, const ForecastSet& fs, const Utility& u,
                                 const GridSpec& grid = {});

} // namespace robplan
