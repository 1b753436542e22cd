#pragma once

// Forecasts as moment constraints E[g_i(x)] <= epsilon_i on the unknown
// distribution of a scalar quantity x living in a closed interval.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace robplan {

struct Domain {
    double lower = 0.0;
    double upper = 1.0;

    /// Throws ValidationError unless lower < upper, both finite.
    void validate() const;
    bool contains(double x) const noexcept { return x >= lower && x <= upper; }
    double width() const noexcept { return upper - lower; }
};

/// 1{lo <= x < hi}, or 1{lo <= x <= hi} when closed_right.
struct Indicator {
    double lo = 0.0;
    double hi = 1.0;
    bool closed_right = false;
};

/// -1{...}; used to express lower probability bounds as upper bounds.
struct NegIndicator {
    double lo = 0.0;
    double hi = 1.0;
    bool closed_right = false;
};

/// c0 + c1 x
struct Affine {
    double c0 = 0.0;
    double c1 = 1.0;
};

/// x^k
struct Power {
    int k = 1;
};

/// -x^k
struct NegPower {
    int k = 1;
};

using ConstraintFunction = std::variant<Indicator, NegIndicator, Affine, Power, NegPower>;

bool is_indicator_like(const ConstraintFunction& g) noexcept;

/// Value of g at x. Throws DomainError when x is outside `domain`.
double evaluate_g(const ConstraintFunction& g, double x, const Domain& domain);

/// out[j] += weight * g(xs[j]) via the vector kernels; no domain check.
void accumulate_g(const ConstraintFunction& g, double weight, std::span<const double> xs,
                  std::span<double> out);

/// Points where g jumps (indicator endpoints), in no particular order.
std::vector<double> breakpoints_of(const ConstraintFunction& g);

std::string describe(const ConstraintFunction& g);

enum class BoundKind { Upper, Lower, Generic };

struct ForecastConstraint {
    ConstraintFunction g;
    double epsilon = 0.0;
    /// Set when the constraint was produced from a prediction interval.
    std::optional<std::size_t> interval;

    BoundKind kind() const noexcept;
};

/// The ambiguity set: every distribution on `domain` with E g_i <= eps_i.
class ForecastSet {
public:
    ForecastSet() = default;
    ForecastSet(Domain domain, std::vector<ForecastConstraint> constraints);

    const Domain& domain() const noexcept { return domain_; }
    const std::vector<ForecastConstraint>& constraints() const noexcept { return constraints_; }
    std::size_t size() const noexcept { return constraints_.size(); }
    bool empty() const noexcept { return constraints_.empty(); }
    const ForecastConstraint& operator[](std::size_t i) const { return constraints_[i]; }

    std::vector<double> epsilons() const;

    /// Copy with the bound vector replaced (same length).
    ForecastSet with_epsilons(std::span<const double> eps) const;

    /// True when every constraint is an Indicator or NegIndicator.
    bool indicator_only() const noexcept;

    /// Sorted, deduplicated domain endpoints plus every indicator endpoint.
    std::vector<double> breakpoints() const;

private:
    Domain domain_;
    std::vector<ForecastConstraint> constraints_;
};

/// Interval probability forecasts lower_probs[i] <= P(x in I_i) <= upper_probs[i]
/// on the partition I_i = [x_{i-1}, x_i), with the last interval closed.
struct PredictionIntervals {
    std::vector<double> breakpoints;
    std::vector<double> lower_probs;
    std::vector<double> upper_probs;

    std::size_t num_intervals() const noexcept { return lower_probs.size(); }
    Domain domain() const { return {breakpoints.front(), breakpoints.back()}; }

    /// Throws ValidationError naming the offending field, e.g. "upper_probs[0]".
    void validate() const;
};

/// Upper-bound constraints for intervals 1..m first, then lower bounds.
ForecastSet to_generic(const PredictionIntervals& pi);

/// Recovers interval form from a set produced by to_generic (possibly with
/// edited epsilons). Returns nullopt for any other shape.
std::optional<PredictionIntervals> as_prediction_intervals(const ForecastSet& fs);

struct Atom {
    double location = 0.0;
    double probability = 0.0;
};

class DiscreteDistribution {
public:
    DiscreteDistribution() = default;
    /// Throws ValidationError if probabilities are negative or do not sum to 1
    /// within 1e-12.
    explicit DiscreteDistribution(std::vector<Atom> atoms);

    static DiscreteDistribution dirac(double location) { return DiscreteDistribution({{location, 1.0}}); }

    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }

    /// Throws ValidationError when an atom lies outside the domain.
    void validate_in(const Domain& domain) const;

    double expectation(const ConstraintFunction& g, const Domain& domain) const;

    /// Largest violation max_i(E g_i - eps_i), clipped below at 0.
    double max_constraint_violation(const ForecastSet& fs) const;

private:
    std::vector<Atom> atoms_;
};

enum class SlackStatus { Bounded, Unbounded, Infeasible };

struct FeasibilitySlack {
    SlackStatus status = SlackStatus::Bounded;
    /// zeta*; +inf when Unbounded, NaN when Infeasible.
    double zeta = 0.0;
    /// Distribution attaining zeta* (empty unless Bounded).
    std::optional<DiscreteDistribution> witness;
};

/// Largest uniform slack min_i (eps_i - E g_i) achievable by a distribution on
/// a uniform grid of `grid_size` points augmented with indicator endpoints and
/// endpoint - 1e-9 points. zeta* > 0 certifies strict feasibility.
FeasibilitySlack strict_feasibility_slack(const ForecastSet& fs, std::size_t grid_size);

/// Radius of a ball of bound vectors around eps that keep the set nonempty,
/// min_i zeta / (1 + |eps_i - zeta|) capped at 1. Requires zeta > 0.
double feasibility_ball_radius(double zeta, std::span<const double> epsilons);

/// Uniform grid over the domain plus every breakpoint and breakpoint - shift
/// (when still inside), sorted and deduplicated.
std::vector<double> augmented_grid(const ForecastSet& fs, std::size_t base_points, double shift,
                                   std::span<const double> extra = {});

} // namespace robplan
