#pragma once

#include <span>
#include <vector>

namespace robplan {

/// One affine piece a + c x + d b.
struct AffinePiece {
    double a = 0.0;
    double c = 0.0;
    double d = 0.0;
};

struct DecisionBounds {
    double lower = 0.0;
    double upper = 1.0;
};

/// Planner utility J(x, b) = min_k (a_k + c_k x + d_k b). A minimum of affine
/// functions is jointly concave, so it is concave in x for fixed b and in b
/// for fixed x.
class Utility {
public:
    Utility(std::vector<AffinePiece> pieces, DecisionBounds bounds);

    const std::vector<AffinePiece>& pieces() const noexcept { return pieces_; }
    const DecisionBounds& decision_bounds() const noexcept { return bounds_; }

    /// Throws DomainError for non-finite x or b outside the decision bounds.
    double eval(double x, double b) const;

    /// out[j] = J(xs[j], b) through the vector kernels; no range checks.
    void eval_batch(std::span<const double> xs, double b, std::span<double> out) const;

    /// x locations in [lo, hi] where the active piece changes for fixed b.
    std::vector<double> kinks_in_x(double b, double lo, double hi) const;

    /// All coefficients multiplied by alpha > 0.
    Utility scaled(double alpha) const;

private:
    std::vector<AffinePiece> pieces_;
    DecisionBounds bounds_;
};

/// Market bidding profit p b - q [b - x]_+ with 0 < p < q, stored as
/// min(p b, q x + (p - q) b).
Utility market_bidding(double p, double q, double b_lo = 0.0, double b_hi = 1.0);

} // namespace robplan
