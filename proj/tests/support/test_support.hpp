#pragma once
// Shared fixtures for the test executables: seeded instance generators and
// reference computations that do not go through the dual LP.

#include "robplan/forecast.hpp"
#include "robplan/lp.hpp"
#include "robplan/utility.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace robplan::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Desk-scale instances on [0, 1] with two intervals split at 0.5.
inline PredictionIntervals two_intervals(double lo1, double lo2, double hi1, double hi2) {
    return {{0.0, 0.5, 1.0}, {lo1, lo2}, {hi1, hi2}};
}

inline PredictionIntervals vacuous_m2() { return two_intervals(0.0, 0.0, 1.0, 1.0); }
inline PredictionIntervals binding_pair_m2() { return two_intervals(0.0, 0.6, 0.4, 1.0); }
inline PredictionIntervals spread_m2() { return two_intervals(0.2, 0.3, 0.7, 0.8); }
inline PredictionIntervals upper_half_m2() { return two_intervals(0.0, 1.0, 0.0, 1.0); }

inline ForecastSet mean_pinned() {
    return ForecastSet({0.0, 1.0}, {{Affine{0.0, 1.0}, 0.5, std::nullopt},
                                    {Affine{0.0, -1.0}, -0.5, std::nullopt}});
}

/// Random interval forecasts built around a hidden interval distribution.
/// Every bound keeps strict slack around the hidden probabilities.
struct IntervalInstance {
    PredictionIntervals pi;
    Utility utility;
    std::vector<double> interval_truth;
    /// Atoms at interval midpoints carrying interval_truth.
    DiscreteDistribution truth;
};

inline std::vector<double> random_simplex_point(Rng& rng, std::size_t m) {
    std::vector<double> w(m);
    std::exponential_distribution<double> expo(1.0);
    for (auto& v : w) v = expo(rng) + 0.05;
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& v : w) v /= s;
    // Absorb rounding so the vector sums to one as exactly as possible.
    w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
    return w;
}

inline std::vector<double> random_breakpoints(Rng& rng, std::size_t m) {
    auto widths = random_simplex_point(rng, m);
    std::vector<double> bps{0.0};
    for (std::size_t i = 0; i + 1 < m; ++i) bps.push_back(bps.back() + widths[i]);
    bps.push_back(1.0);
    return bps;
}

inline IntervalInstance random_interval_instance(Rng& rng, std::size_t m_lo = 2, std::size_t m_hi = 8) {
    const std::size_t m = uniform_index(rng, m_lo, m_hi);
    PredictionIntervals pi;
    pi.breakpoints = random_breakpoints(rng, m);
    auto t = random_simplex_point(rng, m);
    for (std::size_t i = 0; i < m; ++i) {
        pi.lower_probs.push_back(std::max(0.0, t[i] - uniform(rng, 0.01, 0.3)));
        pi.upper_probs.push_back(std::min(1.0, t[i] + uniform(rng, 0.01, 0.3)));
    }
    const double p = uniform(rng, 0.1, 2.5);
    const double q = uniform(rng, p + 0.1, 3.0);
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < m; ++i)
        atoms.push_back({0.5 * (pi.breakpoints[i] + pi.breakpoints[i + 1]), t[i]});
    return {std::move(pi), market_bidding(p, q), t, DiscreteDistribution(std::move(atoms))};
}

/// Worst case of E J(x, b) over interval forecasts by a fractional knapsack:
/// start every interval at its lower bound, then pour the remaining mass into
/// the intervals with the lowest attainable utility, each up to its upper
/// bound. The infimum of a concave J over an interval sits at an endpoint.
inline double greedy_worst_case(const PredictionIntervals& pi, const Utility& u, double b) {
    const std::size_t m = pi.num_intervals();
    std::vector<double> low(m);
    for (std::size_t i = 0; i < m; ++i)
        low[i] = std::min(u.eval(pi.breakpoints[i], b), u.eval(pi.breakpoints[i + 1], b));
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto c) { return low[a] < low[c]; });
    double remaining = 1.0;
    double value = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        remaining -= pi.lower_probs[i];
        value += pi.lower_probs[i] * low[i];
    }
    for (auto i : order) {
        const double add = std::clamp(remaining, 0.0, pi.upper_probs[i] - pi.lower_probs[i]);
        value += add * low[i];
        remaining -= add;
    }
    return value;
}

/// max_b of a concave function over [lo, hi] by golden-section search.
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, int iters = 200) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, c = hi;
    double x1 = c - r * (c - a), x2 = a + r * (c - a);
    double f1 = f(x1), f2 = f(x2);
    for (int k = 0; k < iters && c - a > 1e-13; ++k) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (c - a);
            f2 = f(x2);
        } else {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - r * (c - a);
            f1 = f(x1);
        }
    }
    double best_b = 0.5 * (a + c);
    double best = f(best_b);
    for (double b : {lo, hi, x1, x2}) {
        const double v = f(b);
        if (v > best) {
            best = v;
            best_b = b;
        }
    }
    return {best_b, best};
}

/// Robust optimum of an interval instance from the greedy inner oracle.
inline std::pair<double, double> greedy_plan(const PredictionIntervals& pi, const Utility& u) {
    const auto& bounds = u.decision_bounds();
    return golden_max([&](double b) { return greedy_worst_case(pi, u, b); }, bounds.lower, bounds.upper);
}

/// Exhaustive vertex search for tiny LPs (a handful of variables). Every
/// choice of n tight constraints among rows and finite bounds is solved by
/// Gaussian elimination and kept if feasible. Returns nullopt when no vertex
/// is feasible.
inline std::optional<double> vertex_enumeration_optimum(const lp::LinearProgram& p) {
    const std::size_t n = p.num_variables();
    std::vector<std::vector<double>> a;
    std::vector<double> rhs;
    for (std::size_t r = 0; r < p.num_rows(); ++r) {
        auto row = p.constraints.row(r);
        a.emplace_back(row.begin(), row.end());
        rhs.push_back(p.rhs[r]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (double bound : {p.lower_bounds[j], p.upper_bounds[j]}) {
            if (!std::isfinite(bound)) continue;
            std::vector<double> row(n, 0.0);
            row[j] = 1.0;
            a.push_back(row);
            rhs.push_back(bound);
        }
    }
    const std::size_t k = a.size();
    std::optional<double> best;
    if (k < n) return best;
    std::vector<bool> pick(k, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(std::min(n, k)), true);
    do {
        std::vector<std::vector<double>> m;
        std::vector<double> v;
        for (std::size_t i = 0; i < k; ++i)
            if (pick[i]) {
                m.push_back(a[i]);
                v.push_back(rhs[i]);
            }
        bool singular = false;
        for (std::size_t c = 0; c < n && !singular; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < n; ++r)
                if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
            if (std::abs(m[piv][c]) < 1e-12) {
                singular = true;
                break;
            }
            std::swap(m[c], m[piv]);
            std::swap(v[c], v[piv]);
            for (std::size_t r = 0; r < n; ++r) {
                if (r == c) continue;
                const double f = m[r][c] / m[c][c];
                for (std::size_t cc = c; cc < n; ++cc) m[r][cc] -= f * m[c][cc];
                v[r] -= f * v[c];
            }
        }
        if (singular) continue;
        std::vector<double> x(n);
        for (std::size_t c = 0; c < n; ++c) x[c] = v[c] / m[c][c];
        if (lp::max_violation(p, x) > 1e-9) continue;
        double obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) obj += p.objective[j] * x[j];
        if (!best || (p.sense == lp::Sense::Maximize ? obj > *best : obj < *best)) best = obj;
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return best;
}

/// Random bounded LP with a known interior point, so it is always feasible.
inline lp::LinearProgram random_feasible_lp(Rng& rng, std::size_t n, std::size_t rows,
                                            bool allow_equality = true) {
    lp::LinearProgram p;
    p.sense = uniform(rng, 0.0, 1.0) < 0.5 ? lp::Sense::Maximize : lp::Sense::Minimize;
    std::vector<double> x0(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = uniform(rng, -2.0, 0.0);
        const double hi = uniform(rng, 0.5, 3.0);
        p.add_variable(uniform(rng, -5.0, 5.0), lo, hi);
        x0[j] = uniform(rng, lo + 0.25 * (hi - lo), hi - 0.25 * (hi - lo));
    }
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<double> row(n);
        for (auto& c : row) c = uniform(rng, -3.0, 3.0);
        double at = 0.0;
        for (std::size_t j = 0; j < n; ++j) at += row[j] * x0[j];
        const double pick = uniform(rng, 0.0, 1.0);
        if (pick < 0.45)
            p.add_row(row, lp::RowSense::LessEqual, at + uniform(rng, 0.05, 1.0));
        else if (pick < 0.9 || !allow_equality)
            p.add_row(row, lp::RowSense::GreaterEqual, at - uniform(rng, 0.05, 1.0));
        else
            p.add_row(row, lp::RowSense::Equal, at);
    }
    return p;
}

} // namespace robplan::testing
