#include "robplan/forecast.hpp"

#include "robplan/errors.hpp"
#include "robplan/kernels.hpp"
#include "robplan/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <type_traits>

namespace robplan {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string indexed(const std::string& name, std::size_t i) {
    return name + "[" + std::to_string(i) + "]";
}

bool in_indicator(double lo, double hi, bool closed_right, double x) {
    return x >= lo && (closed_right ? x <= hi : x < hi);
}

double int_power(double x, int k) {
    double p = x;
    for (int e = 1; e < k; ++e) p = p * x;
    return p;
}

template <class T>
constexpr bool kIsIndicator = std::is_same_v<T, Indicator> || std::is_same_v<T, NegIndicator>;

void validate_function(const ConstraintFunction& g, const Domain& domain, const std::string& field) {
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (kIsIndicator<T>) {
                if (!std::isfinite(f.lo) || !std::isfinite(f.hi))
                    throw ValidationError(field, "indicator bounds must be finite");
                if (!(domain.lower <= f.lo && f.lo < f.hi && f.hi <= domain.upper))
                    throw ValidationError(field, "indicator bounds must satisfy lower <= lo < hi <= upper");
            } else if constexpr (std::is_same_v<T, Affine>) {
                if (!std::isfinite(f.c0) || !std::isfinite(f.c1))
                    throw ValidationError(field, "affine coefficients must be finite");
            } else {
                if (f.k < 1) throw ValidationError(field, "power exponent must be >= 1");
            }
        },
        g);
}

} // namespace

void Domain::validate() const {
    if (!std::isfinite(lower) || !std::isfinite(upper))
        throw ValidationError("domain", "bounds must be finite");
    if (!(lower < upper)) throw ValidationError("domain", "lower must be < upper");
}

bool is_indicator_like(const ConstraintFunction& g) noexcept {
    return std::holds_alternative<Indicator>(g) || std::holds_alternative<NegIndicator>(g);
}

double evaluate_g(const ConstraintFunction& g, double x, const Domain& domain) {
    if (!domain.contains(x)) {
        std::ostringstream msg;
        msg << "x = " << x << " outside [" << domain.lower << ", " << domain.upper << "]";
        throw DomainError(msg.str());
    }
    return std::visit(overloaded{
                          [x](const Indicator& i) { return in_indicator(i.lo, i.hi, i.closed_right, x) ? 1.0 : 0.0; },
                          [x](const NegIndicator& i) { return in_indicator(i.lo, i.hi, i.closed_right, x) ? -1.0 : 0.0; },
                          [x](const Affine& a) { return a.c0 + a.c1 * x; },
                          [x](const Power& p) { return int_power(x, p.k); },
                          [x](const NegPower& p) { return -int_power(x, p.k); },
                      },
                      g);
}

void accumulate_g(const ConstraintFunction& g, double weight, std::span<const double> xs,
                  std::span<double> out) {
    std::visit(overloaded{
                   [&](const Indicator& i) { kernels::add_indicator(xs, i.lo, i.hi, i.closed_right, weight, out); },
                   [&](const NegIndicator& i) { kernels::add_indicator(xs, i.lo, i.hi, i.closed_right, -weight, out); },
                   [&](const Affine& a) { kernels::add_affine(xs, a.c0, a.c1, weight, out); },
                   [&](const Power& p) { kernels::add_power(xs, p.k, weight, out); },
                   [&](const NegPower& p) { kernels::add_power(xs, p.k, -weight, out); },
               },
               g);
}

std::vector<double> breakpoints_of(const ConstraintFunction& g) {
    return std::visit(
        [](const auto& f) -> std::vector<double> {
            if constexpr (kIsIndicator<std::decay_t<decltype(f)>>)
                return {f.lo, f.hi};
            else
                return {};
        },
        g);
}

std::string describe(const ConstraintFunction& g) {
    std::ostringstream out;
    std::visit(overloaded{
                   [&](const Indicator& i) { out << "1[" << i.lo << ", " << i.hi << (i.closed_right ? "]" : ")"); },
                   [&](const NegIndicator& i) { out << "-1[" << i.lo << ", " << i.hi << (i.closed_right ? "]" : ")"); },
                   [&](const Affine& a) { out << a.c0 << " + " << a.c1 << "x"; },
                   [&](const Power& p) { out << "x^" << p.k; },
                   [&](const NegPower& p) { out << "-x^" << p.k; },
               },
               g);
    return out.str();
}

BoundKind ForecastConstraint::kind() const noexcept {
    if (!interval) return BoundKind::Generic;
    if (std::holds_alternative<Indicator>(g)) return BoundKind::Upper;
    if (std::holds_alternative<NegIndicator>(g)) return BoundKind::Lower;
    return BoundKind::Generic;
}

ForecastSet::ForecastSet(Domain domain, std::vector<ForecastConstraint> constraints)
    : domain_(domain), constraints_(std::move(constraints)) {
    domain_.validate();
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
        const auto field = indexed("constraints", i);
        validate_function(constraints_[i].g, domain_, field);
        if (!std::isfinite(constraints_[i].epsilon))
            throw ValidationError(field, "epsilon must be finite");
    }
}

std::vector<double> ForecastSet::epsilons() const {
    std::vector<double> out;
    out.reserve(constraints_.size());
    for (const auto& c : constraints_) out.push_back(c.epsilon);
    return out;
}

ForecastSet ForecastSet::with_epsilons(std::span<const double> eps) const {
    if (eps.size() != constraints_.size())
        throw ValidationError("epsilon", "length differs from the number of forecasts");
    auto copy = constraints_;
    for (std::size_t i = 0; i < copy.size(); ++i) copy[i].epsilon = eps[i];
    return ForecastSet(domain_, std::move(copy));
}

bool ForecastSet::indicator_only() const noexcept {
    return std::all_of(constraints_.begin(), constraints_.end(),
                       [](const ForecastConstraint& c) { return is_indicator_like(c.g); });
}

std::vector<double> ForecastSet::breakpoints() const {
    std::vector<double> out{domain_.lower, domain_.upper};
    for (const auto& c : constraints_) {
        auto b = breakpoints_of(c.g);
        out.insert(out.end(), b.begin(), b.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void PredictionIntervals::validate() const {
    if (breakpoints.size() < 2) throw ValidationError("breakpoints", "need at least two breakpoints");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!std::isfinite(breakpoints[i]))
            throw ValidationError(indexed("breakpoints", i), "must be finite");
        if (i > 0 && !(breakpoints[i - 1] < breakpoints[i]))
            throw ValidationError(indexed("breakpoints", i), "breakpoints must be strictly increasing");
    }
    const std::size_t m = breakpoints.size() - 1;
    if (lower_probs.size() != m)
        throw ValidationError("lower_probs", "expected " + std::to_string(m) + " entries");
    if (upper_probs.size() != m)
        throw ValidationError("upper_probs", "expected " + std::to_string(m) + " entries");
    for (std::size_t i = 0; i < m; ++i) {
        if (!std::isfinite(lower_probs[i]) || lower_probs[i] < 0.0 || lower_probs[i] > 1.0)
            throw ValidationError(indexed("lower_probs", i), "must lie in [0, 1]");
        if (!std::isfinite(upper_probs[i]) || upper_probs[i] < 0.0 || upper_probs[i] > 1.0)
            throw ValidationError(indexed("upper_probs", i), "must lie in [0, 1]");
        if (lower_probs[i] > upper_probs[i])
            throw ValidationError(indexed("upper_probs", i), "is below lower_probs[" + std::to_string(i) + "]");
    }
    const double lo_sum = std::accumulate(lower_probs.begin(), lower_probs.end(), 0.0);
    const double hi_sum = std::accumulate(upper_probs.begin(), upper_probs.end(), 0.0);
    if (lo_sum > 1.0 + 1e-12) throw ValidationError("lower_probs", "sum exceeds 1");
    if (hi_sum < 1.0 - 1e-12) throw ValidationError("upper_probs", "sum is below 1");
}

ForecastSet to_generic(const PredictionIntervals& pi) {
    pi.validate();
    const std::size_t m = pi.num_intervals();
    std::vector<ForecastConstraint> constraints;
    constraints.reserve(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        constraints.push_back({Indicator{pi.breakpoints[i], pi.breakpoints[i + 1], i + 1 == m},
                               pi.upper_probs[i], i});
    }
    for (std::size_t i = 0; i < m; ++i) {
        constraints.push_back({NegIndicator{pi.breakpoints[i], pi.breakpoints[i + 1], i + 1 == m},
                               -pi.lower_probs[i], i});
    }
    return ForecastSet(pi.domain(), std::move(constraints));
}

std::optional<PredictionIntervals> as_prediction_intervals(const ForecastSet& fs) {
    const std::size_t n = fs.size();
    if (n == 0 || n % 2 != 0) return std::nullopt;
    const std::size_t m = n / 2;
    PredictionIntervals pi;
    pi.breakpoints.push_back(fs.domain().lower);
    for (std::size_t i = 0; i < m; ++i) {
        const auto* up = std::get_if<Indicator>(&fs[i].g);
        const auto* lo = std::get_if<NegIndicator>(&fs[m + i].g);
        if (!up || !lo || fs[i].interval != i || fs[m + i].interval != i) return std::nullopt;
        if (up->lo != pi.breakpoints.back() || lo->lo != up->lo || lo->hi != up->hi) return std::nullopt;
        const bool last = i + 1 == m;
        if (up->closed_right != last || lo->closed_right != last) return std::nullopt;
        pi.breakpoints.push_back(up->hi);
        pi.upper_probs.push_back(fs[i].epsilon);
        pi.lower_probs.push_back(-fs[m + i].epsilon);
    }
    if (pi.breakpoints.back() != fs.domain().upper) return std::nullopt;
    return pi;
}

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw ValidationError("atoms", "distribution needs at least one atom");
    double total = 0.0;
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
        if (!std::isfinite(atoms_[j].location))
            throw ValidationError(indexed("atoms", j), "location must be finite");
        if (!std::isfinite(atoms_[j].probability) || atoms_[j].probability < 0.0)
            throw ValidationError(indexed("atoms", j), "probability must be >= 0");
        total += atoms_[j].probability;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ValidationError("atoms", "probabilities must sum to 1");
}

void DiscreteDistribution::validate_in(const Domain& domain) const {
    for (std::size_t j = 0; j < atoms_.size(); ++j)
        if (!domain.contains(atoms_[j].location))
            throw ValidationError(indexed("atoms", j), "location outside the domain");
}

double DiscreteDistribution::expectation(const ConstraintFunction& g, const Domain& domain) const {
    double sum = 0.0;
    for (const auto& a : atoms_) sum += a.probability * evaluate_g(g, a.location, domain);
    return sum;
}

double DiscreteDistribution::max_constraint_violation(const ForecastSet& fs) const {
    double worst = 0.0;
    for (const auto& c : fs.constraints())
        worst = std::max(worst, expectation(c.g, fs.domain()) - c.epsilon);
    return worst;
}

std::vector<double> augmented_grid(const ForecastSet& fs, std::size_t base_points, double shift,
                                   std::span<const double> extra) {
    const Domain& d = fs.domain();
    if (base_points < 2) throw PreconditionError("grid needs at least two base points");
    std::vector<double> xs;
    xs.reserve(base_points + 4 * fs.size() + extra.size() + 2);
    for (std::size_t i = 0; i < base_points; ++i)
        xs.push_back(d.lower + d.width() * static_cast<double>(i) / static_cast<double>(base_points - 1));
    xs.back() = d.upper;
    for (double b : fs.breakpoints()) {
        xs.push_back(b);
        if (b - shift >= d.lower) xs.push_back(b - shift);
    }
    for (double e : extra)
        if (d.contains(e)) xs.push_back(e);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

FeasibilitySlack strict_feasibility_slack(const ForecastSet& fs, std::size_t grid_size) {
    if (grid_size < 2) throw PreconditionError("grid_size must be >= 2");
    if (fs.empty()) return {SlackStatus::Unbounded, lp::kInf, std::nullopt};

    const auto xs = augmented_grid(fs, grid_size, 1e-9);
    const std::size_t atoms = xs.size();

    lp::LinearProgram problem;
    problem.sense = lp::Sense::Maximize;
    for (std::size_t j = 0; j < atoms; ++j) problem.add_variable(0.0);
    const std::size_t zeta = problem.add_variable(1.0, -lp::kInf, lp::kInf);

    std::vector<double> row(atoms + 1, 0.0);
    for (const auto& c : fs.constraints()) {
        std::fill(row.begin(), row.end(), 0.0);
        accumulate_g(c.g, 1.0, xs, std::span(row).first(atoms));
        row[zeta] = 1.0;
        problem.add_row(row, lp::RowSense::LessEqual, c.epsilon);
    }
    std::fill(row.begin(), row.end(), 1.0);
    row[zeta] = 0.0;
    problem.add_row(row, lp::RowSense::Equal, 1.0);

    const auto result = lp::solve_lp(problem);
    switch (result.status) {
    case lp::Status::Infeasible:
        return {SlackStatus::Infeasible, std::nan(""), std::nullopt};
    case lp::Status::Unbounded:
        return {SlackStatus::Unbounded, lp::kInf, std::nullopt};
    case lp::Status::Optimal:
        break;
    }
    const auto& sol = *result.solution;
    std::vector<Atom> support;
    double total = 0.0;
    for (std::size_t j = 0; j < atoms; ++j)
        if (sol[j] > 0.0) {
            support.push_back({xs[j], sol[j]});
            total += sol[j];
        }
    for (auto& a : support) a.probability /= total;
    return {SlackStatus::Bounded, sol[zeta], DiscreteDistribution(std::move(support))};
}

double feasibility_ball_radius(double zeta, std::span<const double> epsilons) {
    if (!(zeta > 0.0)) throw PreconditionError("feasibility_ball_radius requires zeta > 0");
    double radius = 1.0;
    for (double eps : epsilons) radius = std::min(radius, zeta / (1.0 + std::abs(eps - zeta)));
    return radius;
}

} // namespace robplan
