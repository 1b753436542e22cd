#include "robplan/lp.hpp"

#include "robplan/errors.hpp"
#include "robplan/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace robplan::lp {

void DenseMatrix::append_row(std::span<const double> values) {
    if (rows_ == 0 && data_.empty()) cols_ = values.size();
    if (values.size() != cols_)
        throw ValidationError("constraint_matrix", "row length does not match column count");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

std::string_view status_name(Status status) {
    switch (status) {
    case Status::Optimal:
        return "optimal";
    case Status::Infeasible:
        return "infeasible";
    case Status::Unbounded:
        return "unbounded";
    }
    return "unknown";
}

std::size_t LinearProgram::add_variable(double cost, double lower, double upper) {
    if (constraints.rows() != 0)
        throw ValidationError("objective_coefficients", "variables must be added before rows");
    objective.push_back(cost);
    lower_bounds.push_back(lower);
    upper_bounds.push_back(upper);
    constraints = DenseMatrix(0, objective.size());
    return objective.size() - 1;
}

void LinearProgram::add_row(std::span<const double> coefficients, RowSense row_sense,
                            double bound) {
    if (coefficients.size() != num_variables())
        throw ValidationError("constraint_matrix[" + std::to_string(num_rows()) + "]",
                              "row length does not match the number of variables");
    if (constraints.rows() == 0 && constraints.cols() != num_variables())
        constraints = DenseMatrix(0, num_variables());
    constraints.append_row(coefficients);
    row_senses.push_back(row_sense);
    rhs.push_back(bound);
}

void validate(const LinearProgram& problem) {
    const std::size_t n = problem.objective.size();
    const std::size_t m = problem.rhs.size();
    if (problem.row_senses.size() != m)
        throw ValidationError("constraint_senses", "count differs from right_hand_sides");
    if (problem.constraints.rows() != m)
        throw ValidationError("constraint_matrix", "row count differs from right_hand_sides");
    if (m > 0 && problem.constraints.cols() != n)
        throw ValidationError("constraint_matrix", "column count differs from objective length");
    if (problem.lower_bounds.size() != n)
        throw ValidationError("variable_lower_bounds", "count differs from objective length");
    if (problem.upper_bounds.size() != n)
        throw ValidationError("variable_upper_bounds", "count differs from objective length");
    for (std::size_t j = 0; j < n; ++j) {
        const std::string idx = "[" + std::to_string(j) + "]";
        if (!std::isfinite(problem.objective[j]))
            throw ValidationError("objective_coefficients" + idx, "not finite");
        if (std::isnan(problem.lower_bounds[j]) || problem.lower_bounds[j] == kInf)
            throw ValidationError("variable_lower_bounds" + idx, "invalid lower bound");
        if (std::isnan(problem.upper_bounds[j]) || problem.upper_bounds[j] == -kInf)
            throw ValidationError("variable_upper_bounds" + idx, "invalid upper bound");
        if (problem.lower_bounds[j] > problem.upper_bounds[j])
            throw ValidationError("variable_lower_bounds" + idx, "exceeds the upper bound");
    }
    for (std::size_t r = 0; r < m; ++r) {
        if (!std::isfinite(problem.rhs[r]))
            throw ValidationError("right_hand_sides[" + std::to_string(r) + "]", "not finite");
        for (double v : problem.constraints.row(r))
            if (!std::isfinite(v))
                throw ValidationError("constraint_matrix[" + std::to_string(r) + "]",
                                      "not finite");
    }
}

double max_violation(const LinearProgram& problem, std::span<const double> x) {
    double worst = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        worst = std::max(worst, problem.lower_bounds[j] - x[j]);
        worst = std::max(worst, x[j] - problem.upper_bounds[j]);
    }
    for (std::size_t r = 0; r < problem.num_rows(); ++r) {
        const auto row = problem.constraints.row(r);
        double lhs = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) lhs += row[j] * x[j];
        const double gap = lhs - problem.rhs[r];
        switch (problem.row_senses[r]) {
        case RowSense::LessEqual:
            worst = std::max(worst, gap);
            break;
        case RowSense::GreaterEqual:
            worst = std::max(worst, -gap);
            break;
        case RowSense::Equal:
            worst = std::max(worst, std::abs(gap));
            break;
        }
    }
    return worst;
}

namespace {

// Original variable j equals offset + sum(coef * y[col]) over its terms, with
// every y >= 0.
struct VariableMap {
    double offset = 0.0;
    std::vector<std::pair<std::size_t, double>> terms;
};

enum class ColumnKind { Structural, Slack, Artificial };

class Simplex {
public:
    Simplex(const LinearProgram& problem, const SolverOptions& options)
        : problem_(problem), options_(options) {
        build_standard_form();
    }

    LpResult run();

private:
    void build_standard_form();
    void pivot(std::size_t row, std::size_t col);
    // Returns false on unboundedness.
    bool iterate();
    std::optional<std::size_t> entering() const;
    std::optional<std::size_t> leaving(std::size_t col) const;
    void load_phase2_costs();
    void drive_out_artificials();
    std::vector<double> basic_values_from_tableau() const;
    std::optional<std::vector<double>> basic_values_from_lu() const;
    std::vector<double> to_original(const std::vector<double>& basic) const;

    const LinearProgram& problem_;
    SolverOptions options_;

    std::vector<VariableMap> maps_;
    std::size_t structural_ = 0;
    std::vector<ColumnKind> kinds_;
    std::vector<double> std_costs_;
    double cost_sign_ = 1.0;

    // Tableau rows with the right-hand side stored in the last column.
    DenseMatrix initial_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::size_t> row_origin_;
    std::vector<std::size_t> basis_;
    std::vector<double> reduced_;
    std::vector<bool> eligible_;
    std::size_t pivots_ = 0;
};

void Simplex::build_standard_form() {
    const std::size_t n = problem_.num_variables();
    maps_.resize(n);
    std::size_t next = 0;
    std::vector<std::pair<std::size_t, double>> upper_rows; // (y column, width)
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = problem_.lower_bounds[j];
        const double hi = problem_.upper_bounds[j];
        auto& map = maps_[j];
        if (std::isfinite(lo)) {
            map.offset = lo;
            map.terms.emplace_back(next, 1.0);
            if (std::isfinite(hi)) upper_rows.emplace_back(next, hi - lo);
            ++next;
        } else if (std::isfinite(hi)) {
            map.offset = hi;
            map.terms.emplace_back(next++, -1.0);
        } else {
            map.terms.emplace_back(next++, 1.0);
            map.terms.emplace_back(next++, -1.0);
        }
    }
    structural_ = next;

    cost_sign_ = problem_.sense == Sense::Maximize ? -1.0 : 1.0;
    std::vector<double> costs(structural_, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (auto [col, coef] : maps_[j].terms) costs[col] += cost_sign_ * problem_.objective[j] * coef;

    struct Row {
        std::vector<double> coef;
        RowSense sense;
        double rhs;
    };
    std::vector<Row> rows;
    rows.reserve(problem_.num_rows() + upper_rows.size());
    for (std::size_t r = 0; r < problem_.num_rows(); ++r) {
        Row row{std::vector<double>(structural_, 0.0), problem_.row_senses[r], problem_.rhs[r]};
        const auto src = problem_.constraints.row(r);
        for (std::size_t j = 0; j < n; ++j) {
            if (src[j] == 0.0) continue;
            row.rhs -= src[j] * maps_[j].offset;
            for (auto [col, coef] : maps_[j].terms) row.coef[col] += src[j] * coef;
        }
        rows.push_back(std::move(row));
    }
    for (auto [col, width] : upper_rows) {
        Row row{std::vector<double>(structural_, 0.0), RowSense::LessEqual, width};
        row.coef[col] = 1.0;
        rows.push_back(std::move(row));
    }
    for (auto& row : rows) {
        if (row.rhs < 0.0) {
            for (double& v : row.coef) v = -v;
            row.rhs = -row.rhs;
            if (row.sense == RowSense::LessEqual)
                row.sense = RowSense::GreaterEqual;
            else if (row.sense == RowSense::GreaterEqual)
                row.sense = RowSense::LessEqual;
        }
    }

    std::size_t slacks = 0;
    std::size_t artificials = 0;
    for (const auto& row : rows) {
        if (row.sense != RowSense::Equal) ++slacks;
        if (row.sense != RowSense::LessEqual) ++artificials;
    }
    const std::size_t total = structural_ + slacks + artificials;
    kinds_.assign(total, ColumnKind::Structural);
    std::fill(kinds_.begin() + static_cast<std::ptrdiff_t>(structural_),
              kinds_.begin() + static_cast<std::ptrdiff_t>(structural_ + slacks), ColumnKind::Slack);
    std::fill(kinds_.begin() + static_cast<std::ptrdiff_t>(structural_ + slacks), kinds_.end(),
              ColumnKind::Artificial);
    std_costs_.assign(total, 0.0);
    std::copy(costs.begin(), costs.end(), std_costs_.begin());

    const std::size_t m = rows.size();
    initial_ = DenseMatrix(m, total + 1);
    basis_.resize(m);
    std::size_t slack_col = structural_;
    std::size_t art_col = structural_ + slacks;
    for (std::size_t r = 0; r < m; ++r) {
        std::copy(rows[r].coef.begin(), rows[r].coef.end(), initial_.row(r).begin());
        initial_(r, total) = rows[r].rhs;
        switch (rows[r].sense) {
        case RowSense::LessEqual:
            initial_(r, slack_col) = 1.0;
            basis_[r] = slack_col++;
            break;
        case RowSense::GreaterEqual:
            initial_(r, slack_col++) = -1.0;
            initial_(r, art_col) = 1.0;
            basis_[r] = art_col++;
            break;
        case RowSense::Equal:
            initial_(r, art_col) = 1.0;
            basis_[r] = art_col++;
            break;
        }
    }
    rows_.resize(m);
    row_origin_.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
        const auto src = initial_.row(r);
        rows_[r].assign(src.begin(), src.end());
        row_origin_[r] = r;
    }
}

void Simplex::pivot(std::size_t row, std::size_t col) {
    if (++pivots_ > options_.max_pivots)
        throw NumericalFailure("simplex exceeded " + std::to_string(options_.max_pivots) +
                               " pivots");
    auto& prow = rows_[row];
    kernels::scale(1.0 / prow[col], prow);
    prow[col] = 1.0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (r == row) continue;
        const double factor = rows_[r][col];
        if (factor == 0.0) continue;
        kernels::axpy(-factor, prow, rows_[r]);
        rows_[r][col] = 0.0;
    }
    const double factor = reduced_[col];
    if (factor != 0.0) {
        kernels::axpy(-factor, prow, reduced_);
        reduced_[col] = 0.0;
    }
    basis_[row] = col;
}

std::optional<std::size_t> Simplex::entering() const {
    // Bland: lowest eligible index with a negative reduced cost.
    for (std::size_t j = 0; j + 1 < reduced_.size(); ++j)
        if (eligible_[j] && reduced_[j] < -options_.optimality_tolerance) return j;
    return std::nullopt;
}

std::optional<std::size_t> Simplex::leaving(std::size_t col) const {
    const std::size_t rhs = reduced_.size() - 1;
    std::optional<std::size_t> best;
    double best_ratio = 0.0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const double a = rows_[r][col];
        if (a <= options_.pivot_tolerance) continue;
        const double ratio = std::max(rows_[r][rhs], 0.0) / a;
        if (!best) {
            best = r;
            best_ratio = ratio;
            continue;
        }
        const double tie = 1e-12 * (1.0 + std::abs(best_ratio));
        if (ratio < best_ratio - tie) {
            best = r;
            best_ratio = ratio;
        } else if (ratio <= best_ratio + tie && basis_[r] < basis_[*best]) {
            best = r;
            best_ratio = std::min(ratio, best_ratio);
        }
    }
    return best;
}

bool Simplex::iterate() {
    while (auto col = entering()) {
        const auto row = leaving(*col);
        if (!row) return false;
        pivot(*row, *col);
    }
    return true;
}

void Simplex::load_phase2_costs() {
    const std::size_t total = kinds_.size();
    reduced_.assign(total + 1, 0.0);
    std::copy(std_costs_.begin(), std_costs_.end(), reduced_.begin());
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const double cb = std_costs_[basis_[r]];
        if (cb != 0.0) kernels::axpy(-cb, rows_[r], reduced_);
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) reduced_[basis_[r]] = 0.0;
    eligible_.assign(total, true);
    for (std::size_t j = 0; j < total; ++j)
        if (kinds_[j] == ColumnKind::Artificial) eligible_[j] = false;
}

void Simplex::drive_out_artificials() {
    const std::size_t total = kinds_.size();
    for (std::size_t r = 0; r < rows_.size();) {
        if (kinds_[basis_[r]] != ColumnKind::Artificial) {
            ++r;
            continue;
        }
        std::optional<std::size_t> best;
        double best_abs = 1e-9;
        for (std::size_t j = 0; j < total; ++j) {
            if (kinds_[j] == ColumnKind::Artificial) continue;
            const double a = std::abs(rows_[r][j]);
            if (a > best_abs) {
                best = j;
                best_abs = a;
            }
        }
        if (best) {
            pivot(r, *best);
            ++r;
        } else {
            // Redundant row: every non-artificial entry vanished.
            rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
            row_origin_.erase(row_origin_.begin() + static_cast<std::ptrdiff_t>(r));
            basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        }
    }
}

std::vector<double> Simplex::basic_values_from_tableau() const {
    const std::size_t rhs = kinds_.size();
    std::vector<double> out(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) out[r] = rows_[r][rhs];
    return out;
}

std::optional<std::vector<double>> Simplex::basic_values_from_lu() const {
    const std::size_t m = rows_.size();
    const std::size_t rhs = kinds_.size();
    if (m == 0) return std::vector<double>{};
    DenseMatrix a(m, m + 1);
    for (std::size_t i = 0; i < m; ++i) {
        const auto src = initial_.row(row_origin_[i]);
        for (std::size_t k = 0; k < m; ++k) a(i, k) = src[basis_[k]];
        a(i, m) = src[rhs];
    }
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t p = c;
        for (std::size_t i = c + 1; i < m; ++i)
            if (std::abs(a(i, c)) > std::abs(a(p, c))) p = i;
        if (std::abs(a(p, c)) < 1e-13) return std::nullopt;
        if (p != c)
            for (std::size_t k = 0; k <= m; ++k) std::swap(a(p, k), a(c, k));
        for (std::size_t i = c + 1; i < m; ++i) {
            const double f = a(i, c) / a(c, c);
            if (f == 0.0) continue;
            auto target = a.row(i).subspan(c);
            kernels::axpy(-f, a.row(c).subspan(c), target);
        }
    }
    std::vector<double> x(m);
    for (std::size_t i = m; i-- > 0;) {
        double s = a(i, m);
        for (std::size_t k = i + 1; k < m; ++k) s -= a(i, k) * x[k];
        x[i] = s / a(i, i);
    }
    return x;
}

std::vector<double> Simplex::to_original(const std::vector<double>& basic) const {
    std::vector<double> y(kinds_.size(), 0.0);
    for (std::size_t r = 0; r < basis_.size(); ++r) y[basis_[r]] = std::max(basic[r], 0.0);
    std::vector<double> x(maps_.size());
    for (std::size_t j = 0; j < maps_.size(); ++j) {
        double v = maps_[j].offset;
        for (auto [col, coef] : maps_[j].terms) v += coef * y[col];
        x[j] = std::clamp(v, problem_.lower_bounds[j], problem_.upper_bounds[j]);
    }
    return x;
}

LpResult Simplex::run() {
    LpResult result;
    const std::size_t total = kinds_.size();
    double rhs_scale = 1.0;
    for (const auto& row : rows_) rhs_scale = std::max(rhs_scale, std::abs(row[total]));

    const bool needs_phase1 = std::any_of(basis_.begin(), basis_.end(), [&](std::size_t c) {
        return kinds_[c] == ColumnKind::Artificial;
    });
    if (needs_phase1) {
        reduced_.assign(total + 1, 0.0);
        for (std::size_t r = 0; r < rows_.size(); ++r)
            if (kinds_[basis_[r]] == ColumnKind::Artificial) kernels::axpy(-1.0, rows_[r], reduced_);
        for (std::size_t j = 0; j < total; ++j)
            if (kinds_[j] == ColumnKind::Artificial) reduced_[j] = 0.0;
        eligible_.assign(total, true);
        iterate();
        const double infeasibility = -reduced_[total];
        if (infeasibility > options_.feasibility_tolerance * rhs_scale) {
            result.status = Status::Infeasible;
            result.pivots = pivots_;
            return result;
        }
        drive_out_artificials();
    }

    load_phase2_costs();
    if (!iterate()) {
        result.status = Status::Unbounded;
        result.pivots = pivots_;
        return result;
    }

    auto x = to_original(basic_values_from_tableau());
    double violation = max_violation(problem_, x);
    if (auto refined = basic_values_from_lu()) {
        auto candidate = to_original(*refined);
        const double candidate_violation = max_violation(problem_, candidate);
        if (candidate_violation <= violation) {
            x = std::move(candidate);
            violation = candidate_violation;
        }
    }
    if (violation > 1e-7 * rhs_scale)
        throw NumericalFailure("simplex lost feasibility (violation " + std::to_string(violation) +
                               ")");

    double objective = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) objective += problem_.objective[j] * x[j];
    result.status = Status::Optimal;
    result.solution = std::move(x);
    result.objective_value = objective;
    result.pivots = pivots_;
    return result;
}

} // namespace

LpResult solve_lp(const LinearProgram& problem, const SolverOptions& options) {
    validate(problem);
    Simplex simplex(problem, options);
    return simplex.run();
}

} // namespace robplan::lp
