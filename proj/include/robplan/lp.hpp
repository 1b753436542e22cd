#pragma once

// Dense two-phase primal simplex.
//
// Problems in this library are small (a few hundred rows at most), so the
// solver keeps a full tableau and pivots with Bland's rule, which cannot
// cycle. After the optimal basis is found the basic values are recomputed
// from the original data with a partial-pivoting LU solve, which removes the
// drift accumulated across pivots.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace robplan::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    /// Appends a row; the first row fixes the column count.
    void append_row(std::span<const double> values);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class Sense { Maximize, Minimize };
enum class RowSense { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded };

std::string_view status_name(Status status);

struct LinearProgram {
    Sense sense = Sense::Minimize;
    std::vector<double> objective;
    DenseMatrix constraints;
    std::vector<RowSense> row_senses;
    std::vector<double> rhs;
    /// Use -kInf / +kInf for an unbounded side.
    std::vector<double> lower_bounds;
    std::vector<double> upper_bounds;

    std::size_t num_variables() const noexcept { return objective.size(); }
    std::size_t num_rows() const noexcept { return rhs.size(); }

    /// Adds a variable with the given objective coefficient and bounds and
    /// returns its column index. Only valid before rows are added.
    std::size_t add_variable(double cost, double lower = 0.0, double upper = kInf);

    void add_row(std::span<const double> coefficients, RowSense row_sense, double bound);
};

struct LpResult {
    Status status = Status::Infeasible;
    std::optional<std::vector<double>> solution;
    std::optional<double> objective_value;
    std::size_t pivots = 0;

    bool optimal() const noexcept { return status == Status::Optimal; }
};

struct SolverOptions {
    double feasibility_tolerance = 1e-9;
    double optimality_tolerance = 1e-9;
    double pivot_tolerance = 1e-11;
    std::size_t max_pivots = 1'000'000;
};

/// Throws ValidationError on dimension mismatch or crossed bounds, and
/// NumericalFailure when the pivot limit is hit.
LpResult solve_lp(const LinearProgram& problem, const SolverOptions& options = {});

/// Throws ValidationError describing the first structural problem found.
void validate(const LinearProgram& problem);

/// Largest constraint or bound violation of `x` (0 when feasible).
double max_violation(const LinearProgram& problem, std::span<const double> x);

} // namespace robplan::lp
