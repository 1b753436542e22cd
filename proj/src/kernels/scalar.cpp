#include "kernel_table.hpp"

namespace robplan::kernels::detail {
namespace {

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = alpha * x[i];
        y[i] = y[i] + t;
    }
}

void scale_scalar(double alpha, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] *= alpha;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = x[i] * y[i];
        sum = sum + t;
    }
    return sum;
}

void min_affine_scalar(const double* xs, std::size_t n, const double* intercepts,
                       const double* slopes, std::size_t pieces, double* out) {
    for (std::size_t j = 0; j < n; ++j) {
        const double x = xs[j];
        double best = intercepts[0] + slopes[0] * x;
        for (std::size_t k = 1; k < pieces; ++k) {
            const double t = slopes[k] * x;
            const double v = intercepts[k] + t;
            best = v < best ? v : best;
        }
        out[j] = best;
    }
}

void add_indicator_scalar(const double* xs, std::size_t n, double lo, double hi,
                          bool closed_right, double weight, double* out) {
    for (std::size_t j = 0; j < n; ++j) {
        const double x = xs[j];
        const bool inside = x >= lo && (closed_right ? x <= hi : x < hi);
        if (inside) out[j] = out[j] + weight;
    }
}

void add_affine_scalar(const double* xs, std::size_t n, double c0, double c1, double weight,
                       double* out) {
    for (std::size_t j = 0; j < n; ++j) {
        const double t = c1 * xs[j];
        const double v = c0 + t;
        const double w = weight * v;
        out[j] = out[j] + w;
    }
}

void add_power_scalar(const double* xs, std::size_t n, int k, double weight, double* out) {
    for (std::size_t j = 0; j < n; ++j) {
        const double x = xs[j];
        double p = x;
        for (int e = 1; e < k; ++e) p = p * x;
        const double w = weight * p;
        out[j] = out[j] + w;
    }
}

ArgMin argmin_scalar(const double* v, std::size_t n) {
    ArgMin best{0, v[0]};
    for (std::size_t i = 1; i < n; ++i) {
        if (v[i] < best.value) best = {i, v[i]};
    }
    return best;
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{axpy_scalar,         scale_scalar,      dot_scalar,
                                   min_affine_scalar,   add_indicator_scalar,
                                   add_affine_scalar,   add_power_scalar,  argmin_scalar};
    return table;
}

} // namespace robplan::kernels::detail
