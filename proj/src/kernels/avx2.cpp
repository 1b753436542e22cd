// Compiled with -mavx2 only; dispatch guarantees the CPU supports it before
// any of these functions runs.

#include "kernel_table.hpp"

#include <immintrin.h>

namespace robplan::kernels::detail {
namespace {

constexpr std::size_t kLanes = 4;

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d t = _mm256_mul_pd(a, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), t));
    }
    for (; i < n; ++i) {
        const double t = alpha * x[i];
        y[i] = y[i] + t;
    }
}

void scale_avx2(double alpha, double* y, std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
        _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(y + i), a));
    for (; i < n; ++i) y[i] *= alpha;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d t = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_add_pd(acc, t);
    }
    alignas(32) double lanes[kLanes];
    _mm256_store_pd(lanes, acc);
    double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) {
        const double t = x[i] * y[i];
        sum = sum + t;
    }
    return sum;
}

void min_affine_avx2(const double* xs, std::size_t n, const double* intercepts,
                     const double* slopes, std::size_t pieces, double* out) {
    std::size_t j = 0;
    for (; j + kLanes <= n; j += kLanes) {
        const __m256d x = _mm256_loadu_pd(xs + j);
        __m256d best = _mm256_add_pd(_mm256_set1_pd(intercepts[0]),
                                     _mm256_mul_pd(_mm256_set1_pd(slopes[0]), x));
        for (std::size_t k = 1; k < pieces; ++k) {
            const __m256d t = _mm256_mul_pd(_mm256_set1_pd(slopes[k]), x);
            const __m256d v = _mm256_add_pd(_mm256_set1_pd(intercepts[k]), t);
            // minpd(v, best) == (v < best ? v : best), same as the scalar path
            best = _mm256_min_pd(v, best);
        }
        _mm256_storeu_pd(out + j, best);
    }
    for (; j < n; ++j) {
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

void add_indicator_avx2(const double* xs, std::size_t n, double lo, double hi,
                        bool closed_right, double weight, double* out) {
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    const __m256d w = _mm256_set1_pd(weight);
    std::size_t j = 0;
    for (; j + kLanes <= n; j += kLanes) {
        const __m256d x = _mm256_loadu_pd(xs + j);
        const __m256d above = _mm256_cmp_pd(x, vlo, _CMP_GE_OQ);
        const __m256d below = closed_right ? _mm256_cmp_pd(x, vhi, _CMP_LE_OQ)
                                           : _mm256_cmp_pd(x, vhi, _CMP_LT_OQ);
        const __m256d mask = _mm256_and_pd(above, below);
        const __m256d cur = _mm256_loadu_pd(out + j);
        // blend rather than add a masked zero so -0.0 entries stay untouched
        _mm256_storeu_pd(out + j, _mm256_blendv_pd(cur, _mm256_add_pd(cur, w), mask));
    }
    for (; j < n; ++j) {
        const double x = xs[j];
        const bool inside = x >= lo && (closed_right ? x <= hi : x < hi);
        if (inside) out[j] = out[j] + weight;
    }
}

void add_affine_avx2(const double* xs, std::size_t n, double c0, double c1, double weight,
                     double* out) {
    const __m256d v0 = _mm256_set1_pd(c0);
    const __m256d v1 = _mm256_set1_pd(c1);
    const __m256d w = _mm256_set1_pd(weight);
    std::size_t j = 0;
    for (; j + kLanes <= n; j += kLanes) {
        const __m256d v = _mm256_add_pd(v0, _mm256_mul_pd(v1, _mm256_loadu_pd(xs + j)));
        _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j), _mm256_mul_pd(w, v)));
    }
    for (; j < n; ++j) {
        const double t = c1 * xs[j];
        const double v = c0 + t;
        const double wv = weight * v;
        out[j] = out[j] + wv;
    }
}

void add_power_avx2(const double* xs, std::size_t n, int k, double weight, double* out) {
    const __m256d w = _mm256_set1_pd(weight);
    std::size_t j = 0;
    for (; j + kLanes <= n; j += kLanes) {
        const __m256d x = _mm256_loadu_pd(xs + j);
        __m256d p = x;
        for (int e = 1; e < k; ++e) p = _mm256_mul_pd(p, x);
        _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j), _mm256_mul_pd(w, p)));
    }
    for (; j < n; ++j) {
        const double x = xs[j];
        double p = x;
        for (int e = 1; e < k; ++e) p = p * x;
        const double wp = weight * p;
        out[j] = out[j] + wp;
    }
}

ArgMin argmin_avx2(const double* v, std::size_t n) {
    if (n < 2 * kLanes) {
        ArgMin best{0, v[0]};
        for (std::size_t i = 1; i < n; ++i)
            if (v[i] < best.value) best = {i, v[i]};
        return best;
    }
    __m256d best = _mm256_loadu_pd(v);
    __m256d best_idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    __m256d idx = best_idx;
    const __m256d step = _mm256_set1_pd(static_cast<double>(kLanes));
    std::size_t i = kLanes;
    for (; i + kLanes <= n; i += kLanes) {
        idx = _mm256_add_pd(idx, step);
        const __m256d cur = _mm256_loadu_pd(v + i);
        const __m256d less = _mm256_cmp_pd(cur, best, _CMP_LT_OQ);
        best = _mm256_blendv_pd(best, cur, less);
        best_idx = _mm256_blendv_pd(best_idx, idx, less);
    }
    alignas(32) double vals[kLanes];
    alignas(32) double ids[kLanes];
    _mm256_store_pd(vals, best);
    _mm256_store_pd(ids, best_idx);
    ArgMin out{static_cast<std::size_t>(ids[0]), vals[0]};
    for (std::size_t l = 1; l < kLanes; ++l) {
        const auto id = static_cast<std::size_t>(ids[l]);
        if (vals[l] < out.value || (vals[l] == out.value && id < out.index)) out = {id, vals[l]};
    }
    for (; i < n; ++i)
        if (v[i] < out.value) out = {i, v[i]};
    return out;
}

} // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{axpy_avx2,       scale_avx2,         dot_avx2,
                                   min_affine_avx2, add_indicator_avx2, add_affine_avx2,
                                   add_power_avx2,  argmin_avx2};
    return table;
}

} // namespace robplan::kernels::detail
