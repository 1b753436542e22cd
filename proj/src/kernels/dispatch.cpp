#include "kernel_table.hpp"
#include "robplan/errors.hpp"

#include <atomic>

namespace robplan::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(ROBPLAN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend best_backend() { return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar; }

std::atomic<Backend>& current() {
    static std::atomic<Backend> backend{best_backend()};
    return backend;
}

const detail::KernelTable& table() {
#if defined(ROBPLAN_HAVE_AVX2)
    if (current().load(std::memory_order_relaxed) == Backend::Avx2) return detail::avx2_table();
#endif
    return detail::scalar_table();
}

void check_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw PreconditionError(std::string(what) + ": span length mismatch");
}

} // namespace

std::string_view backend_name(Backend backend) {
    switch (backend) {
    case Backend::Scalar:
        return "scalar";
    case Backend::Avx2:
        return "avx2";
    }
    return "unknown";
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out{Backend::Scalar};
    if (cpu_has_avx2()) out.push_back(Backend::Avx2);
    return out;
}

Backend active_backend() { return current().load(); }

void set_backend(Backend backend) {
    if (backend == Backend::Avx2 && !cpu_has_avx2())
        throw PreconditionError("AVX2 kernels are not available on this machine");
    current().store(backend);
}

void reset_backend() { current().store(best_backend()); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    check_same_size(x.size(), y.size(), "axpy");
    table().axpy(alpha, x.data(), y.data(), y.size());
}

void scale(double alpha, std::span<double> y) { table().scale(alpha, y.data(), y.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
    check_same_size(x.size(), y.size(), "dot");
    return table().dot(x.data(), y.data(), x.size());
}

void min_affine(std::span<const double> xs, std::span<const double> intercepts,
                std::span<const double> slopes, std::span<double> out) {
    check_same_size(xs.size(), out.size(), "min_affine");
    check_same_size(intercepts.size(), slopes.size(), "min_affine");
    if (intercepts.empty()) throw PreconditionError("min_affine: no affine pieces");
    table().min_affine(xs.data(), xs.size(), intercepts.data(), slopes.data(), intercepts.size(),
                       out.data());
}

void add_indicator(std::span<const double> xs, double lo, double hi, bool closed_right,
                   double weight, std::span<double> out) {
    check_same_size(xs.size(), out.size(), "add_indicator");
    table().add_indicator(xs.data(), xs.size(), lo, hi, closed_right, weight, out.data());
}

void add_affine(std::span<const double> xs, double c0, double c1, double weight,
                std::span<double> out) {
    check_same_size(xs.size(), out.size(), "add_affine");
    table().add_affine(xs.data(), xs.size(), c0, c1, weight, out.data());
}

void add_power(std::span<const double> xs, int k, double weight, std::span<double> out) {
    check_same_size(xs.size(), out.size(), "add_power");
    if (k < 1) throw PreconditionError("add_power: exponent must be >= 1");
    table().add_power(xs.data(), xs.size(), k, weight, out.data());
}

ArgMin argmin(std::span<const double> values) {
    if (values.empty()) throw PreconditionError("argmin: empty input");
    return table().argmin(values.data(), values.size());
}

} // namespace robplan::kernels
