#pragma once

// Data-parallel inner loops shared by the simplex and the grid evaluators.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2
// variant. The variant is picked once at startup from the CPU features and
// can be overridden with set_backend(). Elementwise kernels produce
// bit-identical output on every backend (no FMA contraction, same operation
// order); the reductions dot() may differ in the last bits because lanes are
// summed in a different order.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace robplan::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend backend);

/// Backends usable on this machine, scalar first.
std::vector<Backend> available_backends();

Backend active_backend();

/// Throws PreconditionError if the backend is not available here.
void set_backend(Backend backend);

/// Restores the startup choice (best available).
void reset_backend();

struct ArgMin {
    std::size_t index = 0;
    double value = 0.0;
};

// y[i] += alpha * x[i]
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// y[i] *= alpha
void scale(double alpha, std::span<double> y);

double dot(std::span<const double> x, std::span<const double> y);

// out[j] = min_k (intercepts[k] + slopes[k] * xs[j]); intercepts nonempty.
void min_affine(std::span<const double> xs, std::span<const double> intercepts,
                std::span<const double> slopes, std::span<double> out);

// out[j] += weight when lo <= xs[j] < hi (or <= hi when closed_right).
void add_indicator(std::span<const double> xs, double lo, double hi, bool closed_right,
                   double weight, std::span<double> out);

// out[j] += weight * (c0 + c1 * xs[j])
void add_affine(std::span<const double> xs, double c0, double c1, double weight,
                std::span<double> out);

// out[j] += weight * xs[j]^k, k >= 1, by repeated multiplication.
void add_power(std::span<const double> xs, int k, double weight, std::span<double> out);

/// Smallest entry; lowest index on ties. `values` nonempty.
ArgMin argmin(std::span<const double> values);

} // namespace robplan::kernels
