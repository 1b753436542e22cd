#pragma once

#include "robplan/kernels.hpp"

namespace robplan::kernels::detail {

struct KernelTable {
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    void (*min_affine)(const double*, std::size_t, const double*, const double*, std::size_t,
                       double*);
    void (*add_indicator)(const double*, std::size_t, double, double, bool, double, double*);
    void (*add_affine)(const double*, std::size_t, double, double, double, double*);
    void (*add_power)(const double*, std::size_t, int, double, double*);
    ArgMin (*argmin)(const double*, std::size_t);
};

const KernelTable& scalar_table();

#if defined(ROBPLAN_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

} // namespace robplan::kernels::detail
