#include <cmath>

#include "fpattack/kernels.hpp"
#include "kernels_internal.hpp"

namespace fpattack::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_sq_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

void sub_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mark_nonzero_scalar(const double* x, std::uint8_t* flags, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) flags[i] |= static_cast<std::uint8_t>(x[i] != 0.0);
}

void quantize_scalar(const double* x, double* out, std::size_t n, const QuantizerParams& p) {
    for (std::size_t i = 0; i < n; ++i) out[i] = quantize_one(x[i], p);
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        "scalar",       dot_scalar,          sum_sq_scalar,   sub_scalar,
        axpy_scalar,    mark_nonzero_scalar, quantize_scalar,
    };
    return table;
}

}  // namespace fpattack::kernels
