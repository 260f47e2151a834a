#pragma once

// Data-parallel inner loops shared by attacks and detectors.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The active table is chosen once per process from the
// CPU feature bits; setting FPATTACK_FORCE_SCALAR=1 in the environment pins
// the scalar table. Elementwise kernels are bit-identical across variants;
// reductions (dot, sum_sq) differ only by summation order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace fpattack::kernels {

/// Parameters of the symmetric difference quantizer, in units of the
/// quantizer step u = xi / w.
struct QuantizerParams {
    double step = 1.0;       // u = xi / w
    double dead_zone = 0.5;  // alpha * u / 2
    int max_level = 1;       // 2w - 1
};

struct KernelTable {
    std::string_view name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum_sq)(const double* a, std::size_t n);
    // out = a - b
    void (*sub)(const double* a, const double* b, double* out, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // flags[i] |= (x[i] != 0)
    void (*mark_nonzero)(const double* x, std::uint8_t* flags, std::size_t n);
    // out[i] = level(x[i]) * step, level an integer in [-max_level, max_level]
    void (*quantize)(const double* x, double* out, std::size_t n, const QuantizerParams& p);
};

const KernelTable& scalar_table();

/// AVX2 table, or nullptr when the CPU (or the build) lacks AVX2+FMA.
const KernelTable* avx2_table();

/// The table selected for this process.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline double sum_sq(std::span<const double> a) { return active().sum_sq(a.data(), a.size()); }

inline void sub(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    active().sub(a.data(), b.data(), out.data(), out.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), y.size());
}

inline void mark_nonzero(std::span<const double> x, std::span<std::uint8_t> flags) {
    active().mark_nonzero(x.data(), flags.data(), x.size());
}

inline void quantize(std::span<const double> x, std::span<double> out, const QuantizerParams& p) {
    active().quantize(x.data(), out.data(), out.size(), p);
}

}  // namespace fpattack::kernels
