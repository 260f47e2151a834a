#include <immintrin.h>

#include "fpattack/kernels.hpp"
#include "kernels_internal.hpp"

namespace fpattack::kernels::detail {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_sq_avx2(const double* a, std::size_t n) { return dot_avx2(a, a, n); }

void sub_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

// No FMA here: y += alpha*x must round exactly like the scalar loop.
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void mark_nonzero_avx2(const double* x, std::uint8_t* flags, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const int mask = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_NEQ_UQ));
        flags[i] |= static_cast<std::uint8_t>(mask & 1);
        flags[i + 1] |= static_cast<std::uint8_t>((mask >> 1) & 1);
        flags[i + 2] |= static_cast<std::uint8_t>((mask >> 2) & 1);
        flags[i + 3] |= static_cast<std::uint8_t>((mask >> 3) & 1);
    }
    for (; i < n; ++i) flags[i] |= static_cast<std::uint8_t>(x[i] != 0.0);
}

void quantize_avx2(const double* x, double* out, std::size_t n, const QuantizerParams& p) {
    const __m256d u = _mm256_set1_pd(p.step);
    const __m256d neg_u = _mm256_set1_pd(-p.step);
    const __m256d dz = _mm256_set1_pd(p.dead_zone);
    const __m256d top = _mm256_set1_pd(static_cast<double>(p.max_level));
    const __m256d neg_top = _mm256_set1_pd(-static_cast<double>(p.max_level));
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d neg_one = _mm256_set1_pd(-1.0);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(x + i);
        const __m256d q = _mm256_div_pd(a, u);

        __m256d pos = _mm256_min_pd(_mm256_sub_pd(_mm256_ceil_pd(q), one), top);
        pos = _mm256_blendv_pd(pos, one, _mm256_cmp_pd(a, u, _CMP_LE_OQ));

        __m256d neg = _mm256_max_pd(_mm256_add_pd(_mm256_floor_pd(q), one), neg_top);
        neg = _mm256_blendv_pd(neg, neg_one, _mm256_cmp_pd(a, neg_u, _CMP_GE_OQ));

        __m256d level = _mm256_blendv_pd(neg, pos, _mm256_cmp_pd(a, zero, _CMP_GT_OQ));
        const __m256d in_dead = _mm256_cmp_pd(_mm256_and_pd(a, abs_mask), dz, _CMP_LE_OQ);
        level = _mm256_blendv_pd(level, zero, in_dead);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(level, u));
    }
    for (; i < n; ++i) out[i] = quantize_one(x[i], p);
}

}  // namespace

const KernelTable& avx2_table_impl() {
    static const KernelTable table{
        "avx2",      dot_avx2,          sum_sq_avx2,   sub_avx2,
        axpy_avx2,   mark_nonzero_avx2, quantize_avx2,
    };
    return table;
}

}  // namespace fpattack::kernels::detail
