#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>

#include "fpattack/kernels.hpp"

using namespace fpattack;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, scale);
    std::vector<double> v(n);
    for (double& x : v) x = d(rng);
    return v;
}

const std::size_t kLengths[] = {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 31, 64, 100, 1023, 4097};

}  // namespace

TEST_CASE("dispatch honours the scalar override") {
    const char* force = std::getenv("FPATTACK_FORCE_SCALAR");
    if (force && std::strcmp(force, "1") == 0)
        CHECK(kernels::active().name == kernels::scalar_table().name);
    else if (kernels::avx2_table())
        CHECK(kernels::active().name == kernels::avx2_table()->name);
    MESSAGE("active kernel table: " << kernels::active().name);
}

TEST_CASE("scalar kernels against plain loops") {
    const auto& s = kernels::scalar_table();
    for (std::size_t n : kLengths) {
        const auto a = random_vec(n, n + 1), b = random_vec(n, n + 2);
        double dot = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dot += a[i] * b[i];
            sq += a[i] * a[i];
        }
        CHECK(s.dot(a.data(), b.data(), n) == doctest::Approx(dot).epsilon(1e-12));
        CHECK(s.sum_sq(a.data(), n) == doctest::Approx(sq).epsilon(1e-12));
        std::vector<double> out(n);
        s.sub(a.data(), b.data(), out.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == a[i] - b[i]);
    }
}

TEST_CASE("quantizer levels") {
    const auto& s = kernels::scalar_table();
    // xi = 2, w = 2: step 1, dead zone 0.5, levels -3..3
    const kernels::QuantizerParams p{1.0, 0.5, 3};
    const std::vector<double> x{-3.5, -2.5, -0.3, 0.0, 0.5, 0.51, 1.49, 1.5, 2.7, 100.0, -100.0};
    const std::vector<double> want{-3, -2, 0, 0, 0, 1, 1, 1, 2, 3, -3};
    std::vector<double> out(x.size());
    s.quantize(x.data(), out.data(), x.size(), p);
    CHECK(out == want);
}

TEST_CASE("avx2 kernels match the scalar reference") {
    const kernels::KernelTable* v = kernels::avx2_table();
    if (!v) {
        MESSAGE("AVX2 unavailable; equivalence not exercised");
        return;
    }
    const auto& s = kernels::scalar_table();
    for (std::size_t n : kLengths) {
        const auto a = random_vec(n, 3 * n + 1), b = random_vec(n, 3 * n + 2);

        CHECK(v->dot(a.data(), b.data(), n) == doctest::Approx(s.dot(a.data(), b.data(), n)).epsilon(1e-12));
        CHECK(v->sum_sq(a.data(), n) == doctest::Approx(s.sum_sq(a.data(), n)).epsilon(1e-12));

        std::vector<double> o1(n), o2(n);
        v->sub(a.data(), b.data(), o1.data(), n);
        s.sub(a.data(), b.data(), o2.data(), n);
        CHECK(o1 == o2);

        std::vector<double> y1 = b, y2 = b;
        v->axpy(0.37, a.data(), y1.data(), n);
        s.axpy(0.37, a.data(), y2.data(), n);
        CHECK(y1 == y2);

        std::vector<double> sparse = a;
        for (std::size_t i = 0; i < n; i += 2) sparse[i] = 0.0;
        if (n > 2) sparse[n - 1] = -0.0;
        std::vector<std::uint8_t> f1(n, 0), f2(n, 0);
        if (n > 0) f1[0] = f2[0] = 1;
        v->mark_nonzero(sparse.data(), f1.data(), n);
        s.mark_nonzero(sparse.data(), f2.data(), n);
        CHECK(f1 == f2);

        for (auto p : {kernels::QuantizerParams{0.06, 0.03, 3}, kernels::QuantizerParams{1.0, 0.7, 3},
                       kernels::QuantizerParams{0.5, 0.25, 1}}) {
            auto x = random_vec(n, 7 * n + 5, 0.2);
            // land some inputs exactly on bin edges
            for (std::size_t i = 0; i < n; i += 5) x[i] = p.step * (static_cast<double>(i % 9) - 4.0) * 0.5;
            std::vector<double> q1(n), q2(n);
            v->quantize(x.data(), q1.data(), n, p);
            s.quantize(x.data(), q2.data(), n, p);
            CHECK(q1 == q2);
        }
    }
}
