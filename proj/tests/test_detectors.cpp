#include <doctest.h>

#include <cmath>
#include <random>

#include "fpattack/detectors.hpp"
#include "fpattack/error.hpp"
#include "fpattack/kernels.hpp"

using namespace fpattack;

namespace {

FingerprintMatrix orthonormal(std::size_t n, std::size_t m) {
    FingerprintMatrix f;
    f.entries = Matrix(n, m);
    for (std::size_t j = 0; j < m; ++j) f.entries(j, j) = 1.0;
    return f;
}

std::vector<double> plus(const HostSignal& s, const FingerprintMatrix& f, std::vector<double> weights) {
    std::vector<double> y = s.samples;
    for (std::size_t j = 0; j < weights.size(); ++j)
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += weights[j] * f.entries(i, j);
    return y;
}

}  // namespace

TEST_CASE("focused detector on an orthonormal code") {
    const FingerprintMatrix f = orthonormal(6, 4);
    const HostSignal s = gaussian_host(6, 1);

    const auto one = focused_detect(plus(s, f, {0, 0, 1, 0}), s, f, 0.5);
    CHECK(one.accused == std::vector<std::size_t>{2});
    for (std::size_t j = 0; j < 4; ++j) CHECK(one.scores[j] == doctest::Approx(j == 2 ? 1.0 : 0.0));

    const auto none = focused_detect(s.samples, s, f, 1e-12);
    CHECK(none.accused.empty());
    for (double v : none.scores) CHECK(v == 0.0);

    const auto pair = focused_detect(plus(s, f, {0.5, 0.5, 0, 0}), s, f, 0.4);
    CHECK(pair.accused == std::vector<std::size_t>{0, 1});
    CHECK(pair.threshold == 0.4);
}

TEST_CASE("focused detector is scale equivariant") {
    const FingerprintMatrix f = gen_gaussian(80, 12, 3);
    const HostSignal s = gaussian_host(80, 4);
    std::vector<double> y = plus(s, f, {0.3, 0, 0.7});
    const auto base = focused_detect(y, s, f, 0.2);
    for (double alpha : {0.5, 3.0}) {
        std::vector<double> ya(80);
        for (std::size_t i = 0; i < 80; ++i) ya[i] = s.samples[i] + alpha * (y[i] - s.samples[i]);
        const auto scaled = focused_detect(ya, s, f, 0.2 * alpha);
        for (std::size_t j = 0; j < 12; ++j) CHECK(scaled.scores[j] == doctest::Approx(alpha * base.scores[j]));
        CHECK(scaled.accused == base.accused);
    }
}

TEST_CASE("focused detector input checks") {
    FingerprintMatrix f = orthonormal(4, 4);
    f.entries(3, 3) = 0.0;
    const HostSignal s = gaussian_host(4, 1);
    CHECK_THROWS_AS(focused_detect(s.samples, s, f, 1.0), ValidationError);
    const auto lenient = focused_detect(s.samples, s, f, 1.0, ZeroNormPolicy::ScoreZero);
    CHECK(lenient.scores[3] == 0.0);
    CHECK_THROWS_AS(focused_detect(std::vector<double>(3), s, f, 1.0), ValidationError);
}

TEST_CASE("threshold calibration") {
    const FingerprintMatrix f = gen_gaussian(100, 50, 7);
    const HostSignal s = gaussian_host(100, 8);
    const double sigma = 0.1;

    const double median = calibrate_focused_threshold(f, s, 0.5, 400, NoiseModel::Gaussian, sigma, 1);
    CHECK(std::fabs(median) < 0.01);

    // fa -> 0 gives the largest pooled score
    const double top = calibrate_focused_threshold(f, s, 1e-9, 100, NoiseModel::Gaussian, sigma, 2);
    CHECK(top > 3.0 * sigma);

    const double thr = calibrate_focused_threshold(f, s, 0.01, 1000, NoiseModel::Gaussian, sigma, 3);
    std::mt19937_64 rng(99);
    std::normal_distribution<double> noise(0.0, sigma);
    std::size_t alarms = 0, total = 0;
    std::vector<double> y(100);
    for (int t = 0; t < 10000; ++t) {
        for (std::size_t i = 0; i < 100; ++i) y[i] = s.samples[i] + noise(rng);
        const auto r = focused_detect(y, s, f, thr);
        alarms += r.accused.size();
        total += 50;
    }
    const double fa = static_cast<double>(alarms) / static_cast<double>(total);
    CHECK(fa > 0.005);
    CHECK(fa < 0.015);

    CHECK(calibrate_focused_threshold(f, s, 0.01, 200, NoiseModel::Gaussian, sigma, 5) ==
          calibrate_focused_threshold(f, s, 0.01, 200, NoiseModel::Gaussian, sigma, 5));
    CHECK_THROWS_AS(calibrate_focused_threshold(f, s, 0.01, 99, NoiseModel::Gaussian, sigma, 5), ValidationError);
    CHECK_THROWS_AS(calibrate_focused_threshold(f, s, 0.0, 200, NoiseModel::Gaussian, sigma, 5), ValidationError);
    CHECK_THROWS_AS(calibrate_focused_threshold(f, s, 0.01, 200, NoiseModel::Gaussian, 0.0, 5), ValidationError);
}

TEST_CASE("tardos accusation") {
    const TardosCode big = gen_tardos(5, 0.1, 3, 1);
    CHECK(tardos_threshold(big) == 300.0);

    const TardosCode t = gen_tardos(3, 0.1, 10, 2);
    const auto zero = tardos_accuse(std::vector<double>(t.code.length(), 0.0), t);
    CHECK(zero.accused.empty());
    for (double v : zero.scores) CHECK(v == 0.0);
    CHECK(zero.threshold == 180.0);

    // scores follow the symmetric formula, checked entry by entry
    std::vector<double> y(t.code.length());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = t.code.entries(i, 4);
    const auto r = tardos_accuse(y, t);
    for (std::size_t j = 0; j < 10; ++j) {
        double score = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] != 1.0) continue;
            const double p = t.rho[i];
            score += t.code.entries(i, j) == 1.0 ? std::sqrt((1 - p) / p) : -std::sqrt(p / (1 - p));
        }
        CHECK(r.scores[j] == doctest::Approx(score).epsilon(1e-9));
    }

    // non-binary input is thresholded at 1/2
    std::vector<double> noisy = y;
    for (double& v : noisy) v = v * 0.9 + 0.04;
    CHECK_FALSE(is_binary(noisy));
    CHECK(is_binary(y));
    CHECK(tardos_accuse(noisy, t).scores == r.scores);
    CHECK_THROWS_AS(tardos_accuse(std::vector<double>(3), t), ValidationError);
}

TEST_CASE("a single leaker is accused") {
    std::size_t caught = 0;
    const int trials = 200;
    for (int k = 0; k < trials; ++k) {
        const TardosCode t = gen_tardos(3, 0.1, 5, 100 + k);
        std::vector<double> y(t.code.length());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = t.code.entries(i, 2);
        const auto r = tardos_accuse(y, t);
        caught += std::find(r.accused.begin(), r.accused.end(), 2) != r.accused.end();
    }
    CHECK(static_cast<double>(caught) / trials >= 0.99);
}
