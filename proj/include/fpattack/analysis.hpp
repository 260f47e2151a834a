#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fpattack {

enum class BoundSide { LowerBoundOnK, UpperBoundOnError, UpperBoundOnCount, Estimate };

const char* to_string(BoundSide side);

struct BoundReport {
    std::string name;
    double value = 0.0;
    BoundSide side = BoundSide::UpperBoundOnError;
    std::optional<double> confidence;
    std::vector<std::pair<std::string, double>> params;
};

/// Smallest K for which the ETF attack recovers s with probability > 1 - delta.
int thm1_min_coalition(std::size_t n, double delta);

int lemma1_min_coalition(std::size_t n, double delta, int w);
/// Per-row probability that a uniformly symmetric code row is decoded wrongly.
double uniform_symmetric_row_error(int w, int k);

int lemma2_min_coalition(std::size_t n, double delta);
/// 2 (3/4)^K.
double rtf_row_error_bound(int k);

/// 2 sum_{i <= K/2} C(M - h m0, i) C(h m0 / 2, K - i) / C(M, K), in log space.
double etf_row_error_bound(std::size_t m, int h, std::size_t m0, int k);

/// log C(n, k); -inf when k < 0 or k > n.
double log_choose(double n, double k);

struct Thm2Bound {
    double c = 0.0;
    double count_bound = 0.0;  // 2 C N / sqrt(K)
    double probability = 0.0;  // 1 - (sqrt(K) - C) / (N C)
};

double thm2_constant(double t);
Thm2Bound thm2_bound(std::size_t n, int k, double t);

struct Thm3Bounds {
    double fail_count_bound = 0.0;  // N / K
    double fail_prob = 0.0;         // 1 - 12K^2 (3/8)^K - 8K^2 / (N 2^K)
    double expected_error = 0.0;    // N / 2^(K-1)
    double phat_dev = 0.0;          // sqrt(ln N / N)
    double phat_prob = 0.0;         // 1 - 2K / N^(2 - 1/2^(K-2))
    bool fail_bound_valid = false;  // K > 6
};

Thm3Bounds thm3_bounds(std::size_t n, int k);

/// Expected |I|/N for a Tardos code attacked by K colluders.
double tardos_exact_fraction_analytic(int k, double t);

/// sqrt(N/2) (1/sqrt(N) + (2w-1) xi / (2w)).
double gaussian_error_bound(std::size_t n, double xi, int w);

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth = 50);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for a binomial proportion (z = 1.96 gives 95%).
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

}  // namespace fpattack
