#include "fpattack/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fpattack/error.hpp"

namespace fpattack {

const char* to_string(BoundSide side) {
    switch (side) {
        case BoundSide::LowerBoundOnK: return "lower_bound_on_K";
        case BoundSide::UpperBoundOnError: return "upper_bound_on_error";
        case BoundSide::UpperBoundOnCount: return "upper_bound_on_count";
        case BoundSide::Estimate: return "estimate";
    }
    return "?";
}

namespace {

void check_delta(double delta) { require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)"); }

int ceil_int(double v) { return static_cast<int>(std::ceil(v)); }

}  // namespace

int thm1_min_coalition(std::size_t n, double delta) {
    require(n >= 1, "N must be >= 1");
    check_delta(delta);
    return ceil_int(2.0 * std::log(4.0 * static_cast<double>(n) / delta));
}

int lemma1_min_coalition(std::size_t n, double delta, int w) {
    require(n >= 1, "N must be >= 1");
    require(w >= 1, "w must be >= 1");
    check_delta(delta);
    return ceil_int(std::log(static_cast<double>(n) / delta) / std::log1p(1.0 / (2.0 * w)));
}

double uniform_symmetric_row_error(int w, int k) {
    require(w >= 1, "w must be >= 1");
    require(k >= 0, "K must be >= 0");
    return std::pow(1.0 - 1.0 / (2.0 * w + 1.0), k);
}

int lemma2_min_coalition(std::size_t n, double delta) {
    require(n >= 1, "N must be >= 1");
    check_delta(delta);
    return ceil_int(std::log(2.0 * static_cast<double>(n) / delta) / std::log(4.0 / 3.0));
}

double rtf_row_error_bound(int k) {
    require(k >= 0, "K must be >= 0");
    return 2.0 * std::pow(0.75, k);
}

double log_choose(double n, double k) {
    if (k < 0.0 || k > n) return -std::numeric_limits<double>::infinity();
    const double kk = std::min(k, n - k);
    if (kk <= 64.0) {
        // Short products keep full relative precision where lgamma would not.
        double acc = 0.0;
        for (int i = 1; i <= static_cast<int>(kk); ++i) acc += std::log((n - kk + i) / i);
        return acc;
    }
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double etf_row_error_bound(std::size_t m, int h, std::size_t m0, int k) {
    require(h >= 1 && m0 >= 2, "h >= 1 and m0 >= 2 required");
    const double hm0 = static_cast<double>(h) * static_cast<double>(m0);
    require(static_cast<double>(m) > hm0, "M must exceed h * m0");
    require(k >= 2, "K must be >= 2");
    require(static_cast<std::size_t>(k) <= m, "K must not exceed M");
    const double md = static_cast<double>(m);
    const double denom = log_choose(md, k);
    std::vector<double> terms;
    for (int i = 0; i <= k / 2; ++i) {
        const double t = log_choose(md - hm0, i) + log_choose(hm0 / 2.0, k - i) - denom;
        if (std::isfinite(t)) terms.push_back(t);
    }
    if (terms.empty()) return 0.0;
    const double peak = *std::max_element(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - peak);
    return 2.0 * std::exp(peak) * sum;
}

double thm2_constant(double t) {
    require(t > 0.0 && t < std::numbers::pi / 4.0, "t must lie in (0, pi/4)");
    return 2.0 / (std::sqrt(300.0) * (std::numbers::pi / 2.0 - 2.0 * t)) + 2.0 / std::sqrt(std::numbers::pi);
}

Thm2Bound thm2_bound(std::size_t n, int k, double t) {
    require(n >= 1, "N must be >= 1");
    require(k >= 4, "K must be >= 4");
    const double c = thm2_constant(t);
    const double nd = static_cast<double>(n);
    const double sk = std::sqrt(static_cast<double>(k));
    return {c, 2.0 * c * nd / sk, 1.0 - (sk - c) / (nd * c)};
}

Thm3Bounds thm3_bounds(std::size_t n, int k) {
    require(n >= 2, "N must be >= 2");
    require(k >= 2, "K must be >= 2");
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    Thm3Bounds b;
    b.fail_count_bound = nd / kd;
    b.fail_prob = 1.0 - 12.0 * kd * kd * std::pow(3.0 / 8.0, kd) - 8.0 * kd * kd / (nd * std::pow(2.0, kd));
    b.expected_error = nd / std::pow(2.0, kd - 1.0);
    b.phat_dev = std::sqrt(std::log(nd) / nd);
    b.phat_prob = 1.0 - 2.0 * kd / std::pow(nd, 2.0 - 1.0 / std::pow(2.0, kd - 2.0));
    b.fail_bound_valid = k > 6;
    return b;
}

namespace {

double simpson(double fa, double fm, double fb, double a, double b) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
    require(tol > 0.0, "quadrature tolerance must be > 0");
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson_rec(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth);
}

double tardos_exact_fraction_analytic(int k, double t) {
    require(k >= 1, "K must be >= 1");
    require(t >= 0.0 && t < std::numbers::pi / 4.0, "t must lie in [0, pi/4)");
    const auto integrand = [k](double x) { return std::pow(std::sin(x), 2 * k) + std::pow(std::cos(x), 2 * k); };
    const double lo = t, hi = std::numbers::pi / 2.0 - t, mid = std::numbers::pi / 4.0;
    const double integral = adaptive_simpson(integrand, lo, mid, 1e-10) + adaptive_simpson(integrand, mid, hi, 1e-10);
    return std::clamp(1.0 - integral / (hi - lo), 0.0, 1.0);
}

double gaussian_error_bound(std::size_t n, double xi, int w) {
    require(n >= 1, "N must be >= 1");
    require(xi > 0.0, "xi must be > 0");
    require(w >= 1, "w must be >= 1");
    const double nd = static_cast<double>(n);
    return std::sqrt(nd / 2.0) * (1.0 / std::sqrt(nd) + (2.0 * w - 1.0) * xi / (2.0 * w));
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    require(successes <= trials, "successes must not exceed trials");
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return {successes == 0 ? 0.0 : std::max(0.0, centre - half), successes == trials ? 1.0 : std::min(1.0, centre + half)};
}

}  // namespace fpattack
