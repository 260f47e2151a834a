#include "fpattack/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "fpattack/error.hpp"
#include "fpattack/kernels.hpp"

namespace fpattack {

Coalition::Coalition(std::vector<std::size_t> idx) : indices(std::move(idx)) {
    require(!indices.empty(), "coalition must have at least one member");
    std::vector<std::size_t> sorted(indices);
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "coalition members must be distinct");
}

Coalition random_coalition(std::size_t users, std::size_t k, Rng& rng) {
    require(k >= 1 && k <= users, "coalition size must lie in [1, M]");
    // Partial Fisher-Yates over a virtual identity permutation.
    std::vector<std::size_t> perm(users);
    for (std::size_t i = 0; i < users; ++i) perm[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, users - 1);
        std::swap(perm[i], perm[pick(rng)]);
    }
    perm.resize(k);
    return Coalition(std::move(perm));
}

std::vector<double> DifferenceMatrix::row(std::size_t i) const {
    std::vector<double> out(entries.cols());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = entries(i, j);
    return out;
}

DifferenceMatrix build_difference_matrix(const Matrix& copies, const Coalition& coalition) {
    for (std::size_t idx : coalition.indices)
        require(idx < copies.cols(), "coalition index " + std::to_string(idx) + " out of range");
    DifferenceMatrix a{Matrix(copies.rows(), coalition.size())};
    const auto pivot = copies.col(coalition.pivot());
    for (std::size_t j = 0; j < coalition.size(); ++j)
        kernels::sub(pivot, copies.col(coalition.indices[j]), a.entries.col(j));
    return a;
}

namespace {

// Best-effort estimate for a row with no consistent candidate: the pivot
// symbol that explains the most differences (then highest prior), with the
// unexplained entries snapped to the nearest symbol.
std::vector<double> relaxed_estimate(std::span<const double> row, const Alphabet& alphabet, double tol) {
    const auto sym = alphabet.symbols();
    const auto prior = alphabet.prior();
    auto nearest = [&](double v) {
        auto it = std::lower_bound(sym.begin(), sym.end(), v);
        if (it == sym.end()) return sym.size() - 1;
        if (it == sym.begin()) return std::size_t{0};
        const auto hi = static_cast<std::size_t>(it - sym.begin());
        return (v - sym[hi - 1] <= sym[hi] - v) ? hi - 1 : hi;
    };
    std::size_t best = 0, best_hits = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sym.size(); ++s) {
        std::size_t hits = 0;
        double score = 0.0;
        for (double a : row) {
            const double v = sym[s] - a;
            if (alphabet.find(v, tol)) ++hits;
            const double p = prior[nearest(v)];
            score += p > 0.0 ? std::log(p) : -1e300;
        }
        if (s == 0 || hits > best_hits || (hits == best_hits && score > best_score)) {
            best = s;
            best_hits = hits;
            best_score = score;
        }
    }
    std::vector<double> est(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) est[j] = sym[nearest(sym[best] - row[j])];
    return est;
}

// Decodes every row of A into `res`, returning the per-row results.
std::vector<RowDecodeResult> decode_all(const DifferenceMatrix& a, const Alphabet& alphabet, DecodePolicy policy,
                                        std::optional<double> tol) {
    std::vector<RowDecodeResult> out(a.rows());
    std::vector<double> row(a.colluders());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = a.entries(i, j);
        out[i] = decode_row(row, alphabet, policy, tol);
    }
    return out;
}

AttackResult assemble(const DifferenceMatrix& a, const std::vector<RowDecodeResult>& decoded, const Alphabet& alphabet,
                      double tol) {
    AttackResult res;
    res.estimated = Matrix(a.rows(), a.colluders());
    res.row_status.resize(a.rows());
    std::vector<double> row(a.colluders());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto& d = decoded[i];
        res.row_status[i] = d.status;
        if (d.status == DecodeStatus::Exact) res.exact_rows.push_back(i);
        if (d.status == DecodeStatus::Inconsistent) {
            ++res.inconsistent_rows;
            for (std::size_t j = 0; j < row.size(); ++j) row[j] = a.entries(i, j);
            const auto est = relaxed_estimate(row, alphabet, tol);
            for (std::size_t j = 0; j < est.size(); ++j) res.estimated(i, j) = est[j];
        } else {
            for (std::size_t j = 0; j < d.estimate.size(); ++j) res.estimated(i, j) = d.estimate[j];
        }
    }
    return res;
}

std::vector<double> pivot_host_estimate(const MarkedCopies& copies, const Coalition& coalition, const Matrix& est) {
    std::vector<double> s_hat(copies.copies.rows());
    kernels::sub(copies.copies.col(coalition.pivot()), est.col(0), s_hat);
    return s_hat;
}

}  // namespace

AttackResult finite_alphabet_attack(const MarkedCopies& copies, const Coalition& coalition, const Alphabet& alphabet,
                                    DecodePolicy policy, PriorSource prior) {
    const DifferenceMatrix a = build_difference_matrix(copies.copies, coalition);
    const double tol = alphabet.match_tolerance();
    auto decoded = decode_all(a, alphabet, policy, tol);
    const Alphabet* used = &alphabet;
    std::optional<Alphabet> estimated;
    if (prior == PriorSource::EstimatedFromExactRows && policy == DecodePolicy::MaxPrior) {
        estimated = estimate_prior_from_exact_rows(decoded, alphabet);
        used = &*estimated;
        std::vector<double> row(a.colluders());
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (decoded[i].status != DecodeStatus::MostLikely) continue;
            for (std::size_t j = 0; j < row.size(); ++j) row[j] = a.entries(i, j);
            decoded[i] = decode_row(row, *estimated, policy, tol);
        }
    }
    AttackResult res = assemble(a, decoded, *used, tol);
    res.host_estimate = pivot_host_estimate(copies, coalition, res.estimated);
    return res;
}

AttackResult etf_attack(const MarkedCopies& copies, const Coalition& coalition, const FingerprintMatrix& etf_code) {
    require(etf_code.family == CodeFamily::ETF, "etf_attack needs an ETF code");
    return finite_alphabet_attack(copies, coalition, etf_code.scaled_alphabet(), DecodePolicy::MaxZeros);
}

namespace {

// Binary rows: nonzero differences pin the pivot bit. Fills `est` for the
// exact rows and returns their indices.
std::vector<std::size_t> decode_binary_rows(const DifferenceMatrix& a, Matrix& est, std::vector<DecodeStatus>& status) {
    const std::size_t n = a.rows();
    const std::size_t k = a.colluders();
    std::vector<std::uint8_t> nonzero(n, 0);
    for (std::size_t j = 0; j < k; ++j) kernels::mark_nonzero(a.entries.col(j), nonzero);

    std::vector<std::size_t> exact;
    status.assign(n, DecodeStatus::MostLikely);
    for (std::size_t i = 0; i < n; ++i) {
        if (!nonzero[i]) continue;
        double pivot_bit = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double v = a.entries(i, j);
            if (v > 0.5) {
                pivot_bit = 1.0;
                break;
            }
            if (v < -0.5) break;
        }
        for (std::size_t j = 0; j < k; ++j) {
            const double bit = pivot_bit - std::round(a.entries(i, j));
            if (bit != 0.0 && bit != 1.0) throw ValidationError("binary attack applied to non-binary copies");
            est(i, j) = bit;
        }
        status[i] = DecodeStatus::Exact;
        exact.push_back(i);
    }
    return exact;
}

}  // namespace

AttackResult tardos_attack(const MarkedCopies& copies, const Coalition& coalition, const TardosCode& code) {
    require(code.code.length() == copies.copies.rows(), "Tardos code length must match the copies");
    const DifferenceMatrix a = build_difference_matrix(copies.copies, coalition);
    AttackResult res;
    res.estimated = Matrix(a.rows(), a.colluders(), 1.0);
    res.exact_rows = decode_binary_rows(a, res.estimated, res.row_status);
    std::vector<double> rho_hat(a.rows());
    const double k = static_cast<double>(a.colluders());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double ones = 0.0;
        for (std::size_t j = 0; j < a.colluders(); ++j) ones += res.estimated(i, j);
        rho_hat[i] = ones / k;
    }
    res.rho_hat = std::move(rho_hat);
    res.host_estimate = pivot_host_estimate(copies, coalition, res.estimated);
    return res;
}

void TardosForgeryParams::validate() const {
    require(sigma0 >= 0.0 && std::isfinite(sigma0), "sigma0 must be >= 0");
    require(c1 > 0.0, "c1 must be > 0");
    require(c2 >= 0.0 && std::isfinite(c2), "c2 must be >= 0");
}

TardosForgeryParams default_tardos_forgery_params(std::span<const double> host_estimate) {
    const double norm = std::sqrt(kernels::sum_sq(host_estimate));
    return {0.01 * norm / std::sqrt(static_cast<double>(host_estimate.size())), 1.0, 1.0};
}

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

std::vector<double> tardos_forge(std::span<const double> q_pivot, std::span<const double> fhat_pivot,
                                 std::span<const std::size_t> exact_rows, const TardosForgeryParams& params,
                                 std::size_t k, double c, std::uint64_t seed) {
    params.validate();
    require(q_pivot.size() == fhat_pivot.size() && !q_pivot.empty(), "pivot copy and estimate must have equal length");
    require(k >= 1, "coalition size must be >= 1");
    (void)c;  // the design constant enters only through c2 in this variant
    const std::size_t n = q_pivot.size();
    Rng rng = make_rng(seed);

    std::vector<std::uint8_t> in_exact(n, 0);
    for (std::size_t i : exact_rows) {
        require(i < n, "exact row index out of range");
        in_exact[i] = 1;
    }
    std::vector<double> spikes(n, 0.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (in_exact[i]) continue;
        const double u = unif(rng);
        spikes[i] = u < 0.5 ? 0.0 : (u < 0.75 ? 1.0 : -1.0);
    }

    const std::size_t bins = n / 2 + 1;
    double* time = fftw_alloc_real(n);
    fftw_complex* freq = fftw_alloc_complex(bins);
    fftw_plan fwd, inv;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), time, freq, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), freq, time, FFTW_ESTIMATE);
    }
    for (std::size_t i = 0; i < n; ++i) time[i] = q_pivot[i] - fhat_pivot[i];
    fftw_execute(fwd);

    const std::size_t perturbed = (n + 1) / 2;
    const double phase_width = std::numbers::pi / (2.0 * static_cast<double>(k) * params.c1);
    std::normal_distribution<double> mag_noise(0.0, params.sigma0 > 0.0 ? params.sigma0 : 1.0);
    std::uniform_real_distribution<double> phase_noise(0.0, phase_width > 0.0 ? phase_width : 1.0);
    for (std::size_t b = 0; b < perturbed; ++b) {
        std::complex<double> x(freq[b][0], freq[b][1]);
        double mag = std::abs(x);
        double phase = std::arg(x);
        if (params.sigma0 > 0.0) mag = std::max(0.0, mag + mag_noise(rng));
        if (phase_width > 0.0) phase += phase_noise(rng);
        x = std::polar(mag, phase);
        // DC is self-conjugate; keep it real.
        freq[b][0] = x.real();
        freq[b][1] = b == 0 ? 0.0 : x.imag();
    }
    fftw_execute(inv);

    std::vector<double> y(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = time[i] * inv_n + params.c2 * spikes[i];

    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }
    fftw_free(time);
    fftw_free(freq);
    return y;
}

AttackResult cwc_attack(const MarkedCopies& copies, const Coalition& coalition, double tau, std::uint64_t seed) {
    require(tau >= 0.0 && tau < 0.5, "tau must lie in [0, 1/2)");
    const DifferenceMatrix a = build_difference_matrix(copies.copies, coalition);
    const std::size_t n = a.rows();
    const std::size_t k = a.colluders();
    AttackResult res;
    res.estimated = Matrix(n, k, 0.0);
    res.exact_rows = decode_binary_rows(a, res.estimated, res.row_status);
    if (res.exact_rows.empty()) throw EstimationError("no rows with a nonzero difference: column biases unavailable");

    std::vector<double> p_hat(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double ones = 0.0;
        for (std::size_t i : res.exact_rows) ones += res.estimated(i, j);
        p_hat[j] = ones / static_cast<double>(res.exact_rows.size());
    }
    double p_tot = 0.0;
    for (double p : p_hat) p_tot += p;
    p_tot /= static_cast<double>(k);

    std::vector<std::size_t> outside;
    for (std::size_t i = 0; i < n; ++i)
        if (res.row_status[i] != DecodeStatus::Exact) outside.push_back(i);

    auto fill_row = [&](std::size_t i, double bit) {
        for (std::size_t j = 0; j < k; ++j) res.estimated(i, j) = bit;
    };
    if (p_tot > 0.5 + tau) {
        for (std::size_t i : outside) fill_row(i, 1.0);
    } else if (p_tot < 0.5 - tau) {
        for (std::size_t i : outside) fill_row(i, 0.0);
    } else {
        const auto [lo, hi] = std::minmax_element(p_hat.begin(), p_hat.end());
        const auto n_star = static_cast<std::size_t>(
            std::floor((*lo + *hi) / 2.0 * static_cast<double>(outside.size())));
        Rng rng = make_rng(seed);
        for (std::size_t i = 0; i < n_star && i < outside.size(); ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, outside.size() - 1);
            std::swap(outside[i], outside[pick(rng)]);
        }
        for (std::size_t i = 0; i < outside.size(); ++i) fill_row(outside[i], i < n_star ? 1.0 : 0.0);
    }
    res.p_hat = std::move(p_hat);
    res.host_estimate = pivot_host_estimate(copies, coalition, res.estimated);
    res.forgery = res.host_estimate;
    return res;
}

// ---------------------------------------------------------------------------

void GaussianAttackParams::validate() const {
    require(xi > 0.0 && std::isfinite(xi), "xi must be > 0");
    require(w >= 1, "w must be >= 1");
    require(alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0, 2]");
    require(sigma0 >= 0.0 && std::isfinite(sigma0), "sigma0 must be >= 0");
}

double choose_xi(double sigma, double epsilon) {
    require(sigma > 0.0, "sigma must be > 0");
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
    return sigma * std::sqrt(1.0 / epsilon);
}

Matrix gaussian_quantize(const DifferenceMatrix& a, const GaussianAttackParams& params) {
    params.validate();
    const double step = params.xi / params.w;
    const kernels::QuantizerParams qp{step, params.alpha * params.xi / (2.0 * params.w), 2 * params.w - 1};
    Matrix out(a.rows(), a.colluders());
    for (std::size_t j = 0; j < a.colluders(); ++j) kernels::quantize(a.entries.col(j), out.col(j), qp);
    return out;
}

Alphabet gaussian_attack_alphabet(const GaussianAttackParams& params, double sigma) {
    params.validate();
    require(sigma > 0.0, "sigma must be > 0");
    const int levels = 2 * params.w;
    const double width = params.xi / params.w;
    auto cdf = [sigma](double x) { return 0.5 * std::erfc(-x / (sigma * std::numbers::sqrt2)); };
    std::vector<double> centres(levels), mass(levels);
    double acc = 0.0;
    for (int i = 1; i <= levels; ++i) {
        centres[i - 1] = -params.xi + params.xi / (2.0 * params.w) * (2.0 * i - 1.0);
        const double upper = i == levels ? 1.0 : cdf(-params.xi + width * i);
        const double lower = i == 1 ? 0.0 : cdf(-params.xi + width * (i - 1));
        mass[i - 1] = upper - lower;
        acc += mass[i - 1];
    }
    for (double& m : mass) m /= acc;
    double rest = 0.0;
    for (int i = 0; i + 1 < levels; ++i) rest += mass[i];
    mass.back() = std::max(0.0, 1.0 - rest);
    return Alphabet(std::move(centres), std::move(mass));
}

AttackResult gaussian_attack(const MarkedCopies& copies, const Coalition& coalition, const GaussianAttackParams& params,
                             std::uint64_t seed) {
    params.validate();
    const std::size_t n = copies.copies.rows();
    const double sigma = 1.0 / std::sqrt(static_cast<double>(n));
    const Alphabet alphabet = gaussian_attack_alphabet(params, sigma);
    const DifferenceMatrix a = build_difference_matrix(copies.copies, coalition);
    const DifferenceMatrix quantized{gaussian_quantize(a, params)};
    const double tol = params.xi / (2.0 * params.w);

    const auto decoded = decode_all(quantized, alphabet, DecodePolicy::MaxPrior, tol);
    AttackResult res = assemble(quantized, decoded, alphabet, tol);
    res.host_estimate = pivot_host_estimate(copies, coalition, res.estimated);

    const std::size_t k = coalition.size();
    std::vector<double> y(n, 0.0), tmp(n);
    for (std::size_t j = 0; j < k; ++j) {
        kernels::sub(copies.copies.col(coalition.indices[j]), res.estimated.col(j), tmp);
        kernels::axpy(1.0, tmp, y);
    }
    const double inv_k = 1.0 / static_cast<double>(k);
    for (double& v : y) v *= inv_k;
    add_gaussian_noise(y, params.sigma0, seed);
    res.forgery = std::move(y);
    return res;
}

// ---------------------------------------------------------------------------

void add_gaussian_noise(std::span<double> y, double sigma, std::uint64_t seed) {
    require(sigma >= 0.0 && std::isfinite(sigma), "noise sigma must be >= 0");
    if (sigma == 0.0) return;
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (double& v : y) v += normal(rng);
}

std::vector<double> baseline_average(const Matrix& copies, const Coalition& coalition, double noise_sigma,
                                     std::uint64_t seed) {
    for (std::size_t idx : coalition.indices) require(idx < copies.cols(), "coalition index out of range");
    std::vector<double> y(copies.rows(), 0.0);
    for (std::size_t idx : coalition.indices) kernels::axpy(1.0, copies.col(idx), y);
    const double k = static_cast<double>(coalition.size());
    for (double& v : y) v /= k;
    add_gaussian_noise(y, noise_sigma, seed);
    return y;
}

namespace {

template <typename Better>
std::vector<double> vote(const Matrix& copies, const Coalition& coalition, Better better) {
    for (std::size_t idx : coalition.indices) require(idx < copies.cols(), "coalition index out of range");
    std::vector<double> y(copies.rows());
    std::vector<double> vals(coalition.size());
    for (std::size_t i = 0; i < copies.rows(); ++i) {
        for (std::size_t j = 0; j < vals.size(); ++j) vals[j] = copies(i, coalition.indices[j]);
        std::sort(vals.begin(), vals.end());
        double best = vals[0];
        std::size_t best_count = 0;
        for (std::size_t s = 0; s < vals.size();) {
            std::size_t e = s;
            while (e < vals.size() && vals[e] == vals[s]) ++e;
            // Runs come in increasing value order, so strict comparison keeps the smaller value on ties.
            if (best_count == 0 || better(e - s, best_count)) {
                best = vals[s];
                best_count = e - s;
            }
            s = e;
        }
        y[i] = best;
    }
    return y;
}

}  // namespace

std::vector<double> baseline_minority(const Matrix& copies, const Coalition& coalition) {
    return vote(copies, coalition, [](std::size_t c, std::size_t best) { return c < best; });
}

std::vector<double> baseline_majority(const Matrix& copies, const Coalition& coalition) {
    return vote(copies, coalition, [](std::size_t c, std::size_t best) { return c > best; });
}

}  // namespace fpattack
