#include "fpattack/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fpattack/error.hpp"
#include "fpattack/kernels.hpp"
#include "fpattack/rng.hpp"

namespace fpattack {

namespace {

AccusationResult threshold_scores(std::vector<double> scores, double threshold) {
    AccusationResult r;
    r.threshold = threshold;
    for (std::size_t j = 0; j < scores.size(); ++j)
        if (scores[j] > threshold) r.accused.push_back(j);
    r.scores = std::move(scores);
    return r;
}

std::vector<double> column_norms(const FingerprintMatrix& f, ZeroNormPolicy zero_norm) {
    std::vector<double> norms(f.users());
    for (std::size_t j = 0; j < f.users(); ++j) {
        norms[j] = std::sqrt(kernels::sum_sq(f.entries.col(j)));
        if (norms[j] == 0.0 && zero_norm == ZeroNormPolicy::Reject)
            throw ValidationError("fingerprint " + std::to_string(j) + " has zero norm");
    }
    return norms;
}

std::vector<double> focused_scores(std::span<const double> residual, const FingerprintMatrix& f,
                                   const std::vector<double>& norms) {
    std::vector<double> scores(f.users(), 0.0);
    for (std::size_t j = 0; j < f.users(); ++j)
        if (norms[j] > 0.0) scores[j] = kernels::dot(residual, f.entries.col(j)) / norms[j];
    return scores;
}

}  // namespace

AccusationResult focused_detect(std::span<const double> y, const HostSignal& s, const FingerprintMatrix& f,
                                double threshold, ZeroNormPolicy zero_norm) {
    require(y.size() == s.size() && y.size() == f.length(), "forgery, host and code lengths must agree");
    std::vector<double> residual(y.size());
    kernels::sub(y, s.samples, residual);
    return threshold_scores(focused_scores(residual, f, column_norms(f, zero_norm)), threshold);
}

double calibrate_focused_threshold(const FingerprintMatrix& f, const HostSignal& s, double target_fa_per_user,
                                   std::size_t trials, NoiseModel model, double sigma, std::uint64_t seed,
                                   ZeroNormPolicy zero_norm) {
    require(target_fa_per_user > 0.0 && target_fa_per_user < 1.0, "target false-alarm rate must lie in (0, 1)");
    require(trials >= 100, "calibration needs at least 100 trials");
    require(sigma > 0.0 && std::isfinite(sigma), "calibration noise sigma must be > 0");
    require(s.size() == f.length(), "host and code lengths must agree");
    (void)model;
    const auto norms = column_norms(f, zero_norm);

    Rng rng = make_rng(seed, Stage::Calibration);
    std::normal_distribution<double> normal(0.0, sigma);
    std::vector<double> residual(s.size());
    std::vector<double> pooled;
    pooled.reserve(trials * f.users());
    for (std::size_t t = 0; t < trials; ++t) {
        for (double& v : residual) v = normal(rng);
        const auto sc = focused_scores(residual, f, norms);
        for (std::size_t j = 0; j < sc.size(); ++j)
            if (norms[j] > 0.0) pooled.push_back(sc[j]);
    }
    const auto n = pooled.size();
    require(n > 0, "no fingerprint with nonzero norm to calibrate on");
    auto rank = static_cast<std::size_t>(std::ceil((1.0 - target_fa_per_user) * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    std::nth_element(pooled.begin(), pooled.begin() + static_cast<std::ptrdiff_t>(rank - 1), pooled.end());
    return pooled[rank - 1];
}

double tardos_threshold(const TardosCode& code) { return 20.0 * code.c * code.k_design; }

bool is_binary(std::span<const double> y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

AccusationResult tardos_accuse(std::span<const double> y, const TardosCode& code) {
    const std::size_t n = code.code.length();
    require(y.size() == n && code.rho.size() == n, "forgery length must match the Tardos code");
    // u_ij = f_ij / sqrt(rho(1-rho)) - sqrt(rho/(1-rho))
    std::vector<double> weighted(n);
    double offset = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double bit = y[i] > 0.5 ? 1.0 : 0.0;
        const double rho = code.rho[i];
        weighted[i] = bit / std::sqrt(rho * (1.0 - rho));
        offset += bit * std::sqrt(rho / (1.0 - rho));
    }
    std::vector<double> scores(code.code.users());
    for (std::size_t j = 0; j < scores.size(); ++j) scores[j] = kernels::dot(weighted, code.code.entries.col(j)) - offset;
    return threshold_scores(std::move(scores), tardos_threshold(code));
}

}  // namespace fpattack
