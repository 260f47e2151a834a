#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fpattack/codes.hpp"

namespace fpattack {

struct AccusationResult {
    std::vector<std::size_t> accused;  // increasing user indices with score > threshold
    std::vector<double> scores;        // one per user
    double threshold = 0.0;
};

/// What to do with an all-zero fingerprint column.
enum class ZeroNormPolicy {
    Reject,     // throw ValidationError
    ScoreZero,  // score 0; such users are left out of calibration pools
};

/// Correlation detector with the host removed: score_j = <y - s, f_j> / ||f_j||.
AccusationResult focused_detect(std::span<const double> y, const HostSignal& s, const FingerprintMatrix& f,
                                double threshold, ZeroNormPolicy zero_norm = ZeroNormPolicy::Reject);

/// Innocent-only forgeries for threshold calibration.
enum class NoiseModel {
    Gaussian,  // y = s + Normal(0, sigma^2) per coordinate
};

/// Empirical (1 - target_fa) quantile of innocent scores, pooled over users
/// and trials. Rejects fewer than 100 trials.
double calibrate_focused_threshold(const FingerprintMatrix& f, const HostSignal& s, double target_fa_per_user,
                                   std::size_t trials, NoiseModel model, double sigma, std::uint64_t seed,
                                   ZeroNormPolicy zero_norm = ZeroNormPolicy::Reject);

/// Accusation threshold Z = 20 c K_design.
double tardos_threshold(const TardosCode& code);

/// Symmetric Tardos accusation on y; entries of y not already 0/1 are
/// thresholded at 1/2.
AccusationResult tardos_accuse(std::span<const double> y, const TardosCode& code);

/// True when every entry of y is exactly 0 or 1.
bool is_binary(std::span<const double> y);

}  // namespace fpattack
