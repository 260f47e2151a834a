#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fpattack/alphabet.hpp"
#include "fpattack/codes.hpp"
#include "fpattack/matrix.hpp"
#include "fpattack/rng.hpp"

namespace fpattack {

/// Colluding users; indices[0] is the pivot whose copy anchors the differences.
struct Coalition {
    std::vector<std::size_t> indices;

    explicit Coalition(std::vector<std::size_t> idx);
    std::size_t size() const { return indices.size(); }
    std::size_t pivot() const { return indices.front(); }
};

/// K distinct users drawn uniformly from {0..users-1}; the first drawn is the pivot.
Coalition random_coalition(std::size_t users, std::size_t k, Rng& rng);

/// N x K matrix whose column j is q_pivot - q_{coalition[j]}.
struct DifferenceMatrix {
    Matrix entries;

    std::size_t rows() const { return entries.rows(); }
    std::size_t colluders() const { return entries.cols(); }
    /// Row i as a contiguous vector (a_{i,1} = 0).
    std::vector<double> row(std::size_t i) const;
};

DifferenceMatrix build_difference_matrix(const Matrix& copies, const Coalition& coalition);

struct AttackResult {
    Matrix estimated;                    // N x K, column j estimates f_{coalition[j]}
    std::vector<std::size_t> exact_rows; // sorted row indices with a unique decoding
    std::vector<DecodeStatus> row_status;
    std::optional<std::vector<double>> host_estimate;  // q_pivot - fhat_pivot
    std::optional<std::vector<double>> forgery;
    std::optional<std::vector<double>> rho_hat;  // Tardos: m_i / K, meaningful on exact rows
    std::optional<std::vector<double>> p_hat;    // CWC: per-colluder column bias estimate
    std::size_t inconsistent_rows = 0;

    double exact_fraction() const {
        return row_status.empty() ? 0.0 : static_cast<double>(exact_rows.size()) / static_cast<double>(row_status.size());
    }
};

enum class PriorSource { Known, EstimatedFromExactRows };

/// Core difference attack over a finite alphabet of *scaled* symbols.
AttackResult finite_alphabet_attack(const MarkedCopies& copies, const Coalition& coalition, const Alphabet& alphabet,
                                    DecodePolicy policy, PriorSource prior = PriorSource::Known);

/// Difference attack with the max-zeros estimator, for ETF codes.
AttackResult etf_attack(const MarkedCopies& copies, const Coalition& coalition, const FingerprintMatrix& etf_code);

/// Binary difference attack on a Tardos code: every row with a nonzero
/// difference is exact; the rest are estimated as all ones.
AttackResult tardos_attack(const MarkedCopies& copies, const Coalition& coalition, const TardosCode& code);

struct TardosForgeryParams {
    double sigma0 = 0.0;  // magnitude noise std
    double c1 = 1.0;      // phase noise divisor
    double c2 = 1.0;      // time-domain spike amplitude

    void validate() const;
};

/// sigma0 = 0.01 * ||s_hat|| / sqrt(N), c1 = c2 = 1.
TardosForgeryParams default_tardos_forgery_params(std::span<const double> host_estimate);

/// Spectral-perturbation forgery from the pivot's copy and its estimated
/// fingerprint. Noise is applied to DFT bins 0..ceil(N/2)-1 and the
/// inverse transform is taken over the Hermitian half spectrum, so the
/// output is real.
std::vector<double> tardos_forge(std::span<const double> q_pivot, std::span<const double> fhat_pivot,
                                 std::span<const std::size_t> exact_rows, const TardosForgeryParams& params,
                                 std::size_t k, double c, std::uint64_t seed);

/// Binary difference attack on a column-wise code; rows outside the exact
/// set are filled from the estimated column biases.
AttackResult cwc_attack(const MarkedCopies& copies, const Coalition& coalition, double tau, std::uint64_t seed);

struct GaussianAttackParams {
    double xi = 0.12;
    int w = 2;
    double alpha = 1.0;
    double sigma0 = 0.0;

    void validate() const;
};

/// Truncation bound from Chebyshev: xi = sigma / sqrt(epsilon).
double choose_xi(double sigma, double epsilon = 1.0 / 14.4);

/// Quantizes every difference to a multiple of xi/w in [-(2w-1)xi/w, (2w-1)xi/w].
Matrix gaussian_quantize(const DifferenceMatrix& a, const GaussianAttackParams& params);

/// Attacker alphabet: bin centres -xi + (xi/2w)(2i-1), i = 1..2w, with prior
/// equal to the Normal(0, sigma^2) mass of each bin (tails folded in).
Alphabet gaussian_attack_alphabet(const GaussianAttackParams& params, double sigma);

AttackResult gaussian_attack(const MarkedCopies& copies, const Coalition& coalition,
                             const GaussianAttackParams& params, std::uint64_t seed);

// -- baselines ----------------------------------------------------------------

/// Mean of the coalition's copies plus i.i.d. Normal(0, noise_sigma^2).
std::vector<double> baseline_average(const Matrix& copies, const Coalition& coalition, double noise_sigma,
                                     std::uint64_t seed);

/// Per coordinate, the least frequent value among the coalition's copies
/// (ties to the smaller value).
std::vector<double> baseline_minority(const Matrix& copies, const Coalition& coalition);

/// Per coordinate, the most frequent value (ties to the smaller value).
std::vector<double> baseline_majority(const Matrix& copies, const Coalition& coalition);

/// Adds i.i.d. Normal(0, sigma^2) to y in place.
void add_gaussian_noise(std::span<double> y, double sigma, std::uint64_t seed);

}  // namespace fpattack
