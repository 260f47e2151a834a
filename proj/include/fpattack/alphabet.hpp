#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace fpattack {

/// Finite set of fingerprint amplitudes with a prior over them.
class Alphabet {
public:
    /// Throws ValidationError unless symbols are strictly increasing (at
    /// least two), the prior has matching length, is non-negative and sums
    /// to 1 within 1e-12.
    Alphabet(std::vector<double> symbols, std::vector<double> prior);

    /// Same symbols, uniform prior.
    static Alphabet uniform(std::vector<double> symbols);

    std::span<const double> symbols() const { return symbols_; }
    std::span<const double> prior() const { return prior_; }
    std::size_t size() const { return symbols_.size(); }
    double span_width() const { return symbols_.back() - symbols_.front(); }

    /// Default matching tolerance: 1e-9 of the alphabet span.
    double match_tolerance() const { return 1e-9 * span_width(); }

    /// Index of the symbol within `tol` of `value`, if any.
    std::optional<std::size_t> find(double value, double tol) const;
    std::optional<std::size_t> find(double value) const { return find(value, match_tolerance()); }

    /// Multiplies every symbol by `factor` (> 0); the prior is unchanged.
    Alphabet scaled(double factor) const;

    Alphabet with_prior(std::vector<double> prior) const;

    bool contains_zero() const { return find(0.0).has_value(); }

private:
    std::vector<double> symbols_;
    std::vector<double> prior_;
};

/// Differences xi_i - xi_j that are realized by exactly one ordered pair.
struct UniqueDifferenceSet {
    struct Entry {
        double value;
        std::size_t minuend;     // index i of xi_i
        std::size_t subtrahend;  // index j of xi_j
    };
    std::vector<Entry> entries;  // sorted by value

    std::vector<double> values() const;
    /// The unique (minuend, subtrahend) pair producing `value`, if any.
    std::optional<std::pair<std::size_t, std::size_t>> lookup(double value, double tol) const;
};

UniqueDifferenceSet build_unique_set(const Alphabet& alphabet);

/// Sorted, de-duplicated {a_j - a_k : all j, k} of one observation row.
std::vector<double> pairwise_differences(std::span<const double> row, double tol = 0.0);

/// Every b in alphabet^K with b_1 - b_j = row_j. Candidates are produced in
/// increasing order of b_1. Cost O(l K log l).
std::vector<std::vector<double>> enumerate_consistent(std::span<const double> row,
                                                      const Alphabet& alphabet,
                                                      std::optional<double> tol = std::nullopt);

enum class DecodeStatus { Exact, MostLikely, Inconsistent };

enum class DecodePolicy {
    MaxPrior,  // product prior over the candidate's entries
    MaxZeros,  // candidate with the most zero entries; needs 0 in the alphabet
};

struct RowDecodeResult {
    DecodeStatus status = DecodeStatus::Inconsistent;
    std::vector<double> estimate;  // empty iff Inconsistent
    std::size_t candidate_count = 0;
};

/// Decodes one observation row. Ties between equally scored candidates go
/// to the smallest b_1.
RowDecodeResult decode_row(std::span<const double> row, const Alphabet& alphabet, DecodePolicy policy,
                           std::optional<double> tol = std::nullopt);

/// Alphabet with prior replaced by symbol frequencies over all Exact rows.
/// Throws EstimationError if there are no Exact rows.
Alphabet estimate_prior_from_exact_rows(std::span<const RowDecodeResult> decoded, const Alphabet& alphabet);

const char* to_string(DecodeStatus status);
const char* to_string(DecodePolicy policy);
DecodePolicy parse_policy(std::string_view name);

}  // namespace fpattack
