#include "fpattack/alphabet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fpattack/error.hpp"

namespace fpattack {

Alphabet::Alphabet(std::vector<double> symbols, std::vector<double> prior)
    : symbols_(std::move(symbols)), prior_(std::move(prior)) {
    require(symbols_.size() >= 2, "alphabet needs at least two symbols");
    require(prior_.size() == symbols_.size(), "prior length must equal alphabet length");
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        require(std::isfinite(symbols_[i]), "alphabet symbols must be finite");
        if (i > 0) require(symbols_[i] > symbols_[i - 1], "alphabet symbols must be strictly increasing");
    }
    double total = 0.0;
    for (double p : prior_) {
        require(p >= 0.0 && std::isfinite(p), "prior entries must be non-negative");
        total += p;
    }
    require(std::fabs(total - 1.0) <= 1e-12, "prior must sum to 1");
}

Alphabet Alphabet::uniform(std::vector<double> symbols) {
    std::vector<double> prior(symbols.size(), symbols.empty() ? 0.0 : 1.0 / static_cast<double>(symbols.size()));
    // Make the sum exact for awkward sizes such as 3.
    if (!prior.empty()) prior.back() = 1.0 - std::accumulate(prior.begin(), prior.end() - 1, 0.0);
    return Alphabet(std::move(symbols), std::move(prior));
}

std::optional<std::size_t> Alphabet::find(double value, double tol) const {
    auto it = std::lower_bound(symbols_.begin(), symbols_.end(), value - tol);
    if (it == symbols_.end() || *it > value + tol) return std::nullopt;
    // With tol below half the minimum gap at most one symbol qualifies; otherwise take the nearest.
    auto best = it;
    for (auto jt = it + 1; jt != symbols_.end() && *jt <= value + tol; ++jt)
        if (std::fabs(*jt - value) < std::fabs(*best - value)) best = jt;
    return static_cast<std::size_t>(best - symbols_.begin());
}

Alphabet Alphabet::scaled(double factor) const {
    require(factor > 0.0 && std::isfinite(factor), "alphabet scale factor must be positive");
    std::vector<double> s(symbols_);
    for (double& v : s) v *= factor;
    return Alphabet(std::move(s), prior_);
}

Alphabet Alphabet::with_prior(std::vector<double> prior) const { return Alphabet(symbols_, std::move(prior)); }

std::vector<double> UniqueDifferenceSet::values() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.value);
    return out;
}

std::optional<std::pair<std::size_t, std::size_t>> UniqueDifferenceSet::lookup(double value, double tol) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), value - tol,
                               [](const Entry& e, double v) { return e.value < v; });
    if (it == entries.end() || it->value > value + tol) return std::nullopt;
    return std::make_pair(it->minuend, it->subtrahend);
}

UniqueDifferenceSet build_unique_set(const Alphabet& alphabet) {
    const auto sym = alphabet.symbols();
    const double tol = alphabet.match_tolerance();
    struct Diff {
        double value;
        std::size_t i, j;
    };
    std::vector<Diff> diffs;
    diffs.reserve(sym.size() * sym.size());
    for (std::size_t i = 0; i < sym.size(); ++i)
        for (std::size_t j = 0; j < sym.size(); ++j) diffs.push_back({sym[i] - sym[j], i, j});
    std::sort(diffs.begin(), diffs.end(), [](const Diff& a, const Diff& b) { return a.value < b.value; });

    UniqueDifferenceSet out;
    for (std::size_t k = 0; k < diffs.size();) {
        std::size_t end = k + 1;
        while (end < diffs.size() && diffs[end].value - diffs[k].value <= tol) ++end;
        if (end - k == 1) out.entries.push_back({diffs[k].value, diffs[k].i, diffs[k].j});
        k = end;
    }
    return out;
}

std::vector<double> pairwise_differences(std::span<const double> row, double tol) {
    std::vector<double> out;
    out.reserve(row.size() * row.size());
    for (double a : row)
        for (double b : row) out.push_back(a - b);
    std::sort(out.begin(), out.end());
    std::vector<double> merged;
    for (double v : out)
        if (merged.empty() || v - merged.back() > tol) merged.push_back(v);
    return merged;
}

namespace {

// Fills idx with the alphabet index of b_j = b_1 - row_j for the candidate
// whose first entry is symbol `first`; false if some b_j is off-alphabet.
bool candidate_indices(std::span<const double> row, const Alphabet& alphabet, std::size_t first, double tol,
                       std::vector<std::size_t>& idx) {
    const double b1 = alphabet.symbols()[first];
    idx.resize(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
        auto hit = alphabet.find(b1 - row[j], tol);
        if (!hit) return false;
        idx[j] = *hit;
    }
    return true;
}

void check_row(std::span<const double> row) {
    require(!row.empty(), "observation row must have at least one entry");
    require(row[0] == 0.0, "observation row must start with 0 (pivot minus itself)");
}

}  // namespace

std::vector<std::vector<double>> enumerate_consistent(std::span<const double> row, const Alphabet& alphabet,
                                                      std::optional<double> tol) {
    check_row(row);
    const double t = tol.value_or(alphabet.match_tolerance());
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> idx;
    for (std::size_t s = 0; s < alphabet.size(); ++s) {
        if (!candidate_indices(row, alphabet, s, t, idx)) continue;
        std::vector<double> b(idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j) b[j] = alphabet.symbols()[idx[j]];
        out.push_back(std::move(b));
    }
    return out;
}

RowDecodeResult decode_row(std::span<const double> row, const Alphabet& alphabet, DecodePolicy policy,
                           std::optional<double> tol) {
    check_row(row);
    std::optional<std::size_t> zero;
    if (policy == DecodePolicy::MaxZeros) {
        zero = alphabet.find(0.0);
        if (!zero) throw ConfigError("MaxZeros policy requires 0 in the alphabet");
    }
    const double t = tol.value_or(alphabet.match_tolerance());
    const auto prior = alphabet.prior();

    std::vector<double> log_prior(alphabet.size());
    for (std::size_t s = 0; s < alphabet.size(); ++s)
        log_prior[s] = prior[s] > 0.0 ? std::log(prior[s]) : -std::numeric_limits<double>::infinity();

    std::vector<std::size_t> idx, best_idx;
    std::vector<std::size_t> counts(alphabet.size());
    double best_score = 0.0;
    std::size_t n_candidates = 0;
    for (std::size_t s = 0; s < alphabet.size(); ++s) {
        if (!candidate_indices(row, alphabet, s, t, idx)) continue;
        // Score through symbol counts so equal multisets score identically.
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t k : idx) ++counts[k];
        double score;
        if (policy == DecodePolicy::MaxZeros) {
            score = static_cast<double>(counts[*zero]);
        } else {
            score = 0.0;
            for (std::size_t k = 0; k < counts.size(); ++k)
                if (counts[k] > 0) score += static_cast<double>(counts[k]) * log_prior[k];
        }
        if (n_candidates == 0 || score > best_score + 1e-12 * std::fabs(best_score)) {
            best_score = score;
            best_idx = idx;
        }
        ++n_candidates;
    }

    RowDecodeResult res;
    res.candidate_count = n_candidates;
    if (n_candidates == 0) {
        res.status = DecodeStatus::Inconsistent;
        return res;
    }
    res.status = n_candidates == 1 ? DecodeStatus::Exact : DecodeStatus::MostLikely;
    res.estimate.resize(best_idx.size());
    for (std::size_t j = 0; j < best_idx.size(); ++j) res.estimate[j] = alphabet.symbols()[best_idx[j]];
    return res;
}

Alphabet estimate_prior_from_exact_rows(std::span<const RowDecodeResult> decoded, const Alphabet& alphabet) {
    std::vector<double> counts(alphabet.size(), 0.0);
    double total = 0.0;
    for (const auto& r : decoded) {
        if (r.status != DecodeStatus::Exact) continue;
        for (double v : r.estimate) {
            auto k = alphabet.find(v);
            if (!k) throw ValidationError("decoded estimate contains a value outside the alphabet");
            counts[*k] += 1.0;
            total += 1.0;
        }
    }
    if (total == 0.0) throw EstimationError("no exactly decoded rows: cannot estimate the prior");
    for (double& c : counts) c /= total;
    // Absorb rounding so the prior passes the sum-to-one check.
    double rest = 0.0;
    for (std::size_t k = 0; k + 1 < counts.size(); ++k) rest += counts[k];
    counts.back() = std::max(0.0, 1.0 - rest);
    return alphabet.with_prior(std::move(counts));
}

const char* to_string(DecodeStatus status) {
    switch (status) {
        case DecodeStatus::Exact: return "exact";
        case DecodeStatus::MostLikely: return "most_likely";
        case DecodeStatus::Inconsistent: return "inconsistent";
    }
    return "?";
}

const char* to_string(DecodePolicy policy) {
    return policy == DecodePolicy::MaxZeros ? "max_zeros" : "max_prior";
}

DecodePolicy parse_policy(std::string_view name) {
    if (name == "max_prior") return DecodePolicy::MaxPrior;
    if (name == "max_zeros") return DecodePolicy::MaxZeros;
    throw ValidationError("unknown decode policy '" + std::string(name) + "' (expected max_prior or max_zeros)");
}

}  // namespace fpattack
