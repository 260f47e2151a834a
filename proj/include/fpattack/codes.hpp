#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpattack/alphabet.hpp"
#include "fpattack/matrix.hpp"

namespace fpattack {

enum class CodeFamily { Symmetric, RTF, ETF, Tardos, CWC, Gaussian };

const char* to_string(CodeFamily family);
CodeFamily parse_family(std::string_view name);

struct HostSignal {
    std::vector<double> samples;

    explicit HostSignal(std::vector<double> s);
    std::size_t size() const { return samples.size(); }
};

/// i.i.d. standard normal host of length n.
HostSignal gaussian_host(std::size_t n, std::uint64_t seed);

/// N x M fingerprint matrix; column m is user m's fingerprint.
struct FingerprintMatrix {
    Matrix entries;
    CodeFamily family = CodeFamily::Gaussian;
    double scale = 1.0;               // z: entries = unscaled symbol / z
    std::optional<Alphabet> alphabet; // unscaled symbols, finite families only
    std::map<std::string, double> meta;

    std::size_t length() const { return entries.rows(); }  // N
    std::size_t users() const { return entries.cols(); }   // M

    /// Alphabet of the actual (scaled) entries.
    Alphabet scaled_alphabet() const;
};

struct MarkedCopies {
    HostSignal host;
    Matrix copies;  // column m = f_m + s
};

MarkedCopies distribute(const FingerprintMatrix& code, const HostSignal& host);

// -- random symmetric families ------------------------------------------

/// p = (p_0, ..., p_w): p_0 is the mass at 0, p_k the mass at each of +-k/z.
FingerprintMatrix gen_symmetric(std::size_t n, std::size_t m, int w, std::span<const double> p, std::uint64_t seed);

/// Random ternary code: symmetric with w = 1 and p = (1 - 2p, p).
FingerprintMatrix gen_rtf(std::size_t n, std::size_t m, double p, std::uint64_t seed);

// -- ETF ------------------------------------------------------------------

struct SteinerSystem {
    int r = 2, h = 2, n = 2;
    std::vector<std::vector<int>> blocks;  // 0-based points, sorted within a block

    std::size_t block_count() const { return blocks.size(); }
    /// Number of blocks through each point, C(n-1, r-1) / C(h-1, r-1).
    std::size_t replication() const;
    /// Throws ValidationError unless every r-subset lies in exactly one block.
    void validate() const;
};

/// Native constructions: S(2,2,n) and S(2,3,n) for n = 1 or 3 mod 6.
SteinerSystem steiner_system(int r, int h, int n);

/// Blocks from text: one block per line, whitespace-separated 1-based
/// points; '#' starts a comment. n is the largest point seen.
SteinerSystem load_steiner(const std::filesystem::path& path, int r = 2);
SteinerSystem parse_steiner(std::string_view text, int r = 2);

struct HadamardMatrix {
    std::size_t order = 0;
    std::vector<std::int8_t> entries;  // row-major, +-1

    int operator()(std::size_t r, std::size_t c) const { return entries[r * order + c]; }
};

/// Sylvester construction; order must be a power of two.
HadamardMatrix hadamard(std::size_t order);

/// F_ETF from a Steiner system and a Hadamard matrix of order m0.
///
/// Every incidence (block b, point j) is replaced by a row of H other than
/// the all-ones row: the t-th block through point j (in block order) gets
/// row t + 1, so the m0 users attached to point j see distinct rows.
/// Requires m0 >= replication + 1; the frame is equiangular exactly when
/// m0 == replication + 1. Scale z = sqrt(replication).
FingerprintMatrix gen_etf(const SteinerSystem& steiner, std::size_t m0);
FingerprintMatrix gen_etf(int r, int h, int n, std::size_t m0);

// -- probabilistic binary codes --------------------------------------------

struct TardosCode {
    FingerprintMatrix code;
    std::vector<double> rho;  // per-row bias
    int k_design = 2;
    double epsilon = 0.1;
    int c = 1;
    double t = 0.0;
};

/// Code length is 100 * k_design^2 * ceil(ln(1/epsilon)).
TardosCode gen_tardos(int k_design, double epsilon, std::size_t m, std::uint64_t seed);

/// Rebuilds a Tardos code object from a stored matrix and biases.
TardosCode make_tardos(Matrix entries, std::vector<double> rho, int k_design, double epsilon);

struct CwcCode {
    FingerprintMatrix code;
    std::vector<double> p;  // per-column bias
    double t = 0.0;
};

CwcCode gen_cwc(std::size_t n, std::size_t m, double t, std::uint64_t seed);

/// Entries i.i.d. Normal(0, 1/N).
FingerprintMatrix gen_gaussian(std::size_t n, std::size_t m, std::uint64_t seed);

}  // namespace fpattack
