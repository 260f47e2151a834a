#include "fpattack/codes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "fpattack/error.hpp"
#include "fpattack/kernels.hpp"
#include "fpattack/rng.hpp"

namespace fpattack {

const char* to_string(CodeFamily family) {
    switch (family) {
        case CodeFamily::Symmetric: return "symmetric";
        case CodeFamily::RTF: return "rtf";
        case CodeFamily::ETF: return "etf";
        case CodeFamily::Tardos: return "tardos";
        case CodeFamily::CWC: return "cwc";
        case CodeFamily::Gaussian: return "gaussian";
    }
    return "?";
}

CodeFamily parse_family(std::string_view name) {
    for (auto f : {CodeFamily::Symmetric, CodeFamily::RTF, CodeFamily::ETF, CodeFamily::Tardos, CodeFamily::CWC,
                   CodeFamily::Gaussian})
        if (name == to_string(f)) return f;
    throw ValidationError("unknown code family '" + std::string(name) + "'");
}

HostSignal::HostSignal(std::vector<double> s) : samples(std::move(s)) {
    require(!samples.empty(), "host signal must have at least one sample");
    for (double v : samples) require(std::isfinite(v), "host signal samples must be finite");
}

HostSignal gaussian_host(std::size_t n, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> s(n);
    for (double& v : s) v = normal(rng);
    return HostSignal(std::move(s));
}

Alphabet FingerprintMatrix::scaled_alphabet() const {
    if (!alphabet) throw ValidationError(std::string(to_string(family)) + " code has no finite alphabet");
    return alphabet->scaled(1.0 / scale);
}

MarkedCopies distribute(const FingerprintMatrix& code, const HostSignal& host) {
    require(code.length() == host.size(), "host length must equal the fingerprint length");
    Matrix copies = code.entries;
    for (std::size_t m = 0; m < copies.cols(); ++m) kernels::axpy(1.0, host.samples, copies.col(m));
    return MarkedCopies{host, std::move(copies)};
}

// ---------------------------------------------------------------------------

FingerprintMatrix gen_symmetric(std::size_t n, std::size_t m, int w, std::span<const double> p, std::uint64_t seed) {
    require(n >= 1 && m >= 1, "code dimensions must be positive");
    require(w >= 1, "symmetric code needs w >= 1");
    require(p.size() == static_cast<std::size_t>(w) + 1, "probability vector must have w + 1 entries");
    double total = p[0];
    double second_moment = 0.0;
    for (int k = 0; k <= w; ++k) {
        require(p[k] > 0.0, "symmetric code probabilities must be positive");
        if (k > 0) {
            total += 2.0 * p[k];
            second_moment += p[k] * k * k;
        }
    }
    require(std::fabs(total - 1.0) <= 1e-12, "p_0 + 2 * sum_k p_k must equal 1");

    const double z = std::sqrt(2.0 * static_cast<double>(n) * second_moment);
    std::vector<double> symbols, prior;
    for (int k = -w; k <= w; ++k) {
        symbols.push_back(k);
        prior.push_back(p[std::abs(k)]);
    }
    std::vector<double> cdf(prior.size());
    std::partial_sum(prior.begin(), prior.end(), cdf.begin());
    cdf.back() = 1.0;

    FingerprintMatrix out;
    out.entries = Matrix(n, m);
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t j = 0; j < m; ++j) {
        auto col = out.entries.col(j);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = unif(rng);
            const auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            col[i] = symbols[std::min(k, symbols.size() - 1)] / z;
        }
    }
    out.family = CodeFamily::Symmetric;
    out.scale = z;
    out.alphabet = Alphabet(std::move(symbols), std::move(prior));
    out.meta = {{"w", static_cast<double>(w)}};
    return out;
}

FingerprintMatrix gen_rtf(std::size_t n, std::size_t m, double p, std::uint64_t seed) {
    require(p > 0.0 && p < 0.5, "RTF parameter p must lie in (0, 1/2)");
    const double probs[2] = {1.0 - 2.0 * p, p};
    FingerprintMatrix out = gen_symmetric(n, m, 1, probs, seed);
    out.family = CodeFamily::RTF;
    out.meta["p"] = p;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

void for_each_subset(const std::vector<int>& items, int r, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (static_cast<int>(pick.size()) == r) {
            fn(pick);
            return;
        }
        for (std::size_t i = start; i < items.size(); ++i) {
            pick.push_back(items[i]);
            rec(i + 1);
            pick.pop_back();
        }
    };
    rec(0);
}

void canonicalize(SteinerSystem& s) {
    for (auto& b : s.blocks) std::sort(b.begin(), b.end());
    std::sort(s.blocks.begin(), s.blocks.end());
}

}  // namespace

std::size_t SteinerSystem::replication() const {
    const std::uint64_t num = binomial(n - 1, r - 1);
    const std::uint64_t den = binomial(h - 1, r - 1);
    return den == 0 ? 0 : static_cast<std::size_t>(num / den);
}

void SteinerSystem::validate() const {
    require(r >= 1 && h >= r && n >= h, "Steiner parameters must satisfy 1 <= r <= h <= n");
    for (const auto& b : blocks) {
        require(static_cast<int>(b.size()) == h, "every Steiner block must have h points");
        for (std::size_t i = 0; i < b.size(); ++i) {
            require(b[i] >= 0 && b[i] < n, "Steiner block point out of range");
            if (i > 0) require(b[i] > b[i - 1], "Steiner block points must be distinct");
        }
    }
    const std::uint64_t expected_blocks = binomial(n, r) / binomial(h, r);
    require(blocks.size() == expected_blocks,
            "Steiner system has " + std::to_string(blocks.size()) + " blocks, expected " +
                std::to_string(expected_blocks));

    if (r == 2) {
        std::vector<std::uint8_t> seen(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
        for (const auto& b : blocks)
            for (std::size_t i = 0; i < b.size(); ++i)
                for (std::size_t j = i + 1; j < b.size(); ++j) {
                    auto& cell = seen[static_cast<std::size_t>(b[i]) * n + static_cast<std::size_t>(b[j])];
                    require(cell == 0, "pair {" + std::to_string(b[i] + 1) + "," + std::to_string(b[j] + 1) +
                                           "} is covered by more than one block");
                    cell = 1;
                }
        // Block count matches C(n,2)/C(h,2) and no pair repeats, so all pairs are covered.
        return;
    }
    std::map<std::vector<int>, int> seen;
    for (const auto& b : blocks)
        for_each_subset(b, r, [&](const std::vector<int>& sub) {
            require(++seen[sub] == 1, "an r-subset is covered by more than one block");
        });
    require(seen.size() == binomial(n, r), "some r-subset is not covered by any block");
}

SteinerSystem steiner_system(int r, int h, int n) {
    SteinerSystem s{r, h, n, {}};
    if (r == 2 && h == 2) {
        require(n >= 2, "S(2,2,n) needs n >= 2");
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s.blocks.push_back({i, j});
    } else if (r == 2 && h == 3 && n >= 3 && n % 6 == 3) {
        // Bose: idempotent commutative quasigroup x o y = (x + y)(m + 1)/2 mod m on Z_m.
        const int m = n / 3;
        auto op = [m](int x, int y) { return ((x + y) * ((m + 1) / 2)) % m; };
        auto pt = [m](int x, int i) { return x + (i % 3) * m; };
        for (int x = 0; x < m; ++x) s.blocks.push_back({pt(x, 0), pt(x, 1), pt(x, 2)});
        for (int i = 0; i < 3; ++i)
            for (int x = 0; x < m; ++x)
                for (int y = x + 1; y < m; ++y) s.blocks.push_back({pt(x, i), pt(y, i), pt(op(x, y), i + 1)});
    } else if (r == 2 && h == 3 && n >= 7 && n % 6 == 1) {
        // Skolem: half-idempotent commutative quasigroup on Z_2v plus a point at infinity.
        const int v = (n - 1) / 6;
        const int q = 2 * v;
        auto op = [v, q](int x, int y) {
            const int s2 = (x + y) % q;
            return s2 % 2 == 0 ? s2 / 2 : (s2 - 1) / 2 + v;
        };
        auto pt = [q](int x, int i) { return x + (i % 3) * q; };
        const int inf = n - 1;
        for (int x = 0; x < v; ++x) s.blocks.push_back({pt(x, 0), pt(x, 1), pt(x, 2)});
        for (int i = 0; i < 3; ++i)
            for (int x = 0; x < v; ++x) s.blocks.push_back({inf, pt(x + v, i), pt(x, i + 1)});
        for (int i = 0; i < 3; ++i)
            for (int x = 0; x < q; ++x)
                for (int y = x + 1; y < q; ++y) s.blocks.push_back({pt(x, i), pt(y, i), pt(op(x, y), i + 1)});
    } else {
        throw ValidationError("no native construction for S(" + std::to_string(r) + "," + std::to_string(h) + "," +
                              std::to_string(n) + "); provide a block file");
    }
    canonicalize(s);
    s.validate();
    return s;
}

SteinerSystem parse_steiner(std::string_view text, int r) {
    SteinerSystem s;
    s.r = r;
    s.h = 0;
    s.n = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<int> block;
        std::string tok;
        while (ls >> tok) {
            int v = 0;
            try {
                std::size_t used = 0;
                v = std::stoi(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ValidationError("block file line " + std::to_string(lineno) + ": '" + tok +
                                      "' is not an integer");
            }
            if (v < 1) throw ValidationError("block file line " + std::to_string(lineno) + ": points are 1-based");
            block.push_back(v - 1);
            s.n = std::max(s.n, v);
        }
        if (block.empty()) continue;
        if (s.h == 0) s.h = static_cast<int>(block.size());
        if (static_cast<int>(block.size()) != s.h)
            throw ValidationError("block file line " + std::to_string(lineno) + ": expected " + std::to_string(s.h) +
                                  " points, found " + std::to_string(block.size()));
        s.blocks.push_back(std::move(block));
    }
    require(!s.blocks.empty(), "block file contains no blocks");
    for (auto& b : s.blocks) std::sort(b.begin(), b.end());
    s.validate();
    return s;
}

SteinerSystem load_steiner(const std::filesystem::path& path, int r) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open block file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_steiner(buf.str(), r);
}

HadamardMatrix hadamard(std::size_t order) {
    require(order >= 1 && (order & (order - 1)) == 0,
            "Hadamard order " + std::to_string(order) + " is not a power of two");
    HadamardMatrix h{1, {1}};
    while (h.order < order) {
        const std::size_t n = h.order;
        std::vector<std::int8_t> next(4 * n * n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                const auto v = h.entries[r * n + c];
                next[r * 2 * n + c] = v;
                next[r * 2 * n + c + n] = v;
                next[(r + n) * 2 * n + c] = v;
                next[(r + n) * 2 * n + c + n] = static_cast<std::int8_t>(-v);
            }
        h.order = 2 * n;
        h.entries = std::move(next);
    }
    return h;
}

FingerprintMatrix gen_etf(const SteinerSystem& steiner, std::size_t m0) {
    const HadamardMatrix H = hadamard(m0);
    const auto n = static_cast<std::size_t>(steiner.n);
    const std::size_t rows = steiner.block_count();

    std::vector<std::vector<std::size_t>> through(n);
    for (std::size_t b = 0; b < rows; ++b)
        for (int p : steiner.blocks[b]) through[static_cast<std::size_t>(p)].push_back(b);
    const std::size_t rep = through.front().size();
    for (const auto& t : through) require(t.size() == rep, "Steiner system is not regular");
    require(m0 >= rep + 1, "Hadamard order " + std::to_string(m0) + " too small: need at least " +
                               std::to_string(rep + 1) + " rows containing -1 plus the all-ones row");

    const double z = std::sqrt(static_cast<double>(rep));
    FingerprintMatrix out;
    out.entries = Matrix(rows, n * m0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t t = 0; t < rep; ++t) {
            const std::size_t b = through[j][t];
            for (std::size_t k = 0; k < m0; ++k) out.entries(b, j * m0 + k) = H(t + 1, k) / z;
        }

    const double nz = static_cast<double>(steiner.h) * static_cast<double>(m0) / static_cast<double>(n * m0);
    out.family = CodeFamily::ETF;
    out.scale = z;
    out.alphabet = Alphabet({-1.0, 0.0, 1.0}, {nz / 2.0, 1.0 - nz, nz / 2.0});
    out.meta = {{"r", static_cast<double>(steiner.r)},
                {"h", static_cast<double>(steiner.h)},
                {"n", static_cast<double>(steiner.n)},
                {"m0", static_cast<double>(m0)},
                {"replication", static_cast<double>(rep)},
                {"n_gt_8h", steiner.n > 8 * steiner.h ? 1.0 : 0.0}};
    return out;
}

FingerprintMatrix gen_etf(int r, int h, int n, std::size_t m0) { return gen_etf(steiner_system(r, h, n), m0); }

// ---------------------------------------------------------------------------

TardosCode make_tardos(Matrix entries, std::vector<double> rho, int k_design, double epsilon) {
    require(k_design >= 2, "Tardos design coalition size must be >= 2");
    require(epsilon > 0.0 && epsilon < 1.0, "Tardos epsilon must lie in (0, 1)");
    require(rho.size() == entries.rows(), "Tardos bias vector length must equal the code length");
    TardosCode out;
    out.k_design = k_design;
    out.epsilon = epsilon;
    out.c = static_cast<int>(std::ceil(std::log(1.0 / epsilon)));
    out.t = std::asin(std::sqrt(1.0 / (300.0 * k_design)));
    out.rho = std::move(rho);
    for (double r : out.rho) require(r > 0.0 && r < 1.0, "Tardos biases must lie in (0, 1)");
    for (double v : entries.data()) require(v == 0.0 || v == 1.0, "Tardos entries must be binary");
    out.code.entries = std::move(entries);
    out.code.family = CodeFamily::Tardos;
    out.code.scale = 1.0;
    out.code.alphabet = Alphabet({0.0, 1.0}, {0.5, 0.5});
    out.code.meta = {{"k_design", static_cast<double>(k_design)},
                     {"epsilon", epsilon},
                     {"c", static_cast<double>(out.c)},
                     {"t", out.t}};
    return out;
}

TardosCode gen_tardos(int k_design, double epsilon, std::size_t m, std::uint64_t seed) {
    require(k_design >= 2, "Tardos design coalition size must be >= 2");
    require(epsilon > 0.0 && epsilon < 1.0, "Tardos epsilon must lie in (0, 1)");
    require(m >= 1, "Tardos code needs at least one user");
    const int c = static_cast<int>(std::ceil(std::log(1.0 / epsilon)));
    const auto n = static_cast<std::size_t>(100) * static_cast<std::size_t>(k_design * k_design) *
                   static_cast<std::size_t>(c);
    const double t = std::asin(std::sqrt(1.0 / (300.0 * k_design)));

    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> angle(t, std::numbers::pi / 2.0 - t);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> rho(n);
    Matrix f(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::sin(angle(rng));
        rho[i] = s * s;
        for (std::size_t j = 0; j < m; ++j) f(i, j) = unif(rng) < rho[i] ? 1.0 : 0.0;
    }
    return make_tardos(std::move(f), std::move(rho), k_design, epsilon);
}

CwcCode gen_cwc(std::size_t n, std::size_t m, double t, std::uint64_t seed) {
    require(n >= 1 && m >= 1, "code dimensions must be positive");
    require(t > 0.0 && t < std::numbers::pi / 4.0, "CWC angle t must lie in (0, pi/4)");
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> angle(t, std::numbers::pi / 2.0 - t);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    CwcCode out;
    out.t = t;
    out.p.resize(m);
    out.code.entries = Matrix(n, m);
    for (std::size_t j = 0; j < m; ++j) {
        const double s = std::sin(angle(rng));
        out.p[j] = s * s;
        auto col = out.code.entries.col(j);
        for (std::size_t i = 0; i < n; ++i) col[i] = unif(rng) < out.p[j] ? 1.0 : 0.0;
    }
    out.code.family = CodeFamily::CWC;
    out.code.scale = 1.0;
    out.code.alphabet = Alphabet({0.0, 1.0}, {0.5, 0.5});
    out.code.meta = {{"t", t}};
    return out;
}

FingerprintMatrix gen_gaussian(std::size_t n, std::size_t m, std::uint64_t seed) {
    require(n >= 1 && m >= 1, "code dimensions must be positive");
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
    FingerprintMatrix out;
    out.entries = Matrix(n, m);
    for (double& v : out.entries.data()) v = normal(rng);
    out.family = CodeFamily::Gaussian;
    out.scale = 1.0;
    out.meta = {{"sigma", 1.0 / std::sqrt(static_cast<double>(n))}};
    return out;
}

}  // namespace fpattack
