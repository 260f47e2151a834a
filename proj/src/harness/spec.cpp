#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "fpattack/alphabet.hpp"
#include "fpattack/codes.hpp"
#include "fpattack/error.hpp"
#include "fpattack/harness.hpp"

namespace fpattack {

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Failure: return "failure";
        case ExperimentKind::Detection: return "detection";
        case ExperimentKind::FpVsFnpr: return "fp_vs_fnpr";
        case ExperimentKind::TardosExactFraction: return "tardos_exact_fraction";
        case ExperimentKind::CwcError: return "cwc_error";
        case ExperimentKind::GaussianError: return "gaussian_error";
    }
    return "?";
}

ExperimentKind parse_kind(std::string_view name) {
    for (auto k : {ExperimentKind::Failure, ExperimentKind::Detection, ExperimentKind::FpVsFnpr,
                   ExperimentKind::TardosExactFraction, ExperimentKind::CwcError, ExperimentKind::GaussianError})
        if (name == to_string(k)) return k;
    throw ValidationError("unknown experiment kind '" + std::string(name) + "'");
}

double parse_number(std::string_view s) {
    // "pi/1000" style angles are accepted for convenience.
    if (s.rfind("pi/", 0) == 0) return std::numbers::pi / parse_number(s.substr(3));
    if (s == "pi") return std::numbers::pi;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError("not a number: '" + std::string(s) + "'");
    return v;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto piece = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!piece.empty()) out.push_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double to_double(const std::string& s) { return parse_number(s); }

template <typename T>
T to_unsigned(const std::string& s) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError("not a non-negative integer: '" + s + "'");
    return v;
}

int to_int(const std::string& s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError("not an integer: '" + s + "'");
    return v;
}

// "2,4,8" or "2:10" or "2:10:2", mixed freely.
std::vector<int> to_int_list(const std::string& s) {
    std::vector<int> out;
    for (const auto& piece : split_list(s)) {
        const auto colon = piece.find(':');
        if (colon == std::string::npos) {
            out.push_back(to_int(piece));
            continue;
        }
        const auto rest = piece.substr(colon + 1);
        const auto colon2 = rest.find(':');
        const int lo = to_int(piece.substr(0, colon));
        const int hi = to_int(rest.substr(0, colon2));
        const int step = colon2 == std::string::npos ? 1 : to_int(rest.substr(colon2 + 1));
        if (step <= 0 || hi < lo) throw ValidationError("bad range '" + piece + "'");
        for (int v = lo; v <= hi; v += step) out.push_back(v);
    }
    return out;
}

std::vector<double> to_double_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& piece : split_list(s)) out.push_back(to_double(piece));
    return out;
}

using Setter = std::function<void(ExperimentSpec&, const std::string&)>;

const std::unordered_map<std::string, Setter>& setters() {
    static const std::unordered_map<std::string, Setter> table = {
        {"experiment.id", [](auto& s, const auto& v) { s.id = v; }},
        {"experiment.kind", [](auto& s, const auto& v) { s.kind = parse_kind(v); }},
        {"code.family", [](auto& s, const auto& v) { s.code.family = v; }},
        {"code.N", [](auto& s, const auto& v) { s.code.n = to_unsigned<std::size_t>(v); }},
        {"code.M", [](auto& s, const auto& v) { s.code.m = to_unsigned<std::size_t>(v); }},
        {"code.p", [](auto& s, const auto& v) { s.code.p = to_double(v); }},
        {"code.w", [](auto& s, const auto& v) { s.code.w = to_int(v); }},
        {"code.probs", [](auto& s, const auto& v) { s.code.probs = to_double_list(v); }},
        {"code.r", [](auto& s, const auto& v) { s.code.steiner_r = to_int(v); }},
        {"code.h", [](auto& s, const auto& v) { s.code.steiner_h = to_int(v); }},
        {"code.n", [](auto& s, const auto& v) { s.code.steiner_n = to_int(v); }},
        {"code.m0", [](auto& s, const auto& v) { s.code.m0 = to_unsigned<std::size_t>(v); }},
        {"code.steiner_file", [](auto& s, const auto& v) { s.code.steiner_file = v; }},
        {"code.K_design", [](auto& s, const auto& v) { s.code.k_design = to_int(v); }},
        {"code.epsilon", [](auto& s, const auto& v) { s.code.epsilon = to_double(v); }},
        {"code.t", [](auto& s, const auto& v) { s.code.t = to_double(v); }},
        {"attack.name", [](auto& s, const auto& v) { s.attack.names = split_list(v); }},
        {"attack.policy", [](auto& s, const auto& v) { s.attack.policy = v; }},
        {"attack.prior", [](auto& s, const auto& v) { s.attack.prior = v; }},
        {"attack.tau", [](auto& s, const auto& v) { s.attack.tau = to_double(v); }},
        {"attack.xi", [](auto& s, const auto& v) { s.attack.xi = to_double(v); }},
        {"attack.w", [](auto& s, const auto& v) { s.attack.w = to_int(v); }},
        {"attack.alpha", [](auto& s, const auto& v) { s.attack.alpha = to_double(v); }},
        {"attack.sigma0", [](auto& s, const auto& v) { s.attack.sigma0 = to_double(v); }},
        {"attack.forge_sigma0",
         [](auto& s, const auto& v) {
             if (v == "auto")
                 s.attack.forge_sigma0.reset();
             else
                 s.attack.forge_sigma0 = to_double(v);
         }},
        {"attack.c1", [](auto& s, const auto& v) { s.attack.c1 = to_double(v); }},
        {"attack.c2", [](auto& s, const auto& v) { s.attack.c2 = to_double(v); }},
        {"detector.name", [](auto& s, const auto& v) { s.detector.name = v; }},
        {"detector.fa", [](auto& s, const auto& v) { s.detector.fa = to_double(v); }},
        {"detector.calibration_trials",
         [](auto& s, const auto& v) { s.detector.calibration_trials = to_unsigned<std::size_t>(v); }},
        {"detector.noise_sigma",
         [](auto& s, const auto& v) {
             if (v == "auto")
                 s.detector.noise_sigma.reset();
             else
                 s.detector.noise_sigma = to_double(v);
         }},
        {"sweep.K", [](auto& s, const auto& v) { s.ks = to_int_list(v); }},
        {"trials", [](auto& s, const auto& v) { s.trials = to_unsigned<std::size_t>(v); }},
        {"seed",
         [](auto& s, const auto& v) {
             s.seed = to_unsigned<std::uint64_t>(v);
             s.has_seed = true;
         }},
        {"failure.criterion",
         [](auto& s, const auto& v) {
             if (v == "any")
                 s.criterion = FailureCriterion::AnyCoordinate;
             else if (v == "fraction")
                 s.criterion = FailureCriterion::FractionWrong;
             else
                 throw ValidationError("failure.criterion must be 'any' or 'fraction'");
         }},
        {"failure.theta", [](auto& s, const auto& v) { s.theta = to_double(v); }},
        {"fnpr.noise", [](auto& s, const auto& v) { s.noise_levels = to_double_list(v); }},
        {"fnpr.bin_db", [](auto& s, const auto& v) { s.fnpr_bin_db = to_double(v); }},
        {"fnpr.min_trials", [](auto& s, const auto& v) { s.fnpr_min_trials = to_unsigned<std::size_t>(v); }},
        {"output", [](auto& s, const auto& v) { s.output = v; }},
    };
    return table;
}

bool is_attack(const std::string& name) {
    for (const char* a : {"finite_alphabet", "etf", "tardos", "cwc", "gaussian", "average", "minority", "majority"})
        if (name == a) return true;
    return false;
}

bool produces_estimate(const std::string& name) {
    return name == "finite_alphabet" || name == "etf" || name == "tardos" || name == "cwc" || name == "gaussian";
}

}  // namespace

ExperimentSpec parse_spec(std::string_view text) {
    ExperimentSpec spec;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const auto where = "line " + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw ValidationError(where + "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ValidationError(where + "unknown key '" + key + "'");
        if (value.empty()) throw ValidationError(where + "empty value for '" + key + "'");
        try {
            it->second(spec, value);
        } catch (const ValidationError& e) {
            throw ValidationError(where + key + ": " + e.what());
        }
    }
    return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read spec file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_spec(buf.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void ExperimentSpec::validate() const {
    require(!id.empty() && id.find_first_of(",\n\"") == std::string::npos, "experiment.id must be non-empty, without commas");
    require(trials >= 1, "trials must be >= 1");
    require(!ks.empty(), "sweep.K must list at least one coalition size");
    require(theta > 0.0 && theta <= 1.0, "failure.theta must lie in (0, 1]");
    require(!attack.names.empty(), "attack.name must list at least one attack");
    const CodeFamily family = parse_family(code.family);

    std::size_t users = code.m;
    switch (family) {
        case CodeFamily::ETF:
            users = static_cast<std::size_t>(code.steiner_n) * code.m0;
            break;
        case CodeFamily::Tardos:
            require(code.m >= 1, "code.M must be >= 1");
            break;
        default:
            require(code.n >= 1 && code.m >= 1, "code.N and code.M must be >= 1");
    }
    for (int k : ks) require(k >= 1 && static_cast<std::size_t>(k) <= users, "every K in sweep.K must lie in [1, M]");

    for (const auto& a : attack.names) {
        require(is_attack(a), "unknown attack '" + a + "'");
        if (a == "finite_alphabet")
            require(family == CodeFamily::Symmetric || family == CodeFamily::RTF || family == CodeFamily::ETF,
                    "finite_alphabet attack needs a symmetric, rtf or etf code");
        if (a == "etf") require(family == CodeFamily::ETF, "etf attack needs an etf code");
        if (a == "tardos") require(family == CodeFamily::Tardos, "tardos attack needs a tardos code");
        if (a == "cwc") require(family == CodeFamily::CWC, "cwc attack needs a cwc code");
        if (a == "gaussian") require(family == CodeFamily::Gaussian, "gaussian attack needs a gaussian code");
    }
    parse_policy(attack.policy);
    require(attack.prior == "known" || attack.prior == "estimated", "attack.prior must be 'known' or 'estimated'");
    require(attack.tau >= 0.0 && attack.tau < 0.5, "attack.tau must lie in [0, 1/2)");
    require(attack.sigma0 >= 0.0, "attack.sigma0 must be >= 0");
    require(attack.c1 > 0.0 && attack.c2 >= 0.0, "attack.c1 must be > 0 and attack.c2 >= 0");
    if (attack.forge_sigma0) require(*attack.forge_sigma0 >= 0.0, "attack.forge_sigma0 must be >= 0");

    require(detector.name == "none" || detector.name == "focused" || detector.name == "tardos",
            "detector.name must be none, focused or tardos");
    if (detector.name == "tardos") require(family == CodeFamily::Tardos, "tardos detector needs a tardos code");
    if (detector.name == "focused") {
        require(detector.fa > 0.0 && detector.fa < 1.0, "detector.fa must lie in (0, 1)");
        require(detector.calibration_trials >= 100, "detector.calibration_trials must be >= 100");
        if (detector.noise_sigma) require(*detector.noise_sigma > 0.0, "detector.noise_sigma must be > 0");
    }

    switch (kind) {
        case ExperimentKind::Failure:
        case ExperimentKind::TardosExactFraction:
        case ExperimentKind::CwcError:
        case ExperimentKind::GaussianError:
            for (const auto& a : attack.names)
                require(produces_estimate(a), "attack '" + a + "' produces no fingerprint estimate");
            break;
        case ExperimentKind::Detection:
            require(detector.name != "none", "detection experiments need a detector");
            break;
        case ExperimentKind::FpVsFnpr:
            require(detector.name != "none", "fp_vs_fnpr experiments need a detector");
            require(!noise_levels.empty(), "fnpr.noise must list at least one level");
            for (double s : noise_levels) require(s >= 0.0 && std::isfinite(s), "fnpr.noise levels must be >= 0");
            require(fnpr_bin_db > 0.0, "fnpr.bin_db must be > 0");
            break;
    }
    if (kind == ExperimentKind::TardosExactFraction) require(family == CodeFamily::Tardos, "needs a tardos code");
    if (kind == ExperimentKind::CwcError) require(family == CodeFamily::CWC, "needs a cwc code");
    if (kind == ExperimentKind::GaussianError) require(family == CodeFamily::Gaussian, "needs a gaussian code");
}

}  // namespace fpattack
