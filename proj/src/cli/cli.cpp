#include "fpattack/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <thread>

#include "fpattack/analysis.hpp"
#include "fpattack/attacks.hpp"
#include "fpattack/codes.hpp"
#include "fpattack/detectors.hpp"
#include "fpattack/error.hpp"
#include "fpattack/harness.hpp"

namespace fpattack {

std::optional<std::string_view> bundled_spec(std::string_view id) {
    for (const auto& s : bundled_specs())
        if (s.id == id) return s.text;
    return std::nullopt;
}

namespace {

namespace fs = std::filesystem;

struct CodeOpts {
    std::string family;
    std::size_t n = 0, m = 0;
    double p = 1.0 / 6.0;
    int w = 1;
    std::vector<double> probs;
    int r = 2, h = 2, points = 16;
    std::size_t m0 = 16;
    std::string steiner_file;
    int k_design = 5;
    double epsilon = 0.1;
    std::string t = "pi/1000";
};

void add_code_flags(CLI::App* cmd, CodeOpts& o) {
    cmd->add_option("--family", o.family, "Code family: symmetric, rtf, etf, tardos, cwc, gaussian")->required();
    cmd->add_option("--N", o.n, "Code length N");
    cmd->add_option("--M", o.m, "Number of users M");
    cmd->add_option("--p", o.p, "RTF parameter p in (0, 1/2)");
    cmd->add_option("--w", o.w, "Symmetric code half-width w");
    cmd->add_option("--probs", o.probs, "Symmetric code probabilities p_0,...,p_w")->delimiter(',');
    cmd->add_option("--r", o.r, "Steiner parameter r");
    cmd->add_option("--h", o.h, "Steiner block size h");
    cmd->add_option("--n", o.points, "Steiner point count n");
    cmd->add_option("--m0", o.m0, "Hadamard order m0");
    cmd->add_option("--steiner-file", o.steiner_file, "Steiner block file (1-based points, one block per line)");
    cmd->add_option("--K-design", o.k_design, "Tardos design coalition size");
    cmd->add_option("--epsilon", o.epsilon, "Tardos error probability");
    cmd->add_option("--t", o.t, "CWC angle t (number or pi/<d>)");
}

SteinerSystem steiner_from(const CodeOpts& o) {
    return o.steiner_file.empty() ? steiner_system(o.r, o.h, o.points) : load_steiner(o.steiner_file, o.r);
}

struct GeneratedCode {
    FingerprintMatrix f;
    std::optional<std::vector<double>> rho, p;
    std::optional<TardosCode> tardos;
};

GeneratedCode generate(const CodeOpts& o, std::uint64_t seed) {
    GeneratedCode g;
    switch (parse_family(o.family)) {
        case CodeFamily::Symmetric: g.f = gen_symmetric(o.n, o.m, o.w, o.probs, seed); break;
        case CodeFamily::RTF: g.f = gen_rtf(o.n, o.m, o.p, seed); break;
        case CodeFamily::ETF: g.f = gen_etf(steiner_from(o), o.m0); break;
        case CodeFamily::Tardos: {
            TardosCode tc = gen_tardos(o.k_design, o.epsilon, o.m, seed);
            g.rho = tc.rho;
            g.f = std::move(tc.code);
            break;
        }
        case CodeFamily::CWC: {
            CwcCode cc = gen_cwc(o.n, o.m, parse_number(o.t), seed);
            g.p = cc.p;
            g.f = std::move(cc.code);
            break;
        }
        case CodeFamily::Gaussian: g.f = gen_gaussian(o.n, o.m, seed); break;
    }
    return g;
}

// -- gen ------------------------------------------------------------------------

struct GenOpts {
    CodeOpts code;
    std::uint64_t seed = 0;
    std::string out;
};

void cmd_gen(const GenOpts& o, std::ostream& log) {
    const GeneratedCode g = generate(o.code, mix_seed({o.seed, static_cast<std::uint64_t>(Stage::Code)}));
    const HostSignal host = gaussian_host(g.f.length(), mix_seed({o.seed, static_cast<std::uint64_t>(Stage::Host)}));
    const MarkedCopies copies = distribute(g.f, host);
    const fs::path dir(o.out);
    write_matrix_csv(g.f.entries, dir / "code.csv");
    write_vector_csv(host.samples, dir / "host.csv");
    write_matrix_csv(copies.copies, dir / "copies.csv");
    if (g.rho) write_vector_csv(*g.rho, dir / "rho.csv");
    if (g.p) write_vector_csv(*g.p, dir / "p.csv");
    log << "wrote " << g.f.length() << "x" << g.f.users() << " " << to_string(g.f.family) << " code to " << dir.string()
        << '\n';
}

// -- attack ---------------------------------------------------------------------

struct AttackOpts {
    CodeOpts code;
    std::string copies, rho, out, attack = "finite_alphabet", policy = "max_prior", prior = "known";
    std::vector<std::size_t> coalition;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    double tau = 0.05, xi = 0.12, alpha = 1.0, sigma0 = 0.0, c1 = 1.0, c2 = 1.0;
    int qw = 2;
    std::optional<double> forge_sigma0;
};

void cmd_attack(const AttackOpts& o, std::ostream& log) {
    MarkedCopies copies{HostSignal({0.0}), read_matrix_csv(o.copies)};
    const std::size_t n = copies.copies.rows();
    Coalition coalition = [&] {
        if (!o.coalition.empty()) return Coalition(o.coalition);
        require(o.k >= 1, "give --coalition or --K");
        Rng rng = make_rng(o.seed, Stage::Coalition);
        return random_coalition(copies.copies.cols(), o.k, rng);
    }();
    const std::uint64_t attack_seed = mix_seed({o.seed, static_cast<std::uint64_t>(Stage::Attack)});
    const std::uint64_t forgery_seed = mix_seed({o.seed, static_cast<std::uint64_t>(Stage::Forgery)});

    CodeOpts shape = o.code;
    shape.n = n;
    shape.m = 1;  // only the alphabet and scale are needed
    std::optional<AttackResult> res;
    std::vector<double> forgery;
    const std::string& a = o.attack;
    if (a == "finite_alphabet" || a == "etf") {
        const GeneratedCode g = generate(shape, 0);
        require(g.f.length() == n, "copies length does not match the code parameters");
        res = a == "etf" ? etf_attack(copies, coalition, g.f)
                         : finite_alphabet_attack(copies, coalition, g.f.scaled_alphabet(), parse_policy(o.policy),
                                                  o.prior == "estimated" ? PriorSource::EstimatedFromExactRows
                                                                         : PriorSource::Known);
        forgery = *res->host_estimate;
        add_gaussian_noise(forgery, o.sigma0, forgery_seed);
    } else if (a == "tardos") {
        require(!o.rho.empty(), "tardos attack needs --rho");
        const TardosCode tc = make_tardos(Matrix(n, 1), read_vector_csv(o.rho), o.code.k_design, o.code.epsilon);
        res = tardos_attack(copies, coalition, tc);
        TardosForgeryParams params = default_tardos_forgery_params(*res->host_estimate);
        if (o.forge_sigma0) params.sigma0 = *o.forge_sigma0;
        params.c1 = o.c1;
        params.c2 = o.c2;
        log << "forgery params: sigma0=" << format_double(params.sigma0) << " c1=" << format_double(params.c1)
            << " c2=" << format_double(params.c2) << '\n';
        forgery = tardos_forge(copies.copies.col(coalition.pivot()), res->estimated.col(0), res->exact_rows, params,
                               coalition.size(), tc.c, forgery_seed);
    } else if (a == "cwc") {
        res = cwc_attack(copies, coalition, o.tau, attack_seed);
        forgery = *res->forgery;
        add_gaussian_noise(forgery, o.sigma0, forgery_seed);
    } else if (a == "gaussian") {
        res = gaussian_attack(copies, coalition, GaussianAttackParams{o.xi, o.qw, o.alpha, o.sigma0}, forgery_seed);
        forgery = *res->forgery;
    } else if (a == "average") {
        forgery = baseline_average(copies.copies, coalition, o.sigma0, forgery_seed);
    } else if (a == "minority" || a == "majority") {
        forgery = a == "minority" ? baseline_minority(copies.copies, coalition)
                                  : baseline_majority(copies.copies, coalition);
        add_gaussian_noise(forgery, o.sigma0, forgery_seed);
    } else {
        throw ValidationError("unknown attack '" + a + "'");
    }

    const fs::path dir(o.out);
    std::vector<double> members(coalition.indices.begin(), coalition.indices.end());
    write_vector_csv(members, dir / "coalition.csv");
    write_vector_csv(forgery, dir / "forgery.csv");
    if (res) {
        write_matrix_csv(res->estimated, dir / "estimated.csv");
        write_vector_csv(*res->host_estimate, dir / "host_estimate.csv");
        std::vector<double> rows(res->exact_rows.begin(), res->exact_rows.end());
        write_vector_csv(rows.empty() ? std::vector<double>{-1.0} : rows, dir / "exact_rows.csv");
        log << "exact rows: " << res->exact_rows.size() << "/" << n << ", inconsistent rows: " << res->inconsistent_rows
            << '\n';
    }
}

// -- detect ---------------------------------------------------------------------

struct DetectOpts {
    std::string code, host, forgery, detector = "focused", rho, out;
    std::optional<double> threshold;
    double fa = 1e-3;
    std::size_t calibration_trials = 200;
    std::optional<double> noise_sigma;
    std::optional<std::uint64_t> seed;
    int k_design = 5;
    double epsilon = 0.1;
};

void cmd_detect(const DetectOpts& o, std::ostream& out, std::ostream& log) {
    FingerprintMatrix f;
    f.entries = read_matrix_csv(o.code);
    const std::vector<double> y = read_vector_csv(o.forgery);
    const HostSignal host(read_vector_csv(o.host));
    AccusationResult acc;
    if (o.detector == "focused") {
        double threshold = 0.0;
        if (o.threshold) {
            threshold = *o.threshold;
        } else {
            require(o.seed.has_value(), "--seed is required to calibrate the threshold (or pass --threshold)");
            const double sigma = o.noise_sigma.value_or(1.0 / std::sqrt(static_cast<double>(f.length())));
            threshold = calibrate_focused_threshold(f, host, o.fa, o.calibration_trials, NoiseModel::Gaussian, sigma,
                                                    *o.seed);
            log << "calibrated threshold " << format_double(threshold) << '\n';
        }
        acc = focused_detect(y, host, f, threshold);
    } else if (o.detector == "tardos") {
        require(!o.rho.empty(), "tardos detector needs --rho");
        const TardosCode tc = make_tardos(f.entries, read_vector_csv(o.rho), o.k_design, o.epsilon);
        require(y.size() == host.size(), "forgery and host lengths differ");
        std::vector<double> residual(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - host.samples[i];
        if (!is_binary(residual)) log << "forgery residual is not binary; thresholding at 1/2\n";
        acc = tardos_accuse(residual, tc);
    } else {
        throw ValidationError("unknown detector '" + o.detector + "'");
    }

    std::ostringstream csv;
    csv << "user,score,accused\n";
    std::vector<char> flag(acc.scores.size(), 0);
    for (std::size_t u : acc.accused) flag[u] = 1;
    for (std::size_t j = 0; j < acc.scores.size(); ++j)
        csv << j << ',' << format_double(acc.scores[j]) << ',' << int(flag[j]) << '\n';
    if (o.out.empty()) {
        out << csv.str();
    } else {
        const fs::path path(o.out);
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        std::ofstream file(path, std::ios::binary);
        if (!(file << csv.str())) throw IoError("cannot write " + path.string());
    }
    log << "accused " << acc.accused.size() << " of " << acc.scores.size() << " users at threshold "
        << format_double(acc.threshold) << '\n';
}

// -- bounds ---------------------------------------------------------------------

struct BoundsOpts {
    std::string name;
    std::size_t n = 0, m = 0, m0 = 16;
    double delta = 0.1, xi = 0.12;
    int w = 1, k = 0, h = 2;
    std::string t = "pi/1000";
};

std::vector<BoundReport> compute_bounds(const BoundsOpts& o) {
    const double nd = static_cast<double>(o.n);
    std::vector<BoundReport> out;
    auto need_k = [&] { require(o.k > 0, "--K is required for " + o.name); };
    if (o.name == "thm1") {
        out.push_back({"thm1_min_K", static_cast<double>(thm1_min_coalition(o.n, o.delta)), BoundSide::LowerBoundOnK,
                       1.0 - o.delta, {{"N", nd}, {"delta", o.delta}}});
    } else if (o.name == "lemma1") {
        out.push_back({"lemma1_min_K", static_cast<double>(lemma1_min_coalition(o.n, o.delta, o.w)),
                       BoundSide::LowerBoundOnK, 1.0 - o.delta, {{"N", nd}, {"delta", o.delta}, {"w", double(o.w)}}});
        if (o.k > 0)
            out.push_back({"lemma1_row_error", uniform_symmetric_row_error(o.w, o.k), BoundSide::UpperBoundOnError,
                           std::nullopt, {{"w", double(o.w)}, {"K", double(o.k)}}});
    } else if (o.name == "lemma2") {
        out.push_back({"lemma2_min_K", static_cast<double>(lemma2_min_coalition(o.n, o.delta)),
                       BoundSide::LowerBoundOnK, 1.0 - o.delta, {{"N", nd}, {"delta", o.delta}}});
        if (o.k > 0)
            out.push_back({"rtf_row_error_bound", rtf_row_error_bound(o.k), BoundSide::UpperBoundOnError, std::nullopt,
                           {{"K", double(o.k)}}});
    } else if (o.name == "etf") {
        need_k();
        out.push_back({"etf_row_error_bound", etf_row_error_bound(o.m, o.h, o.m0, o.k), BoundSide::UpperBoundOnError,
                       std::nullopt, {{"M", double(o.m)}, {"h", double(o.h)}, {"m0", double(o.m0)}, {"K", double(o.k)}}});
    } else if (o.name == "thm2") {
        need_k();
        const double t = parse_number(o.t);
        const Thm2Bound b = thm2_bound(o.n, o.k, t);
        const std::vector<std::pair<std::string, double>> params{{"N", nd}, {"K", double(o.k)}, {"t", t}};
        out.push_back({"thm2_C", b.c, BoundSide::Estimate, std::nullopt, params});
        out.push_back({"thm2_missed_rows", b.count_bound, BoundSide::UpperBoundOnCount, b.probability, params});
    } else if (o.name == "thm3") {
        need_k();
        const Thm3Bounds b = thm3_bounds(o.n, o.k);
        const std::vector<std::pair<std::string, double>> params{{"N", nd}, {"K", double(o.k)}};
        out.push_back({"thm3_missed_rows", b.fail_count_bound, BoundSide::UpperBoundOnCount, b.fail_prob, params});
        out.push_back({"thm3_expected_error", b.expected_error, BoundSide::UpperBoundOnError, std::nullopt, params});
        out.push_back({"thm3_phat_deviation", b.phat_dev, BoundSide::UpperBoundOnError, b.phat_prob, params});
    } else if (o.name == "tardos_fraction") {
        need_k();
        const double t = parse_number(o.t);
        out.push_back({"tardos_exact_fraction", tardos_exact_fraction_analytic(o.k, t), BoundSide::Estimate,
                       std::nullopt, {{"K", double(o.k)}, {"t", t}}});
    } else if (o.name == "gaussian") {
        out.push_back({"gaussian_error_bound", gaussian_error_bound(o.n, o.xi, o.w), BoundSide::UpperBoundOnError,
                       std::nullopt, {{"N", nd}, {"xi", o.xi}, {"w", double(o.w)}}});
    } else {
        throw ValidationError("unknown bound '" + o.name +
                              "' (thm1, lemma1, lemma2, etf, thm2, thm3, tardos_fraction, gaussian)");
    }
    return out;
}

void print_bounds(const std::vector<BoundReport>& reports, std::ostream& out) {
    out << "name,value,side,confidence,params\n";
    for (const auto& r : reports) {
        out << r.name << ',' << format_double(r.value) << ',' << to_string(r.side) << ','
            << (r.confidence ? format_double(*r.confidence) : std::string()) << ',';
        for (std::size_t i = 0; i < r.params.size(); ++i)
            out << (i ? ";" : "") << r.params[i].first << '=' << format_double(r.params[i].second);
        out << '\n';
    }
}

// -- experiment / reproduce ---------------------------------------------------------

struct RunOpts {
    std::string spec, target, out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::size_t workers = 0;
};

void run_spec(ExperimentSpec spec, const RunOpts& o, std::ostream& log) {
    spec.seed = *o.seed;
    spec.has_seed = true;
    if (o.trials) spec.trials = *o.trials;
    const std::string out_dir = o.out.empty() ? spec.output : o.out;
    require(!out_dir.empty(), "--out is required (the spec sets no output)");
    const std::size_t workers = o.workers ? o.workers : std::max(1u, std::thread::hardware_concurrency());
    log << spec.id << ": " << to_string(spec.kind) << ", " << spec.ks.size() << " coalition sizes x " << spec.trials
        << " trials, seed " << spec.seed << ", " << workers << " workers\n";
    const MetricsSummary summary = run_experiment(spec, workers, [&](const SummaryRow& r) {
        log << "  " << r.experiment_id << " K=" << r.k << " p_fail=" << format_double(r.p_fail)
            << " p_c=" << format_double(r.p_c) << " fp=" << format_double(r.fp)
            << " mean_err=" << format_double(r.mean_err) << " mean_exact=" << format_double(r.mean_exact) << '\n';
    });
    write_outputs(summary, out_dir);
    log << "wrote " << (fs::path(out_dir) / "trials.csv").string() << " and summary.csv\n";
}

void add_run_flags(CLI::App* cmd, RunOpts& o) {
    cmd->add_option("--seed", o.seed, "Base seed (required)")->required();
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--workers", o.workers, "Worker threads (default: available parallelism)");
    cmd->add_option("--trials", o.trials, "Override trials per coalition size");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Collusion attack laboratory for digital fingerprinting codes"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_help_all_flag("--help-all", "Print help for every subcommand");
    app.require_subcommand(1);

    GenOpts gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a code, a host signal and the marked copies");
    add_code_flags(gen_cmd, gen.code);
    gen_cmd->add_option("--seed", gen.seed, "Seed (required)")->required();
    gen_cmd->add_option("--out", gen.out, "Output directory")->required();

    AttackOpts atk;
    auto* atk_cmd = app.add_subcommand("attack", "Run a collusion attack on marked copies");
    add_code_flags(atk_cmd, atk.code);
    atk_cmd->add_option("--copies", atk.copies, "Marked copies CSV (N rows, M columns)")->required();
    atk_cmd->add_option("--attack", atk.attack,
                        "finite_alphabet, etf, tardos, cwc, gaussian, average, minority, majority");
    atk_cmd->add_option("--coalition", atk.coalition, "Comma-separated 0-based user indices, pivot first")
        ->delimiter(',');
    atk_cmd->add_option("--K", atk.k, "Random coalition size (when --coalition is absent)");
    atk_cmd->add_option("--seed", atk.seed, "Seed (required)")->required();
    atk_cmd->add_option("--out", atk.out, "Output directory")->required();
    atk_cmd->add_option("--rho", atk.rho, "Tardos bias CSV");
    atk_cmd->add_option("--policy", atk.policy, "Row estimator: max_prior or max_zeros");
    atk_cmd->add_option("--prior", atk.prior, "Prior: known or estimated");
    atk_cmd->add_option("--tau", atk.tau, "CWC fill margin tau");
    atk_cmd->add_option("--xi", atk.xi, "Gaussian truncation bound xi");
    atk_cmd->add_option("--qw", atk.qw, "Gaussian quantizer half-level count w");
    atk_cmd->add_option("--alpha", atk.alpha, "Gaussian dead-zone factor alpha");
    atk_cmd->add_option("--sigma0", atk.sigma0, "Forgery noise std");
    atk_cmd->add_option("--forge-sigma0", atk.forge_sigma0, "Spectral magnitude noise std (default 0.01|s_hat|/sqrt(N))");
    atk_cmd->add_option("--c1", atk.c1, "Spectral phase noise divisor");
    atk_cmd->add_option("--c2", atk.c2, "Spike amplitude");

    DetectOpts det;
    auto* det_cmd = app.add_subcommand("detect", "Score users against a forgery");
    det_cmd->add_option("--code", det.code, "Fingerprint matrix CSV")->required();
    det_cmd->add_option("--host", det.host, "Host signal CSV")->required();
    det_cmd->add_option("--forgery", det.forgery, "Forgery CSV")->required();
    det_cmd->add_option("--detector", det.detector, "focused or tardos");
    det_cmd->add_option("--threshold", det.threshold, "Focused detector threshold (skips calibration)");
    det_cmd->add_option("--fa", det.fa, "Target false-alarm rate per user for calibration");
    det_cmd->add_option("--calibration-trials", det.calibration_trials, "Calibration trials (>= 100)");
    det_cmd->add_option("--noise-sigma", det.noise_sigma, "Calibration noise std (default 1/sqrt(N))");
    det_cmd->add_option("--seed", det.seed, "Calibration seed");
    det_cmd->add_option("--rho", det.rho, "Tardos bias CSV");
    det_cmd->add_option("--K-design", det.k_design, "Tardos design coalition size");
    det_cmd->add_option("--epsilon", det.epsilon, "Tardos error probability");
    det_cmd->add_option("--out", det.out, "Accusation CSV path (default: stdout)");

    BoundsOpts bnd;
    auto* bnd_cmd = app.add_subcommand("bounds", "Print theoretical bounds as CSV");
    bnd_cmd->add_option("name", bnd.name, "thm1, lemma1, lemma2, etf, thm2, thm3, tardos_fraction, gaussian")
        ->required();
    bnd_cmd->add_option("--N", bnd.n, "Code length N");
    bnd_cmd->add_option("--M", bnd.m, "Number of users M");
    bnd_cmd->add_option("--delta", bnd.delta, "Failure probability delta");
    bnd_cmd->add_option("--w", bnd.w, "Symbol half-width w");
    bnd_cmd->add_option("--K", bnd.k, "Coalition size K");
    bnd_cmd->add_option("--h", bnd.h, "Steiner block size h");
    bnd_cmd->add_option("--m0", bnd.m0, "Hadamard order m0");
    bnd_cmd->add_option("--t", bnd.t, "Angle t (number or pi/<d>)");
    bnd_cmd->add_option("--xi", bnd.xi, "Gaussian truncation bound xi");

    RunOpts exp;
    auto* exp_cmd = app.add_subcommand("experiment", "Run an experiment spec file");
    exp_cmd->add_option("--spec", exp.spec, "Experiment spec file")->required();
    add_run_flags(exp_cmd, exp);

    RunOpts rep;
    auto* rep_cmd = app.add_subcommand("reproduce", "Run a bundled desk-scale experiment");
    std::string targets;
    for (const auto& s : bundled_specs()) targets += (targets.empty() ? "" : ", ") + std::string(s.id);
    rep_cmd->add_option("target", rep.target, "One of: " + targets)->required();
    add_run_flags(rep_cmd, rep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*gen_cmd) {
            cmd_gen(gen, err);
        } else if (*atk_cmd) {
            cmd_attack(atk, err);
        } else if (*det_cmd) {
            cmd_detect(det, out, err);
        } else if (*bnd_cmd) {
            print_bounds(compute_bounds(bnd), out);
        } else if (*exp_cmd) {
            run_spec(load_spec(exp.spec), exp, err);
        } else if (*rep_cmd) {
            const auto text = bundled_spec(rep.target);
            require(text.has_value(), "unknown reproduce target '" + rep.target + "' (one of: " + targets + ")");
            run_spec(parse_spec(*text), rep, err);
        }
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "io error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const EstimationError& e) {
        err << "estimation error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace fpattack
