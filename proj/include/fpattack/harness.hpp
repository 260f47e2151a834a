#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpattack/matrix.hpp"

namespace fpattack {

enum class ExperimentKind { Failure, Detection, FpVsFnpr, TardosExactFraction, CwcError, GaussianError };

const char* to_string(ExperimentKind kind);
ExperimentKind parse_kind(std::string_view name);

enum class FailureCriterion { AnyCoordinate, FractionWrong };

struct CodeSpec {
    std::string family = "rtf";
    std::size_t n = 0;  // code length N (ignored for ETF/Tardos, which derive it)
    std::size_t m = 0;  // users M (ignored for ETF)
    double p = 1.0 / 6.0;            // rtf
    int w = 1;                       // symmetric
    std::vector<double> probs;       // symmetric (p_0..p_w)
    int steiner_r = 2, steiner_h = 2, steiner_n = 16;  // etf
    std::size_t m0 = 16;                               // etf
    std::string steiner_file;                          // etf, optional block file
    int k_design = 5;                                  // tardos
    double epsilon = 0.1;                              // tardos
    double t = 0.0031415926535897933;                  // cwc angle
};

struct AttackSpec {
    std::vector<std::string> names{"finite_alphabet"};
    std::string policy = "max_prior";
    std::string prior = "known";  // known | estimated
    double tau = 0.05;            // cwc
    double xi = 0.12;             // gaussian
    int w = 2;
    double alpha = 1.0;
    double sigma0 = 0.0;                 // gaussian forgery noise / baseline noise
    std::optional<double> forge_sigma0;  // spectral forge magnitude noise; default derived from s_hat
    double c1 = 1.0, c2 = 1.0;
};

struct DetectorSpec {
    std::string name = "none";  // none | focused | tardos
    double fa = 1e-3;
    std::size_t calibration_trials = 200;
    std::optional<double> noise_sigma;  // focused calibration noise; default 1/sqrt(N)
};

struct ExperimentSpec {
    std::string id = "experiment";
    ExperimentKind kind = ExperimentKind::Failure;
    CodeSpec code;
    AttackSpec attack;
    DetectorSpec detector;
    std::vector<int> ks;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    bool has_seed = false;
    FailureCriterion criterion = FailureCriterion::AnyCoordinate;
    double theta = 0.01;
    std::vector<double> noise_levels{0.0};  // fp_vs_fnpr
    double fnpr_bin_db = 1.0;
    std::size_t fnpr_min_trials = 30;
    std::string output;

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

/// Decimal number, or "pi" / "pi/<number>".
double parse_number(std::string_view s);

/// Parses `key = value` lines; '#' starts a comment. Unknown keys and
/// malformed values are rejected with the line number.
ExperimentSpec parse_spec(std::string_view text);
ExperimentSpec load_spec(const std::filesystem::path& path);

struct TrialRecord {
    std::string experiment_id;
    int k = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    bool failure = false;
    double err_norm = 0.0;        // ||s - s_hat|| = ||f_pivot - fhat_pivot||
    double exact_fraction = 0.0;  // |I| / N
    bool caught_any = false;
    std::size_t innocents_accused = 0;
    double fnpr_db = 0.0;         // +inf when y == s; nan when no forgery
    double wrong_fraction = 0.0;  // fraction of coordinates of s_hat that are wrong
    double worst_err_rate = 0.0;  // max_j ||f_j - fhat_j||^2 / N
    double phat_dev = 0.0;        // max_j |p_j - phat_j| (CWC), nan elsewhere

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct SummaryRow {
    std::string experiment_id;
    int k = 0;
    std::size_t trials = 0;
    double p_fail = 0.0, p_fail_lo = 0.0, p_fail_hi = 1.0;
    double p_c = 0.0;
    double fp = 0.0;
    double mean_err = 0.0, max_err = 0.0;
    double mean_exact = 0.0;
    double analytic_ref = 0.0;
};

struct FnprBin {
    std::string experiment_id;
    int k = 0;
    double bin_db = 0.0;  // lower edge; +inf for the noiseless bin
    std::size_t trials = 0;
    std::size_t false_positives = 0;
    double fp = 0.0, fp_lo = 0.0, fp_hi = 1.0;
    bool populated = false;
};

struct MetricsSummary {
    std::vector<TrialRecord> trials;  // ordered by (attack, K, trial)
    std::vector<SummaryRow> rows;
    std::vector<FnprBin> fnpr_bins;  // fp_vs_fnpr only
};

/// Per-trial seed: mix of (base seed, K, trial index).
std::uint64_t trial_seed(std::uint64_t base, int k, std::size_t trial);

/// Progress callback, invoked once per (attack, K) after aggregation.
using ProgressFn = std::function<void(const SummaryRow&)>;

/// Runs the experiment described by `spec` on `workers` threads (0 = all
/// available). Output is independent of the worker count.
MetricsSummary run_experiment(const ExperimentSpec& spec, std::size_t workers = 0, const ProgressFn& progress = {});

MetricsSummary run_failure_curve(const ExperimentSpec& spec, std::size_t workers = 0);
MetricsSummary run_detection_curve(const ExperimentSpec& spec, std::size_t workers = 0);
MetricsSummary run_fp_vs_fnpr(const ExperimentSpec& spec, std::size_t workers = 0);
MetricsSummary run_tardos_exact_fraction(const ExperimentSpec& spec, std::size_t workers = 0);
MetricsSummary run_cwc_error(const ExperimentSpec& spec, std::size_t workers = 0);
MetricsSummary run_gaussian_error(const ExperimentSpec& spec, std::size_t workers = 0);

/// 20 log10(fingerprint_norm / residual_norm); +inf for a zero residual.
double fnpr_db(double fingerprint_norm, double residual_norm);

/// Recomputes the failure flag from a record's stored error fields.
bool recompute_failure(const TrialRecord& r, FailureCriterion criterion, double theta);

// -- CSV ---------------------------------------------------------------------

/// Shortest round-trip decimal; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);
double parse_double(std::string_view s);

void write_trials_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path);
std::vector<TrialRecord> read_trials_csv(const std::filesystem::path& path);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);
void write_fnpr_csv(const std::vector<FnprBin>& bins, const std::filesystem::path& path);

/// Writes trials.csv, summary.csv and (fp_vs_fnpr) fnpr_summary.csv under `dir`.
void write_outputs(const MetricsSummary& summary, const std::filesystem::path& dir);

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);
Matrix read_matrix_csv(const std::filesystem::path& path);
void write_vector_csv(const std::vector<double>& v, const std::filesystem::path& path);
std::vector<double> read_vector_csv(const std::filesystem::path& path);

}  // namespace fpattack
