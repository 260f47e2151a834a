#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "fpattack/analysis.hpp"
#include "fpattack/attacks.hpp"
#include "fpattack/codes.hpp"
#include "fpattack/detectors.hpp"
#include "fpattack/error.hpp"
#include "fpattack/harness.hpp"
#include "fpattack/kernels.hpp"
#include "fpattack/rng.hpp"

namespace fpattack {

std::uint64_t trial_seed(std::uint64_t base, int k, std::size_t trial) {
    return mix_seed({base, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(trial)});
}

double fnpr_db(double fingerprint_norm, double residual_norm) {
    return residual_norm == 0.0 ? std::numeric_limits<double>::infinity() : 20.0 * std::log10(fingerprint_norm / residual_norm);
}

bool recompute_failure(const TrialRecord& r, FailureCriterion criterion, double theta) {
    if (criterion == FailureCriterion::AnyCoordinate) return !(r.err_norm == 0.0);
    return !(r.wrong_fraction < theta);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t stage_seed(std::uint64_t seed, Stage stage, std::uint64_t extra = 0) {
    return mix_seed({seed, static_cast<std::uint64_t>(stage), extra});
}

struct TrialCode {
    std::shared_ptr<const FingerprintMatrix> plain;
    std::shared_ptr<const TardosCode> tardos;
    std::shared_ptr<const CwcCode> cwc;

    const FingerprintMatrix& matrix() const {
        if (tardos) return tardos->code;
        if (cwc) return cwc->code;
        return *plain;
    }
};

class Plan {
public:
    explicit Plan(const ExperimentSpec& spec) : spec_(spec), family_(parse_family(spec.code.family)) {
        spec.validate();
        if (family_ == CodeFamily::ETF) {
            const auto& c = spec.code;
            SteinerSystem st = c.steiner_file.empty() ? steiner_system(c.steiner_r, c.steiner_h, c.steiner_n)
                                                      : load_steiner(c.steiner_file, c.steiner_r);
            require(st.n == c.steiner_n, "steiner block file has " + std::to_string(st.n) + " points, code.n is " +
                                             std::to_string(c.steiner_n));
            etf_ = std::make_shared<const FingerprintMatrix>(gen_etf(st, c.m0));
        }
        if (spec.detector.name == "focused") calibrate();
    }

    const ExperimentSpec& spec() const { return spec_; }
    CodeFamily family() const { return family_; }
    double threshold() const { return threshold_; }

    TrialCode make_code(std::uint64_t seed) const {
        const auto& c = spec_.code;
        TrialCode out;
        switch (family_) {
            case CodeFamily::Symmetric:
                out.plain = std::make_shared<const FingerprintMatrix>(gen_symmetric(c.n, c.m, c.w, c.probs, seed));
                break;
            case CodeFamily::RTF:
                out.plain = std::make_shared<const FingerprintMatrix>(gen_rtf(c.n, c.m, c.p, seed));
                break;
            case CodeFamily::ETF:
                out.plain = etf_;
                break;
            case CodeFamily::Tardos:
                out.tardos = std::make_shared<const TardosCode>(gen_tardos(c.k_design, c.epsilon, c.m, seed));
                break;
            case CodeFamily::CWC:
                out.cwc = std::make_shared<const CwcCode>(gen_cwc(c.n, c.m, c.t, seed));
                break;
            case CodeFamily::Gaussian:
                out.plain = std::make_shared<const FingerprintMatrix>(gen_gaussian(c.n, c.m, seed));
                break;
        }
        return out;
    }

    // sparse column-wise codes can draw an all-zero fingerprint
    ZeroNormPolicy zero_norm() const {
        return family_ == CodeFamily::CWC ? ZeroNormPolicy::ScoreZero : ZeroNormPolicy::Reject;
    }

private:
    void calibrate() {
        const TrialCode code = make_code(stage_seed(spec_.seed, Stage::Calibration, 1));
        const auto& f = code.matrix();
        const HostSignal host = gaussian_host(f.length(), stage_seed(spec_.seed, Stage::Calibration, 2));
        const double sigma = spec_.detector.noise_sigma.value_or(1.0 / std::sqrt(static_cast<double>(f.length())));
        threshold_ = calibrate_focused_threshold(f, host, spec_.detector.fa, spec_.detector.calibration_trials,
                                                 NoiseModel::Gaussian, sigma,
                                                 stage_seed(spec_.seed, Stage::Calibration, 3), zero_norm());
    }

    ExperimentSpec spec_;
    CodeFamily family_;
    std::shared_ptr<const FingerprintMatrix> etf_;
    double threshold_ = 0.0;
};

struct AttackOutput {
    std::optional<AttackResult> result;
    std::vector<double> forgery;
    bool estimation_failed = false;
};

AttackOutput run_attack(const Plan& plan, const std::string& name, std::size_t attack_index, const TrialCode& code,
                        const MarkedCopies& copies, const Coalition& coalition, std::uint64_t seed) {
    const auto& a = plan.spec().attack;
    const std::uint64_t attack_seed = stage_seed(seed, Stage::Attack, attack_index);
    const std::uint64_t forgery_seed = stage_seed(seed, Stage::Forgery, attack_index);
    AttackOutput out;
    auto with_noise = [&](std::vector<double> y) {
        add_gaussian_noise(y, a.sigma0, forgery_seed);
        return y;
    };
    try {
        if (name == "finite_alphabet") {
            out.result = finite_alphabet_attack(copies, coalition, code.matrix().scaled_alphabet(),
                                                parse_policy(a.policy),
                                                a.prior == "estimated" ? PriorSource::EstimatedFromExactRows
                                                                       : PriorSource::Known);
            out.forgery = with_noise(*out.result->host_estimate);
        } else if (name == "etf") {
            out.result = etf_attack(copies, coalition, code.matrix());
            out.forgery = with_noise(*out.result->host_estimate);
        } else if (name == "tardos") {
            const TardosCode& tc = *code.tardos;
            out.result = tardos_attack(copies, coalition, tc);
            TardosForgeryParams params = default_tardos_forgery_params(*out.result->host_estimate);
            if (a.forge_sigma0) params.sigma0 = *a.forge_sigma0;
            params.c1 = a.c1;
            params.c2 = a.c2;
            out.forgery = tardos_forge(copies.copies.col(coalition.pivot()), out.result->estimated.col(0),
                                       out.result->exact_rows, params, coalition.size(), tc.c, forgery_seed);
        } else if (name == "cwc") {
            out.result = cwc_attack(copies, coalition, a.tau, attack_seed);
            out.forgery = with_noise(*out.result->forgery);
        } else if (name == "gaussian") {
            GaussianAttackParams params{a.xi, a.w, a.alpha, a.sigma0};
            out.result = gaussian_attack(copies, coalition, params, forgery_seed);
            out.forgery = *out.result->forgery;
        } else if (name == "average") {
            out.forgery = baseline_average(copies.copies, coalition, a.sigma0, forgery_seed);
        } else if (name == "minority") {
            out.forgery = with_noise(baseline_minority(copies.copies, coalition));
        } else if (name == "majority") {
            out.forgery = with_noise(baseline_majority(copies.copies, coalition));
        } else {
            throw ValidationError("unknown attack '" + name + "'");
        }
    } catch (const EstimationError&) {
        out.result.reset();
        out.estimation_failed = true;
        out.forgery.clear();
    }
    return out;
}

// ||f_j - fhat_j|| with differences below `tol` treated as zero.
struct ColumnError {
    double norm_sq = 0.0;
    std::size_t wrong = 0;
};

ColumnError column_error(std::span<const double> f, std::span<const double> fhat, double tol) {
    ColumnError e;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double d = f[i] - fhat[i];
        if (std::abs(d) <= tol) continue;
        e.norm_sq += d * d;
        ++e.wrong;
    }
    return e;
}

std::vector<TrialRecord> run_trial(const Plan& plan, int k, std::size_t trial) {
    const auto& spec = plan.spec();
    const std::uint64_t seed = trial_seed(spec.seed, k, trial);
    const TrialCode code = plan.make_code(stage_seed(seed, Stage::Code));
    const FingerprintMatrix& f = code.matrix();
    const std::size_t n = f.length();
    const MarkedCopies copies = distribute(f, gaussian_host(n, stage_seed(seed, Stage::Host)));
    Rng coalition_rng = make_rng(seed, Stage::Coalition);
    const Coalition coalition = random_coalition(f.users(), static_cast<std::size_t>(k), coalition_rng);

    double max_abs = 0.0;
    for (std::size_t idx : coalition.indices)
        for (double v : f.entries.col(idx)) max_abs = std::max(max_abs, std::abs(v));
    const double tol = 1e-9 * std::max(max_abs, 1e-300);
    const double pivot_norm = std::sqrt(kernels::sum_sq(f.entries.col(coalition.pivot())));

    std::vector<char> is_colluder(f.users(), 0);
    for (std::size_t idx : coalition.indices) is_colluder[idx] = 1;

    std::vector<TrialRecord> records;
    for (std::size_t ai = 0; ai < spec.attack.names.size(); ++ai) {
        const auto& name = spec.attack.names[ai];
        AttackOutput out = run_attack(plan, name, ai, code, copies, coalition, seed);

        TrialRecord r;
        r.experiment_id = spec.id + "/" + name;
        r.k = k;
        r.trial = trial;
        r.seed = seed;
        r.err_norm = kNaN;
        r.exact_fraction = kNaN;
        r.fnpr_db = kNaN;
        r.wrong_fraction = kNaN;
        r.worst_err_rate = kNaN;
        r.phat_dev = kNaN;

        if (out.estimation_failed) {
            r.err_norm = kInf;
            r.wrong_fraction = 1.0;
            r.exact_fraction = 0.0;
        } else if (out.result) {
            const AttackResult& res = *out.result;
            const auto pivot = column_error(f.entries.col(coalition.pivot()), res.estimated.col(0), tol);
            r.err_norm = std::sqrt(pivot.norm_sq);
            r.wrong_fraction = static_cast<double>(pivot.wrong) / static_cast<double>(n);
            r.exact_fraction = res.exact_fraction();
            double worst = 0.0;
            for (std::size_t j = 0; j < coalition.size(); ++j)
                worst = std::max(worst,
                                 column_error(f.entries.col(coalition.indices[j]), res.estimated.col(j), tol).norm_sq);
            r.worst_err_rate = worst / static_cast<double>(n);
            if (code.cwc && res.p_hat) {
                double dev = 0.0;
                for (std::size_t j = 0; j < coalition.size(); ++j)
                    dev = std::max(dev, std::abs(code.cwc->p[coalition.indices[j]] - (*res.p_hat)[j]));
                r.phat_dev = dev;
            }
        }
        if (!std::isnan(r.err_norm)) r.failure = recompute_failure(r, spec.criterion, spec.theta);

        if (spec.detector.name != "none") {
            std::vector<double> y = out.forgery;
            if (y.empty()) {
                // No forgery: colluders hand over nothing usable; treat as an untraceable pure host.
                y = copies.host.samples;
            }
            if (spec.kind == ExperimentKind::FpVsFnpr) {
                const double sigma = spec.noise_levels[trial / spec.trials];
                add_gaussian_noise(y, sigma, stage_seed(seed, Stage::Detection, ai));
            }
            std::vector<double> residual(n);
            kernels::sub(y, copies.host.samples, residual);
            const double rnorm = std::sqrt(kernels::sum_sq(residual));
            r.fnpr_db = fnpr_db(pivot_norm, rnorm);

            AccusationResult acc = spec.detector.name == "tardos"
                                       ? tardos_accuse(residual, *code.tardos)
                                       : focused_detect(y, copies.host, f, plan.threshold(), plan.zero_norm());
            for (std::size_t u : acc.accused) {
                if (is_colluder[u])
                    r.caught_any = true;
                else
                    ++r.innocents_accused;
            }
        }
        records.push_back(std::move(r));
    }
    return records;
}

double analytic_reference(const Plan& plan, int k) {
    const auto& spec = plan.spec();
    switch (spec.kind) {
        case ExperimentKind::Failure: {
            // Union bound over rows of the per-row error probability.
            const auto& c = spec.code;
            double row = kNaN, rows = static_cast<double>(c.n);
            if (plan.family() == CodeFamily::RTF) row = rtf_row_error_bound(k);
            if (plan.family() == CodeFamily::Symmetric) {
                bool uniform = true;
                for (double p : c.probs) uniform = uniform && std::abs(p - 1.0 / (2.0 * c.w + 1.0)) <= 1e-12;
                if (uniform) row = uniform_symmetric_row_error(c.w, k);
            }
            if (plan.family() == CodeFamily::ETF && k >= 2) {
                const auto st = static_cast<std::size_t>(c.steiner_n);
                const std::size_t m = st * c.m0;
                if (m > static_cast<std::size_t>(c.steiner_h) * c.m0) row = etf_row_error_bound(m, c.steiner_h, c.m0, k);
                rows = static_cast<double>(st * (st - 1)) /
                       static_cast<double>(c.steiner_h * (c.steiner_h - 1));  // r = 2 block count
            }
            return std::isnan(row) ? kNaN : std::min(1.0, rows * row);
        }
        case ExperimentKind::TardosExactFraction: {
            const double t = std::asin(std::sqrt(1.0 / (300.0 * spec.code.k_design)));
            return tardos_exact_fraction_analytic(k, t);
        }
        case ExperimentKind::CwcError:
            return k >= 2 ? thm3_bounds(spec.code.n, k).expected_error / static_cast<double>(spec.code.n) : kNaN;
        case ExperimentKind::GaussianError:
            return gaussian_error_bound(spec.code.n, spec.attack.xi, spec.attack.w);
        default:
            return kNaN;
    }
}

SummaryRow summarize(const Plan& plan, const std::string& id, int k, std::span<const TrialRecord> recs) {
    SummaryRow row;
    row.experiment_id = id;
    row.k = k;
    row.trials = recs.size();
    std::size_t fails = 0, caught = 0, fps = 0;
    double err_sum = 0.0, err_max = kNaN, exact_sum = 0.0;
    std::size_t err_n = 0, exact_n = 0;
    const bool worst = plan.spec().kind == ExperimentKind::CwcError;
    for (const auto& r : recs) {
        fails += r.failure ? 1 : 0;
        caught += r.caught_any ? 1 : 0;
        fps += r.innocents_accused > 0 ? 1 : 0;
        const double e = worst ? r.worst_err_rate : r.err_norm;
        if (!std::isnan(e)) {
            err_sum += e;
            err_max = std::isnan(err_max) ? e : std::max(err_max, e);
            ++err_n;
        }
        if (!std::isnan(r.exact_fraction)) {
            exact_sum += r.exact_fraction;
            ++exact_n;
        }
    }
    const double n = static_cast<double>(recs.size());
    row.p_fail = static_cast<double>(fails) / n;
    const Interval ci = wilson_interval(fails, recs.size());
    row.p_fail_lo = ci.lo;
    row.p_fail_hi = ci.hi;
    row.p_c = static_cast<double>(caught) / n;
    row.fp = static_cast<double>(fps) / n;
    row.mean_err = err_n ? err_sum / static_cast<double>(err_n) : kNaN;
    row.max_err = err_max;
    row.mean_exact = exact_n ? exact_sum / static_cast<double>(exact_n) : kNaN;
    row.analytic_ref = analytic_reference(plan, k);
    return row;
}

std::vector<FnprBin> bin_fnpr(const ExperimentSpec& spec, std::span<const TrialRecord> recs) {
    // (id, K, bin) -> (trials, false positives); map keeps a deterministic order.
    std::map<std::tuple<std::string, int, double>, std::pair<std::size_t, std::size_t>> acc;
    for (const auto& r : recs) {
        if (std::isnan(r.fnpr_db)) continue;
        const double bin = std::isinf(r.fnpr_db) ? r.fnpr_db : std::floor(r.fnpr_db / spec.fnpr_bin_db) * spec.fnpr_bin_db;
        auto& slot = acc[{r.experiment_id, r.k, bin}];
        ++slot.first;
        slot.second += r.innocents_accused > 0 ? 1 : 0;
    }
    std::vector<FnprBin> out;
    for (const auto& [key, counts] : acc) {
        FnprBin b;
        b.experiment_id = std::get<0>(key);
        b.k = std::get<1>(key);
        b.bin_db = std::get<2>(key);
        b.trials = counts.first;
        b.false_positives = counts.second;
        b.fp = static_cast<double>(b.false_positives) / static_cast<double>(b.trials);
        const Interval ci = wilson_interval(b.false_positives, b.trials);
        b.fp_lo = ci.lo;
        b.fp_hi = ci.hi;
        b.populated = b.trials >= spec.fnpr_min_trials;
        out.push_back(std::move(b));
    }
    return out;
}

}  // namespace

MetricsSummary run_experiment(const ExperimentSpec& spec, std::size_t workers, const ProgressFn& progress) {
    const Plan plan(spec);
    const std::size_t per_k = spec.kind == ExperimentKind::FpVsFnpr ? spec.trials * spec.noise_levels.size() : spec.trials;

    struct Task {
        int k;
        std::size_t trial;
    };
    std::vector<Task> tasks;
    for (int k : spec.ks)
        for (std::size_t t = 0; t < per_k; ++t) tasks.push_back({k, t});
    std::vector<std::vector<TrialRecord>> results(tasks.size());

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                results[i] = run_trial(plan, tasks[i].k, tasks[i].trial);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(tasks.size());
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    MetricsSummary summary;
    const std::size_t attacks = spec.attack.names.size();
    for (std::size_t a = 0; a < attacks; ++a) {
        std::size_t offset = 0;
        for (int k : spec.ks) {
            const std::size_t begin = summary.trials.size();
            for (std::size_t t = 0; t < per_k; ++t) summary.trials.push_back(results[offset + t][a]);
            offset += per_k;
            const std::span<const TrialRecord> recs(summary.trials.data() + begin, per_k);
            summary.rows.push_back(summarize(plan, spec.id + "/" + spec.attack.names[a], k, recs));
            if (progress) progress(summary.rows.back());
        }
    }
    if (spec.kind == ExperimentKind::FpVsFnpr) summary.fnpr_bins = bin_fnpr(spec, summary.trials);
    return summary;
}

namespace {

MetricsSummary run_kind(const ExperimentSpec& spec, ExperimentKind kind, std::size_t workers) {
    require(spec.kind == kind, std::string("spec is not a ") + to_string(kind) + " experiment");
    return run_experiment(spec, workers);
}

}  // namespace

MetricsSummary run_failure_curve(const ExperimentSpec& spec, std::size_t workers) {
    return run_kind(spec, ExperimentKind::Failure, workers);
}
MetricsSummary run_detection_curve(const ExperimentSpec& spec, std::size_t workers) {
    return run_kind(spec, ExperimentKind::Detection, workers);
}
MetricsSummary run_fp_vs_fnpr(const ExperimentSpec& spec, std::size_t workers) {
    return run_kind(spec, ExperimentKind::FpVsFnpr, workers);
}
MetricsSummary run_tardos_exact_fraction(const ExperimentSpec& spec, std::size_t workers) {
    return run_kind(spec, ExperimentKind::TardosExactFraction, workers);
}
MetricsSummary run_cwc_error(const ExperimentSpec& spec, std::size_t workers) {
    return run_kind(spec, ExperimentKind::CwcError, workers);
}
MetricsSummary run_gaussian_error(const ExperimentSpec& spec, std::size_t workers) {
    return run_kind(spec, ExperimentKind::GaussianError, workers);
}

}  // namespace fpattack
