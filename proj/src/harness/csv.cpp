#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fpattack/error.hpp"
#include "fpattack/harness.hpp"

namespace fpattack {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ValidationError("malformed number '" + std::string(s) + "'");
    return v;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) return out;
        start = comma + 1;
    }
}

template <typename T>
T parse_uint(std::string_view s) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ValidationError("malformed integer '" + std::string(s) + "'");
    return v;
}

constexpr const char* kTrialHeader =
    "experiment_id,K,trial,seed,failure,err_norm,exact_fraction,caught_any,innocents_accused,fnpr_db,"
    "wrong_fraction,worst_err_rate,phat_dev";

}  // namespace

void write_trials_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << kTrialHeader << '\n';
    for (const auto& r : records) {
        out << r.experiment_id << ',' << r.k << ',' << r.trial << ',' << r.seed << ',' << (r.failure ? 1 : 0) << ','
            << format_double(r.err_norm) << ',' << format_double(r.exact_fraction) << ',' << (r.caught_any ? 1 : 0)
            << ',' << r.innocents_accused << ',' << format_double(r.fnpr_db) << ',' << format_double(r.wrong_fraction)
            << ',' << format_double(r.worst_err_rate) << ',' << format_double(r.phat_dev) << '\n';
    }
    finish(out, path);
}

std::vector<TrialRecord> read_trials_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line != kTrialHeader) throw ValidationError(path.string() + ": unexpected header");
    std::vector<TrialRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 13)
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected 13 fields, got " +
                                  std::to_string(f.size()));
        try {
            TrialRecord r;
            r.experiment_id = std::string(f[0]);
            r.k = static_cast<int>(parse_uint<unsigned>(f[1]));
            r.trial = parse_uint<std::size_t>(f[2]);
            r.seed = parse_uint<std::uint64_t>(f[3]);
            r.failure = parse_uint<unsigned>(f[4]) != 0;
            r.err_norm = parse_double(f[5]);
            r.exact_fraction = parse_double(f[6]);
            r.caught_any = parse_uint<unsigned>(f[7]) != 0;
            r.innocents_accused = parse_uint<std::size_t>(f[8]);
            r.fnpr_db = parse_double(f[9]);
            r.wrong_fraction = parse_double(f[10]);
            r.worst_err_rate = parse_double(f[11]);
            r.phat_dev = parse_double(f[12]);
            out.push_back(std::move(r));
        } catch (const ValidationError& e) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "experiment_id,K,trials,p_fail,p_fail_lo,p_fail_hi,p_c,fp,mean_err,max_err,mean_exact,analytic_ref\n";
    for (const auto& r : rows) {
        out << r.experiment_id << ',' << r.k << ',' << r.trials << ',' << format_double(r.p_fail) << ','
            << format_double(r.p_fail_lo) << ',' << format_double(r.p_fail_hi) << ',' << format_double(r.p_c) << ','
            << format_double(r.fp) << ',' << format_double(r.mean_err) << ',' << format_double(r.max_err) << ','
            << format_double(r.mean_exact) << ',' << format_double(r.analytic_ref) << '\n';
    }
    finish(out, path);
}

void write_fnpr_csv(const std::vector<FnprBin>& bins, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "experiment_id,K,bin_db,trials,false_positives,fp,fp_lo,fp_hi,populated\n";
    for (const auto& b : bins) {
        out << b.experiment_id << ',' << b.k << ',' << format_double(b.bin_db) << ',' << b.trials << ','
            << b.false_positives << ',' << format_double(b.fp) << ',' << format_double(b.fp_lo) << ','
            << format_double(b.fp_hi) << ',' << (b.populated ? 1 : 0) << '\n';
    }
    finish(out, path);
}

void write_outputs(const MetricsSummary& summary, const std::filesystem::path& dir) {
    write_trials_csv(summary.trials, dir / "trials.csv");
    write_summary_csv(summary.rows, dir / "summary.csv");
    if (!summary.fnpr_bins.empty()) write_fnpr_csv(summary.fnpr_bins, dir / "fnpr_summary.csv");
}

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    finish(out, path);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        try {
            for (auto field : split_fields(line)) row.push_back(parse_double(field));
        } catch (const ValidationError& e) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError(path.string() + ": empty matrix");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

void write_vector_csv(const std::vector<double>& v, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (double x : v) out << format_double(x) << '\n';
    finish(out, path);
}

std::vector<double> read_vector_csv(const std::filesystem::path& path) {
    const Matrix m = read_matrix_csv(path);
    if (m.cols() != 1 && m.rows() != 1) throw ValidationError(path.string() + ": expected a single row or column");
    return {m.data().begin(), m.data().end()};
}

}  // namespace fpattack
