#include <doctest.h>

#include <random>

#include "fpattack/alphabet.hpp"
#include "fpattack/error.hpp"
#include "oracles.hpp"

using namespace fpattack;

namespace {

Alphabet ternary() { return Alphabet::uniform({-1.0, 0.0, 1.0}); }

std::vector<double> diffs_of(const std::vector<double>& f) {
    std::vector<double> a(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) a[j] = f[0] - f[j];
    return a;
}

}  // namespace

TEST_CASE("alphabet validation") {
    CHECK_THROWS_AS(Alphabet({1.0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(Alphabet({0.0, 0.0}, {0.5, 0.5}), ValidationError);
    CHECK_THROWS_AS(Alphabet({1.0, 0.0}, {0.5, 0.5}), ValidationError);
    CHECK_THROWS_AS(Alphabet({0.0, 1.0}, {0.5}), ValidationError);
    CHECK_THROWS_AS(Alphabet({0.0, 1.0}, {0.6, 0.6}), ValidationError);
    CHECK_THROWS_AS(Alphabet({0.0, 1.0}, {1.5, -0.5}), ValidationError);
    CHECK_NOTHROW(Alphabet({0.0, 1.0}, {0.25, 0.75}));
    const Alphabet u = Alphabet::uniform({0.0, 1.0, 2.0});
    double total = 0.0;
    for (double p : u.prior()) total += p;
    CHECK(std::fabs(total - 1.0) <= 1e-12);
}

TEST_CASE("unique difference sets") {
    CHECK(build_unique_set(ternary()).values() == std::vector<double>{-2.0, 2.0});
    CHECK(build_unique_set(Alphabet::uniform({0.0, 1.0})).values() == std::vector<double>{-1.0, 1.0});
    CHECK(build_unique_set(Alphabet::uniform({0.0, 1.0, 2.0, 4.0})).values() ==
          std::vector<double>{-4.0, -3.0, 3.0, 4.0});

    const auto u = build_unique_set(ternary());
    auto hit = u.lookup(2.0, 1e-12);
    REQUIRE(hit);
    CHECK(hit->first == 2);
    CHECK(hit->second == 0);
    CHECK_FALSE(u.lookup(1.0, 1e-12));
}

TEST_CASE("unique set matches brute force and contains the span") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> pick(-6, 6);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> xi;
        while (xi.size() < 4) {
            const double v = pick(rng);
            if (std::find(xi.begin(), xi.end(), v) == xi.end()) xi.push_back(v);
        }
        std::sort(xi.begin(), xi.end());
        const auto got = build_unique_set(Alphabet::uniform(xi)).values();
        CHECK(got == oracle::brute_force_unique(xi));
        CHECK(got.size() >= 2);
        const double span = xi.back() - xi.front();
        CHECK(std::find(got.begin(), got.end(), span) != got.end());
        CHECK(std::find(got.begin(), got.end(), -span) != got.end());
    }
}

TEST_CASE("pairwise differences") {
    CHECK(pairwise_differences(std::vector<double>{0, -1, -1, 1}) == std::vector<double>{-2, -1, 0, 1, 2});
    CHECK(pairwise_differences(std::vector<double>{0}) == std::vector<double>{0});
    CHECK(pairwise_differences(std::vector<double>{0, -2}) == std::vector<double>{-2, 0, 2});
}

TEST_CASE("consistent candidate enumeration") {
    CHECK(enumerate_consistent(std::vector<double>{0, 0}, ternary()) ==
          std::vector<std::vector<double>>{{-1, -1}, {0, 0}, {1, 1}});
    CHECK(enumerate_consistent(std::vector<double>{0, -1, -2}, Alphabet::uniform({0, 1, 2})) ==
          std::vector<std::vector<double>>{{0, 1, 2}});
    CHECK(enumerate_consistent(std::vector<double>{0, 5}, ternary()).empty());
    CHECK_THROWS_AS(enumerate_consistent(std::vector<double>{1, 0}, ternary()), ValidationError);
}

TEST_CASE("row decoding") {
    SUBCASE("unique row decodes exactly under either policy") {
        for (auto policy : {DecodePolicy::MaxPrior, DecodePolicy::MaxZeros}) {
            const auto r = decode_row(std::vector<double>{0, -1, -1, 1}, ternary(), policy);
            CHECK(r.status == DecodeStatus::Exact);
            CHECK(r.candidate_count == 1);
            CHECK(r.estimate == std::vector<double>{0, 1, 1, -1});
        }
    }
    SUBCASE("all-zero row under a peaked prior") {
        const Alphabet a({-1, 0, 1}, {1.0 / 6, 2.0 / 3, 1.0 / 6});
        const auto r = decode_row(std::vector<double>{0, 0, 0}, a, DecodePolicy::MaxPrior);
        CHECK(r.status == DecodeStatus::MostLikely);
        CHECK(r.estimate == std::vector<double>{0, 0, 0});
    }
    SUBCASE("ties go to the smallest first symbol") {
        const auto r = decode_row(std::vector<double>{0, 1}, ternary(), DecodePolicy::MaxPrior);
        CHECK(r.status == DecodeStatus::MostLikely);
        CHECK(r.candidate_count == 2);
        CHECK(r.estimate == std::vector<double>{0, -1});
    }
    SUBCASE("inconsistent row") {
        const auto r = decode_row(std::vector<double>{0, 5}, ternary(), DecodePolicy::MaxPrior);
        CHECK(r.status == DecodeStatus::Inconsistent);
        CHECK(r.estimate.empty());
    }
    SUBCASE("max zeros needs zero in the alphabet") {
        CHECK_THROWS_AS(decode_row(std::vector<double>{0, 0}, Alphabet::uniform({-1, 1}), DecodePolicy::MaxZeros),
                        ConfigError);
    }
    SUBCASE("policy names") {
        CHECK(parse_policy("max_zeros") == DecodePolicy::MaxZeros);
        CHECK(std::string(to_string(parse_policy("max_prior"))) == "max_prior");
        CHECK_THROWS_AS(parse_policy("mode"), ValidationError);
    }
}

TEST_CASE("prior estimation from exact rows") {
    RowDecodeResult r1{DecodeStatus::Exact, {0, 1, 1, -1}, 1};
    RowDecodeResult skip{DecodeStatus::MostLikely, {1, 1, 1, 1}, 2};
    std::vector<RowDecodeResult> rows{r1, skip};
    const Alphabet est = estimate_prior_from_exact_rows(rows, ternary());
    CHECK(est.prior()[0] == doctest::Approx(0.25));
    CHECK(est.prior()[1] == doctest::Approx(0.25));
    CHECK(est.prior()[2] == doctest::Approx(0.5));

    std::vector<RowDecodeResult> binary{{DecodeStatus::Exact, {0, 0}, 1}, {DecodeStatus::Exact, {1, 1}, 1}};
    const Alphabet b = estimate_prior_from_exact_rows(binary, Alphabet::uniform({0, 1}));
    CHECK(b.prior()[0] == doctest::Approx(0.5));

    std::vector<RowDecodeResult> none{skip};
    CHECK_THROWS_AS(estimate_prior_from_exact_rows(none, ternary()), EstimationError);

    std::mt19937_64 rng(5);
    std::discrete_distribution<int> draw({1.0 / 6, 2.0 / 3, 1.0 / 6});
    std::vector<RowDecodeResult> many;
    for (int i = 0; i < 10000; ++i) many.push_back({DecodeStatus::Exact, {double(draw(rng) - 1)}, 1});
    const Alphabet m = estimate_prior_from_exact_rows(many, ternary());
    CHECK(std::fabs(m.prior()[0] - 1.0 / 6) < 0.02);
    CHECK(std::fabs(m.prior()[1] - 2.0 / 3) < 0.02);
    CHECK(std::fabs(m.prior()[2] - 1.0 / 6) < 0.02);
}

TEST_CASE("property: enumeration equals brute force, truth is always a candidate") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> sym(-5, 5), len(2, 4), kk(1, 5);
    for (int rep = 0; rep < 3000; ++rep) {
        std::vector<double> xi;
        const int l = len(rng);
        while (static_cast<int>(xi.size()) < l) {
            const double v = sym(rng) * 0.5;
            if (std::find(xi.begin(), xi.end(), v) == xi.end()) xi.push_back(v);
        }
        std::sort(xi.begin(), xi.end());
        const Alphabet a = Alphabet::uniform(xi);
        const int k = kk(rng);
        std::uniform_int_distribution<std::size_t> pick(0, xi.size() - 1);
        std::vector<double> f(k);
        for (auto& v : f) v = xi[pick(rng)];
        const auto row = diffs_of(f);

        const auto got = enumerate_consistent(row, a);
        REQUIRE(got == oracle::brute_force_consistent(row, xi));
        CHECK(std::find(got.begin(), got.end(), f) != got.end());
        // candidates are shifts of each other
        for (const auto& b : got)
            for (int j = 0; j < k; ++j) CHECK(b[j] - got.front()[j] == doctest::Approx(b[0] - got.front()[0]));

        const auto r = decode_row(row, a, DecodePolicy::MaxPrior);
        CHECK((r.status == DecodeStatus::Exact) == (r.candidate_count == 1));
        if (r.status == DecodeStatus::Exact) CHECK(r.estimate == f);
        for (double v : r.estimate) CHECK(a.find(v).has_value());

        // a unique difference forces a single candidate
        const auto u = build_unique_set(a);
        bool hits_u = false;
        for (double d : pairwise_differences(row)) hits_u = hits_u || u.lookup(d, 1e-12).has_value();
        if (hits_u) CHECK(got.size() == 1);
    }
}

TEST_CASE("scaled alphabets decode with the relative tolerance") {
    const double z = std::sqrt(8.0 / 3.0);
    const Alphabet a = ternary().scaled(1.0 / z);
    const std::vector<double> f{1.0 / z, 0.0, -1.0 / z};
    const auto r = decode_row(diffs_of(f), a, DecodePolicy::MaxPrior);
    CHECK(r.status == DecodeStatus::Exact);
    CHECK(r.estimate == f);
}
