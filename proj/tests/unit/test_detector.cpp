#include "helpers.hpp"
#include "oi/detector.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace oi;
using testing_support::kAllNorms;
using testing_support::oracle_norm;
using testing_support::random_matrix;
using testing_support::rows_of;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an oi::Error");
    return ErrorCode::InvalidValue;
}

}  // namespace

TEST_CASE("fit examples") {
    SUBCASE("two points in R^1, k = 2") {
        const IdSummary s = fit(FeatureMatrix::from_rows({{0}, {2}}), 2, NormKind::L2);
        CHECK(s.shell_freq() == std::vector<double>{0.5, 0.5});
        CHECK(s.r_b_id() == 2.0);
        CHECK(s.shell_max_norm() == std::vector<double>{0.0, 2.0});
        CHECK(s.mean() == std::vector<double>{1.0});
        CHECK(s.m() == 2);
    }
    SUBCASE("single repeated point") {
        for (std::size_t k : {1u, 5u, 100u}) {
            const IdSummary s = fit(FeatureMatrix::from_rows({{1, 1}, {1, 1}, {1, 1}}), k);
            CHECK(s.mean() == std::vector<double>{1.0, 1.0});
            CHECK(s.r_b_id() == std::sqrt(2.0));
            CHECK(s.shell_freq().back() == 1.0);
            CHECK(s.shell_max_norm().back() == std::sqrt(2.0));
        }
    }
    SUBCASE("standard basis, k = 1") {
        const IdSummary s = fit(FeatureMatrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), 1);
        CHECK(s.shell_freq() == std::vector<double>{1.0});
        CHECK(s.r_b_id() == 1.0);
    }
}

TEST_CASE("fit errors") {
    CHECK(code_of([] { fit(FeatureMatrix::from_rows({{0, 0}, {0, 0}})); }) == ErrorCode::AllZeroNorms);
    CHECK(code_of([] { fit(FeatureMatrix(2)); }) == ErrorCode::EmptyInput);
    CHECK(code_of([] { fit(FeatureMatrix::from_rows({{1}}), 0); }) == ErrorCode::RangeError);
    CHECK(code_of([] { fit(FeatureMatrix::from_rows({{1, 2}}), 3, NormKind::L2, FeatureVector{1.0}); }) ==
          ErrorCode::DimensionMismatch);
    // Centering on the only sample leaves a zero-norm set.
    CHECK(code_of([] { fit(FeatureMatrix::from_rows({{1, 2}}), 3, NormKind::L2, FeatureVector{1.0, 2.0}); }) ==
          ErrorCode::AllZeroNorms);
}

TEST_CASE("summary invariants hold on random fits") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const FeatureMatrix x = random_matrix(50 + seed, 1 + seed % 6, seed, 1.0 + seed, 0.3 * seed);
        for (NormKind kind : kAllNorms) {
            const IdSummary s = fit(x, 1 + seed * 7, kind);
            double total = 0.0;
            for (std::size_t j = 0; j < s.k(); ++j) {
                total += s.shell_freq()[j];
                CHECK(s.shell_max_norm()[j] <= s.partition().radius(j + 1));
                if (s.shell_freq()[j] == 0.0) CHECK(s.shell_max_norm()[j] == 0.0);
            }
            CHECK(std::fabs(total - 1.0) <= 1e-12);
            CHECK(norm(s.mean(), kind) <= s.r_b_id());
        }
    }
}

TEST_CASE("IdSummary constructor rejects broken parts") {
    CHECK(code_of([] { IdSummary({1.0}, 2, {0.5, 0.6}, {0.0, 2.0}, 2.0, 2, NormKind::L2, std::nullopt); }) ==
          ErrorCode::RangeError);
    CHECK(code_of([] { IdSummary({1.0}, 2, {0.5, 0.5}, {1.5, 2.0}, 2.0, 2, NormKind::L2, std::nullopt); }) ==
          ErrorCode::RangeError);
    CHECK(code_of([] { IdSummary({1.0}, 3, {0.5, 0.5}, {0.0, 2.0}, 2.0, 2, NormKind::L2, std::nullopt); }) ==
          ErrorCode::DimensionMismatch);
    CHECK(code_of([] { IdSummary({5.0}, 2, {0.5, 0.5}, {0.0, 2.0}, 2.0, 2, NormKind::L2, std::nullopt); }) ==
          ErrorCode::RangeError);
    CHECK(code_of([] { IdSummary({1.0}, 2, {0.5, 0.5}, {0.0, 2.0}, 0.0, 2, NormKind::L2, std::nullopt); }) ==
          ErrorCode::AllZeroNorms);
}

TEST_CASE("compute_bound hand traces") {
    const FeatureMatrix id = FeatureMatrix::from_rows({{2}});
    const FeatureMatrix plus = FeatureMatrix::from_rows({{0}});
    CHECK(compute_bound(plus, fit(id, 1)).score == 0.5);
    const ScoreReport r = compute_bound(plus, fit(id, 2));
    CHECK(r.score == 0.0);
    CHECK(r.delta_mu_term == 0.5);
    CHECK(r.shell_term == 0.5);
    CHECK(r.best_shell == 1);
    CHECK(r.r_b_effective == 2.0);
    const FeatureMatrix pts = FeatureMatrix::from_rows({{0}, {2}});
    CHECK(compute_bound(pts, fit(pts, 2)).score == 1.0);
    CHECK_THROWS_AS(compute_bound(FeatureMatrix(1), fit(id, 2)), Error);
    CHECK_THROWS_AS(compute_bound(FeatureMatrix::from_rows({{1, 2}}), fit(id, 2)), Error);
}

TEST_CASE("self-score of any fit set is exactly 1") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const FeatureMatrix x = random_matrix(20 + 3 * seed, 1 + seed % 9, seed, 0.5 + seed, -1.0 * seed);
        for (NormKind kind : kAllNorms) {
            const IdSummary s = fit(x, 1 + 13 * (seed % 8), kind);
            CHECK(compute_bound(x, s).score == 1.0);
        }
    }
}

TEST_CASE("compute_bound matches the brute-force oracle") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const std::size_t dim = 1 + seed % 5;
        const FeatureMatrix id = random_matrix(30 + seed, dim, seed);
        const FeatureMatrix plus = random_matrix(1 + seed % 25, dim, 1000 + seed, 1.0 + 0.05 * seed, 0.1 * seed);
        for (NormKind kind : kAllNorms) {
            const std::size_t k = 1 + (seed * 11) % 150;
            const ScoreReport got = compute_bound(plus, fit(id, k, kind));
            const oracle::Bound want = oracle::bound(rows_of(plus), rows_of(id), k, oracle_norm(kind));
            CHECK(got.score == doctest::Approx(want.score).epsilon(1e-12));
            CHECK(got.delta_mu_term == doctest::Approx(want.delta_mu_term).epsilon(1e-12));
            CHECK(got.shell_term == doctest::Approx(want.shell_term).epsilon(1e-12));
        }
    }
}

TEST_CASE("score examples and agreement with compute_bound at d = 1") {
    const IdSummary s2 = fit(FeatureMatrix::from_rows({{2}}), 2);
    CHECK(score(FeatureVector{0.0}, s2).score == 0.0);
    CHECK(score(FeatureVector{2.0}, fit(FeatureMatrix::from_rows({{2}}), 2)).score == 1.0);

    // ID symmetric about the origin, candidate at twice the ID radius.
    const IdSummary sym = fit(FeatureMatrix::from_rows({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}), 10);
    const ScoreReport far = score(FeatureVector{0.0, 2.0}, sym);
    CHECK(far.delta_mu_term == 0.5);
    CHECK(far.r_b_effective == 2.0);

    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t dim = 1 + seed % 7;
        const FeatureMatrix id = random_matrix(40, dim, seed);
        const FeatureMatrix xs = random_matrix(25, dim, 77 + seed, 1.0 + 0.1 * seed);
        for (NormKind kind : kAllNorms) {
            std::optional<FeatureVector> center;
            if (seed % 2) center = FeatureVector(std::vector<double>(dim, 0.25 * seed));
            const IdSummary s = fit(id, 1 + seed * 5, kind, center);
            for (std::size_t r = 0; r < xs.rows(); ++r) {
                const ScoreReport fast = score(xs.row(r), s);
                const ScoreReport pooled = compute_bound(xs.slice(r, 1), s);
                CHECK(fast == pooled);
            }
        }
    }
}

TEST_CASE("score decomposition and range") {
    std::mt19937_64 rng(3);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t dim = 1 + seed % 6;
        const IdSummary s = fit(random_matrix(30, dim, seed), 1 + seed * 3, kAllNorms[seed % 3]);
        const FeatureMatrix xs = random_matrix(40, dim, 500 + seed, 0.1 + 0.3 * seed, 0.2 * seed);
        for (std::size_t r = 0; r < xs.rows(); ++r) {
            const ScoreReport rep = score(xs.row(r), s);
            CHECK(rep.score == (1.0 - rep.delta_mu_term) - rep.shell_term);
            CHECK(rep.score == score_eta1(xs.row(r), s) + (score_eta2(xs.row(r), s) - 1.0));
            CHECK(rep.score >= -0.5);
            CHECK(rep.score <= 1.0);
            CHECK(rep.delta_mu_term >= 0.0);
            CHECK(rep.delta_mu_term <= 1.0);
            CHECK(rep.shell_term >= 0.0);
            CHECK(rep.shell_term <= 0.5);
        }
    }
}

TEST_CASE("ablation scorers") {
    const IdSummary s = fit(FeatureMatrix::from_rows({{2}}), 2);
    CHECK(score_eta1(std::vector<double>{0.0}, s) == 0.5);
    CHECK(score_eta2(std::vector<double>{0.0}, s) == 0.5);
    CHECK(score_eta1(std::vector<double>{2.0}, s) == 1.0);
    CHECK(score_eta2(std::vector<double>{2.0}, s) == 1.0);
}

TEST_CASE("positive scaling leaves reports unchanged") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const FeatureMatrix id = random_matrix(60, 3, seed);
        const FeatureMatrix xs = random_matrix(20, 3, 300 + seed, 1.5);
        for (double c : {0.25, 2.0, 1024.0}) {
            std::vector<double> sid = id.data(), sxs = xs.data();
            for (double& v : sid) v *= c;
            for (double& v : sxs) v *= c;
            const FeatureMatrix cid(id.rows(), 3, sid), cxs(xs.rows(), 3, sxs);
            for (NormKind kind : kAllNorms) {
                const IdSummary s = fit(id, 50, kind);
                const IdSummary cs = fit(cid, 50, kind);
                for (std::size_t r = 0; r < xs.rows(); ++r) {
                    const ScoreReport a = score(xs.row(r), s);
                    const ScoreReport b = score(cxs.row(r), cs);
                    CHECK(a.score == b.score);
                    CHECK(a.best_shell == b.best_shell);
                }
            }
        }
    }
}

TEST_CASE("score_batch equals per-sample scores") {
    const IdSummary s2 = fit(FeatureMatrix::from_rows({{2}}), 2);
    const auto three = score_batch(FeatureMatrix::from_rows({{0}, {2}, {4}}), s2);
    REQUIRE(three.size() == 3);
    CHECK(three[0].score == 0.0);
    CHECK(three[1].score == 1.0);
    CHECK(three[2] == score(FeatureVector{4.0}, s2));
    CHECK(score_batch(FeatureMatrix(1), s2).empty());

    const IdSummary s = fit(random_matrix(100, 4, 1), 100);
    std::vector<double> same;
    for (int i = 0; i < 1000; ++i) same.insert(same.end(), {0.3, -1.0, 2.0, 0.5});
    const FeatureMatrix rows(1000, 4, same);
    for (unsigned threads : {1u, 3u, 8u}) {
        const auto out = score_batch(rows, s, threads);
        for (const auto& rep : out) CHECK(rep == out.front());
    }
    const FeatureMatrix xs = random_matrix(257, 4, 2);
    const auto single = score_batch(xs, s, 1);
    const auto multi = score_batch(xs, s, 4);
    CHECK(single == multi);
    for (std::size_t r = 0; r < xs.rows(); ++r) CHECK(single[r] == score(xs.row(r), s));
    CHECK_THROWS_AS(score_batch(random_matrix(2, 3, 0), s), Error);
}

TEST_CASE("classify") {
    const FeatureMatrix one = FeatureMatrix::from_rows({{1.5, -2.0}});
    const IdSummary self = fit(one, 100);
    CHECK(classify(FeatureVector{1.5, -2.0}, self, 0.99) == Decision::ID);
    const IdSummary s2 = fit(FeatureMatrix::from_rows({{2}}), 2);
    CHECK(classify(FeatureVector{0.0}, s2, 0.5) == Decision::OOD);
    CHECK(classify(FeatureVector{0.0}, s2, 0.0) == Decision::ID);  // score == T is ID
    const IdSummary s = fit(random_matrix(30, 3, 4), 100);
    const FeatureMatrix xs = random_matrix(50, 3, 5, 100.0);
    for (std::size_t r = 0; r < xs.rows(); ++r) CHECK(classify(xs.row(r), s, -1.0) == Decision::ID);
}

TEST_CASE("centering is applied identically at fit and score time") {
    const FeatureMatrix id = random_matrix(80, 3, 21, 1.0, 5.0);
    const FeatureVector c{5.0, 5.0, 5.0};
    const IdSummary centered = fit(id, 60, NormKind::L2, c);
    std::vector<double> shifted = id.data();
    for (double& v : shifted) v -= 5.0;
    const IdSummary manual = fit(FeatureMatrix(id.rows(), 3, shifted), 60, NormKind::L2);
    const FeatureMatrix xs = random_matrix(30, 3, 22, 1.0, 5.0);
    for (std::size_t r = 0; r < xs.rows(); ++r) {
        std::vector<double> x(xs.row(r).begin(), xs.row(r).end());
        for (double& v : x) v -= 5.0;
        CHECK(score(xs.row(r), centered).score == doctest::Approx(score(x, manual).score).epsilon(1e-12));
    }
    CHECK(compute_bound(id, centered).score == 1.0);
}

TEST_CASE("contaminated_center") {
    const FeatureMatrix pool = random_matrix(40, 3, 8);
    const FeatureVector full = contaminated_center(pool, 40, 1);
    for (std::size_t i = 0; i < 3; ++i) {
        double m = 0.0;
        for (std::size_t r = 0; r < 40; ++r) m += pool.row(r)[i];
        CHECK(full[i] == doctest::Approx(m / 40.0).epsilon(1e-14));
    }
    std::vector<double> same;
    for (int i = 0; i < 10; ++i) same.insert(same.end(), {1.25, -3.0});
    CHECK(contaminated_center(FeatureMatrix(10, 2, same), 4, 99) == FeatureVector{1.25, -3.0});
    CHECK(contaminated_center(pool, 7, 42) == contaminated_center(pool, 7, 42));
    CHECK_FALSE(contaminated_center(pool, 7, 42) == contaminated_center(pool, 7, 43));
    CHECK(code_of([] { contaminated_center(FeatureMatrix(2), 1, 0); }) == ErrorCode::EmptyPool);
    CHECK(code_of([&] { contaminated_center(pool, 41, 0); }) == ErrorCode::RangeError);
    CHECK(code_of([&] { contaminated_center(pool, 0, 0); }) == ErrorCode::RangeError);
}

TEST_CASE("recommended k range") {
    CHECK(k_in_recommended_range(100));
    CHECK(k_in_recommended_range(50));
    CHECK(k_in_recommended_range(200));
    CHECK_FALSE(k_in_recommended_range(10));
    CHECK_FALSE(k_in_recommended_range(201));
}
