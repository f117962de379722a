#include <doctest.h>

#include <cmath>
#include <numeric>

#include "kopt/bounds.hpp"
#include "kopt/errors.hpp"
#include "kopt/linalg.hpp"
#include "kopt/optimizers.hpp"
#include "testutil.hpp"

using namespace kopt;

namespace {

double lambda_min_at(const DenseMatrix& b, const DistributionVector& p) {
    return eig_extremes(weighted_gram(b, p)).lambda_min;
}

DenseMatrix three_row_example() {
    return DenseMatrix(3, 2, {1.0, 0.0, 1.0, 0.0, 0.0, 1.0});
}

}  // namespace

TEST_CASE("maximin on identity rows returns the uniform optimum") {
    const std::size_t n = 4;
    const auto result = optimize_maximin(DenseMatrix::identity(n), 1e-8, 2000);
    CHECK(result.t_hat == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(result.certificate_gap <= 1e-8);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(result.p_hat[i] == doctest::Approx(0.25).epsilon(1e-10));
    }
}

TEST_CASE("maximin splits mass across duplicated directions") {
    const auto result = optimize_maximin(three_row_example(), 1e-8, 2000);
    CHECK(result.t_hat == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(result.p_hat[0] + result.p_hat[1] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(result.p_hat[2] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(result.certificate_gap <= 1e-8);
}

TEST_CASE("maximin matches the simplex grid oracle on a random 6x3 instance") {
    rng::SplitMix64 rng(121);
    const DenseMatrix b = testutil::random_unit_rows(6, 3, rng);
    const auto result = optimize_maximin(b, 1e-8, 2000);
    const auto [oracle_value, oracle_p] = testutil::maximin_grid_oracle_3(b);
    CHECK(std::abs(result.t_hat - oracle_value) <= 2e-3);
    CHECK(result.t_hat >= oracle_value - 1e-9);  // the oracle is feasible
}

TEST_CASE("maximin certificate and trace pigeonhole bound") {
    rng::SplitMix64 rng(122);
    const DenseMatrix b = testutil::random_unit_rows(9, 4, rng);
    const auto result = optimize_maximin(b, 1e-8, 3000);
    CHECK(result.certificate_gap <= 1e-8);
    CHECK(result.t_hat <= 0.25 + 1e-9);
    CHECK(result.t_hat == doctest::Approx(lambda_min_at(b, result.p_hat)).epsilon(1e-12));
}

TEST_CASE("maximin never does worse than row-norm selection") {
    rng::SplitMix64 rng(123);
    const DenseMatrix a = testutil::random_matrix(10, 3, rng);
    const auto normalized = row_normalize(a, std::vector<double>(10, 0.0));
    const auto result = optimize_maximin(normalized.unit_rows, 1e-8, 3000);
    const double row_norm_value =
        lambda_min_at(normalized.unit_rows, DistributionVector::from_row_norms(a));
    CHECK(result.t_hat >= row_norm_value - 1e-8);
}

TEST_CASE("maximin is invariant under row permutation") {
    rng::SplitMix64 rng(124);
    const DenseMatrix b = testutil::random_unit_rows(6, 3, rng);
    const std::vector<std::size_t> perm{4, 2, 0, 5, 1, 3};
    DenseMatrix permuted(6, 3);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 3; ++j) permuted(i, j) = b(perm[i], j);
    }
    const auto base = optimize_maximin(b, 1e-9, 3000);
    const auto shuffled = optimize_maximin(permuted, 1e-9, 3000);
    CHECK(base.t_hat == doctest::Approx(shuffled.t_hat).epsilon(1e-8));
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(std::abs(shuffled.p_hat[i] - base.p_hat[perm[i]]) <= 1e-4);
    }
}

TEST_CASE("maximin rejects rank-deficient rows") {
    DenseMatrix flat(3, 2, {1.0, 0.0, -1.0, 0.0, 1.0, 0.0});
    CHECK_THROWS_AS(optimize_maximin(flat), RankDeficient);
}

TEST_CASE("maximin rejects non-unit rows") {
    DenseMatrix unnormalized(2, 2, {2.0, 0.0, 0.0, 1.0});
    CHECK_THROWS_AS(optimize_maximin(unnormalized), InvalidArgument);
}

TEST_CASE("away-step toggle reaches the same optimum") {
    rng::SplitMix64 rng(125);
    const DenseMatrix b = testutil::random_unit_rows(6, 3, rng);
    MaximinOptions options;
    options.away_steps = true;
    const auto plain = optimize_maximin(b, 1e-8, 3000);
    const auto away = optimize_maximin(b, 1e-8, 3000, options);
    CHECK(plain.t_hat == doctest::Approx(away.t_hat).epsilon(1e-7));
}

TEST_CASE("LP relaxation on identity rows") {
    const auto result = optimize_lp(DenseMatrix::identity(2));
    CHECK(result.t_hat == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(result.p_hat[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(result.certificate_gap <= 1e-8);
}

TEST_CASE("LP relaxation on the three-row example") {
    const auto result = optimize_lp(three_row_example());
    CHECK(result.t_hat == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("LP relaxation dominates the maximin objective") {
    rng::SplitMix64 rng(131);
    for (int trial = 0; trial < 5; ++trial) {
        const DenseMatrix b = testutil::random_unit_rows(6, 3, rng);
        const auto lp = optimize_lp(b);
        const auto maximin = optimize_maximin(b, 1e-8, 3000);
        CHECK(lp.t_hat >= maximin.t_hat - 1e-9);
    }
}

TEST_CASE("LP relaxation returns a centered optimal point") {
    // both optimal faces are nontrivial here; the center must keep every
    // column constraint at the optimum and spread mass over duplicates
    const auto result = optimize_lp(three_row_example());
    CHECK(result.p_hat[0] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(result.p_hat[1] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(result.p_hat[2] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("multiplicative design update equalizes identity rows in one step") {
    const auto result =
        optimize_dopt(DistributionVector({0.3, 0.7}), DenseMatrix::identity(2), 1);
    CHECK(result.p_hat[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(result.p_hat[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("uniform weights are an exact fixed point on identity rows") {
    DoptTrace trace;
    const auto result = optimize_dopt(DistributionVector::uniform(4), DenseMatrix::identity(4),
                                      10, &trace);
    for (std::size_t i = 0; i < 4; ++i) CHECK(result.p_hat[i] == 0.25);
    REQUIRE(trace.iterates.size() == 11);
    for (const auto& p : trace.iterates) {
        for (double v : p) CHECK(v == 0.25);
    }
}

TEST_CASE("multiplicative design preserves the simplex and ascends logdet") {
    rng::SplitMix64 rng(141);
    const DenseMatrix b = testutil::random_unit_rows(8, 3, rng);
    std::vector<double> start(8);
    for (double& v : start) v = 0.05 + rng.next_double();
    const double total = std::accumulate(start.begin(), start.end(), 0.0);
    for (double& v : start) v /= total;

    DoptTrace trace;
    const auto result = optimize_dopt(DistributionVector(start), b, 10, &trace);
    REQUIRE(trace.iterates.size() == 11);
    for (const auto& p : trace.iterates) {
        const double sum = std::accumulate(p.begin(), p.end(), 0.0);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        for (double v : p) CHECK(v >= 0.0);
    }
    for (std::size_t t = 1; t < trace.logdets.size(); ++t) {
        CHECK(trace.logdets[t] >= trace.logdets[t - 1] - 1e-12);
    }
    CHECK(result.iterations == 10);
    CHECK(result.certificate_gap >= 0.0);
}

TEST_CASE("multiplicative design requires a strictly positive start") {
    CHECK_THROWS_AS(
        optimize_dopt(DistributionVector({1.0, 0.0}), DenseMatrix::identity(2), 3),
        InvalidDistribution);
}

TEST_CASE("multiplicative design surfaces singular Gram matrices") {
    DenseMatrix flat(2, 2, {1.0, 0.0, 1.0, 0.0});
    CHECK_THROWS_AS(optimize_dopt(DistributionVector({0.5, 0.5}), flat, 2), NotPositiveDefinite);
}

TEST_CASE("design weight conversions") {
    const auto [p, t] = p_from_q(UnnormalizedDesign{{2.0, 2.0}});
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
    CHECK(t == doctest::Approx(0.25));

    const auto q = q_from_p(DistributionVector({0.5, 0.5}), 0.5);
    CHECK(q.q[0] == doctest::Approx(1.0));
    CHECK(q.q[1] == doctest::Approx(1.0));

    const auto q2 = q_from_p(DistributionVector({1.0, 0.0}), 0.25);
    CHECK(q2.q[0] == doctest::Approx(4.0));
    CHECK(q2.q[1] == doctest::Approx(0.0));

    CHECK_THROWS_AS(p_from_q(UnnormalizedDesign{{0.0, 0.0}}), ZeroDesign);
    CHECK_THROWS_AS(q_from_p(DistributionVector({0.5, 0.5}), 0.0), NonPositiveT);
}

TEST_CASE("conversion round trip is exact to machine precision") {
    rng::SplitMix64 rng(151);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = DistributionVector(testutil::random_simplex_point(7, rng));
        const double t = 0.01 + rng.next_double();
        const auto q = q_from_p(p, t);
        const auto [p_back, t_back] = p_from_q(q);
        CHECK(t_back == doctest::Approx(t).epsilon(1e-12));
        for (std::size_t i = 0; i < 7; ++i) {
            CHECK(p_back[i] == doctest::Approx(p[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("kappa-optimal rescaling realizes the optimized rate") {
    const std::size_t n = 3;
    const auto identity_result = optimize_maximin(DenseMatrix::identity(n), 1e-8, 2000);
    const auto rescaled = kappa_optimal_rescaling(DenseMatrix::identity(n), identity_result);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(rescaled(i, i) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));
    }
    CHECK(scaled_condition_number(rescaled) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));

    const auto three = three_row_example();
    const auto result = optimize_maximin(three, 1e-8, 2000);
    const auto scaled = kappa_optimal_rescaling(three, result);
    const double kappa = scaled_condition_number(scaled);
    CHECK(kappa * kappa == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("kappa-optimal rescaling beats random row scalings") {
    rng::SplitMix64 rng(161);
    const DenseMatrix b = testutil::random_unit_rows(6, 3, rng);
    const auto result = optimize_maximin(b, 1e-8, 3000);
    const auto optimal = kappa_optimal_rescaling(b, result);
    const double kappa_opt = scaled_condition_number(optimal);
    CHECK(kappa_opt == doctest::Approx(1.0 / std::sqrt(result.t_hat)).epsilon(1e-6));

    for (int trial = 0; trial < 20; ++trial) {
        DenseMatrix alternative(6, 3);
        for (std::size_t i = 0; i < 6; ++i) {
            const double s = 0.05 + rng.next_double();
            for (std::size_t j = 0; j < 3; ++j) alternative(i, j) = s * b(i, j);
        }
        CHECK(kappa_opt <= scaled_condition_number(alternative) + 1e-9);
    }
}

TEST_CASE("relaxation ordering across the three optimizers") {
    rng::SplitMix64 rng(171);
    const DenseMatrix a = testutil::random_matrix(9, 3, rng);
    const auto normalized = row_normalize(a, std::vector<double>(9, 0.0));
    const DenseMatrix& b = normalized.unit_rows;

    const auto lp = optimize_lp(b);
    const auto maximin = optimize_maximin(b, 1e-8, 3000);
    const auto dopt = optimize_dopt(DistributionVector::from_row_norms(a), b, 10);

    CHECK(lp.t_hat >= maximin.t_hat - 1e-9);
    CHECK(maximin.t_hat >= dopt.t_hat - 1e-9);
}

TEST_CASE("sparsity diagnostics count small entries") {
    DistributionVector p({0.5, 0.5 - 1e-6, 1e-6, 0.0});
    CHECK(p.sparsity_count() == 2);
}
