#include <doctest.h>

#include <cmath>

#include "kopt/errors.hpp"
#include "kopt/linalg.hpp"
#include "testutil.hpp"

using namespace kopt;

TEST_CASE("row_normalize on axis-aligned rows") {
    DenseMatrix a(2, 2, {3.0, 0.0, 0.0, 4.0});
    const auto system = row_normalize(a, {6.0, 4.0});
    CHECK(system.unit_rows(0, 0) == doctest::Approx(1.0));
    CHECK(system.unit_rows(0, 1) == doctest::Approx(0.0));
    CHECK(system.unit_rows(1, 1) == doctest::Approx(1.0));
    CHECK(system.row_norms[0] == doctest::Approx(3.0));
    CHECK(system.row_norms[1] == doctest::Approx(4.0));
    CHECK(system.rhs[0] == 6.0);
}

TEST_CASE("row_normalize single row") {
    DenseMatrix a(1, 2, {1.0, 1.0});
    const auto system = row_normalize(a, {2.0});
    CHECK(system.unit_rows(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(system.row_norms[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("row_normalize rejects zero rows and bad rhs") {
    DenseMatrix a(2, 2, {0.0, 0.0, 1.0, 0.0});
    CHECK_THROWS_AS(row_normalize(a, {1.0, 1.0}), ZeroRow);
    try {
        row_normalize(a, {1.0, 1.0});
    } catch (const ZeroRow& e) {
        CHECK(e.row == 0);
    }
    DenseMatrix ok(2, 2, {1.0, 0.0, 0.0, 1.0});
    CHECK_THROWS_AS(row_normalize(ok, {1.0}), DimensionMismatch);
}

TEST_CASE("normalized rows have unit norm") {
    rng::SplitMix64 rng(11);
    const DenseMatrix a = testutil::random_matrix(7, 4, rng);
    const auto system = row_normalize(a, std::vector<double>(7, 0.0));
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(std::abs(norm(system.unit_rows.row(i)) - 1.0) <= 1e-12);
    }
}

TEST_CASE("weighted_gram diagonal cases") {
    const DenseMatrix identity = DenseMatrix::identity(2);
    const auto m = weighted_gram(identity, DistributionVector({0.3, 0.7}));
    CHECK(m(0, 0) == doctest::Approx(0.3));
    CHECK(m(1, 1) == doctest::Approx(0.7));
    CHECK(m(0, 1) == 0.0);

    DenseMatrix duplicated(3, 2, {1.0, 0.0, 1.0, 0.0, 0.0, 1.0});
    const auto m2 = weighted_gram(duplicated, DistributionVector({0.25, 0.25, 0.5}));
    CHECK(m2(0, 0) == doctest::Approx(0.5));
    CHECK(m2(1, 1) == doctest::Approx(0.5));
    CHECK(m2(0, 1) == 0.0);

    CHECK_THROWS_AS(weighted_gram(identity, DistributionVector({1.0})), DimensionMismatch);
}

TEST_CASE("weighted_gram matches direct summation and has unit trace") {
    rng::SplitMix64 rng(21);
    const DenseMatrix b = testutil::random_unit_rows(5, 3, rng);
    const auto p = testutil::random_simplex_point(5, rng);
    const auto m = weighted_gram(b, p);

    CHECK(std::abs(m.trace() - 1.0) <= 1e-12);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            double direct = 0.0;
            for (std::size_t i = 0; i < 5; ++i) direct += p[i] * b(i, r) * b(i, c);
            CHECK(m(r, c) == doctest::Approx(direct).epsilon(1e-13));
        }
    }
}

TEST_CASE("weighted_gram is linear in the weights") {
    rng::SplitMix64 rng(22);
    const DenseMatrix b = testutil::random_unit_rows(6, 3, rng);
    const auto p = testutil::random_simplex_point(6, rng);
    const auto q = testutil::random_simplex_point(6, rng);
    const double alpha = 0.37;
    std::vector<double> mix(6);
    for (std::size_t i = 0; i < 6; ++i) mix[i] = alpha * p[i] + (1.0 - alpha) * q[i];

    const auto m_mix = weighted_gram(b, mix);
    const auto m_p = weighted_gram(b, p);
    const auto m_q = weighted_gram(b, q);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            const double expected = alpha * m_p(r, c) + (1.0 - alpha) * m_q(r, c);
            CHECK(std::abs(m_mix(r, c) - expected) <= 1e-13);
        }
    }
}

TEST_CASE("eig_extremes on diagonal and scaled identity") {
    const auto diag =
        SymmetricMatrix::from_entries(2, {0.3, 0.0, 0.0, 0.7});
    const auto ext = eig_extremes(diag);
    CHECK(ext.lambda_min == doctest::Approx(0.3));
    CHECK(ext.lambda_max == doctest::Approx(0.7));
    CHECK(std::abs(ext.min_vector[0]) == doctest::Approx(1.0));
    CHECK(std::abs(ext.min_vector[1]) == doctest::Approx(0.0).epsilon(1e-12));

    const std::size_t n = 5;
    std::vector<double> entries(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) entries[i * n + i] = 1.0 / static_cast<double>(n);
    const auto scaled = SymmetricMatrix::from_entries(n, entries);
    const auto ext2 = eig_extremes(scaled);
    CHECK(ext2.lambda_min == doctest::Approx(0.2));
    CHECK(ext2.lambda_max == doctest::Approx(0.2));
}

TEST_CASE("eig_extremes matches the bisection oracle on random matrices") {
    rng::SplitMix64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = testutil::random_symmetric(4, rng);
        const auto oracle = testutil::bisection_eigenvalues(m);
        const auto ext = eig_extremes(m);
        CHECK(ext.lambda_min == doctest::Approx(oracle.front()).epsilon(1e-8));
        CHECK(ext.lambda_max == doctest::Approx(oracle.back()).epsilon(1e-8));
    }
}

TEST_CASE("eigenvector residual satisfies the advertised bound") {
    rng::SplitMix64 rng(32);
    const auto m = testutil::random_spd(6, rng);
    const double tol = 1e-12;
    const auto ext = eig_extremes(m, tol);
    std::vector<double> residual(6, 0.0);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) residual[i] += m(i, j) * ext.min_vector[j];
        residual[i] -= ext.lambda_min * ext.min_vector[i];
    }
    CHECK(norm(residual) <= 1e-10 * m.frobenius_norm());
}

TEST_CASE("spectral shift moves both extremes by c") {
    rng::SplitMix64 rng(33);
    const auto m = testutil::random_symmetric(5, rng);
    const auto ext = eig_extremes(m);
    const double c = 2.625;
    const auto ext_shifted = eig_extremes(m.shifted(c));
    CHECK(ext_shifted.lambda_min == doctest::Approx(ext.lambda_min + c).epsilon(1e-11));
    CHECK(ext_shifted.lambda_max == doctest::Approx(ext.lambda_max + c).epsilon(1e-11));
    const double alignment = std::abs(dot(ext.min_vector, ext_shifted.min_vector));
    CHECK(alignment == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("Rayleigh quotients stay inside the extreme eigenvalues") {
    rng::SplitMix64 rng(34);
    const auto m = testutil::random_symmetric(5, rng);
    const auto ext = eig_extremes(m);
    for (int trial = 0; trial < 100; ++trial) {
        const auto y = testutil::random_unit_vector(5, rng);
        double quad = 0.0;
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 5; ++j) quad += y[i] * m(i, j) * y[j];
        }
        CHECK(quad >= ext.lambda_min - 1e-10);
        CHECK(quad <= ext.lambda_max + 1e-10);
    }
}

TEST_CASE("eigensolver dimension cap") {
    std::vector<double> entries(513 * 513, 0.0);
    for (std::size_t i = 0; i < 513; ++i) entries[i * 513 + i] = 1.0;
    const auto big = SymmetricMatrix::from_entries(513, std::move(entries));
    CHECK_THROWS_AS(eig_extremes(big), InvalidArgument);
}

TEST_CASE("logdet closed forms") {
    CHECK(logdet(SymmetricMatrix::from_entries(2, {0.5, 0.0, 0.0, 0.5})) ==
          doctest::Approx(std::log(0.25)).epsilon(1e-14));
    CHECK(logdet(SymmetricMatrix::from_dense(DenseMatrix::identity(3))) ==
          doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("logdet matches the cofactor determinant on random SPD 3x3") {
    rng::SplitMix64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = testutil::random_spd(3, rng);
        const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        CHECK(logdet(m) == doctest::Approx(std::log(det)).epsilon(1e-10));
    }
}

TEST_CASE("logdet equals the sum of log-eigenvalues from the oracle") {
    rng::SplitMix64 rng(42);
    for (std::size_t n = 2; n <= 5; ++n) {
        const auto m = testutil::random_spd(n, rng);
        const auto oracle = testutil::bisection_eigenvalues(m);
        double expected = 0.0;
        for (double v : oracle) expected += std::log(v);
        CHECK(std::abs(logdet(m) - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("logdet rejects indefinite input") {
    const auto indefinite = SymmetricMatrix::from_entries(2, {1.0, 2.0, 2.0, 1.0});
    CHECK_THROWS_AS(logdet(indefinite), NotPositiveDefinite);
}

TEST_CASE("solve_spd closed forms and residual bound") {
    const auto identity = SymmetricMatrix::from_dense(DenseMatrix::identity(2));
    const auto x = solve_spd(identity, std::vector<double>{1.0, 2.0});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));

    const auto diag = SymmetricMatrix::from_entries(2, {2.0, 0.0, 0.0, 4.0});
    const auto y = solve_spd(diag, std::vector<double>{2.0, 4.0});
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(1.0));

    rng::SplitMix64 rng(51);
    const auto m = testutil::random_spd(4, rng);
    const auto rhs = testutil::random_vector(4, rng);
    const auto sol = solve_spd(m, rhs);
    std::vector<double> residual(4, 0.0);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) residual[i] += m(i, j) * sol[j];
        residual[i] -= rhs[i];
    }
    CHECK(norm(residual) <= 1e-10 * norm(rhs));
}

TEST_CASE("symmetric factory rejects asymmetry") {
    CHECK_THROWS_AS(SymmetricMatrix::from_entries(2, {1.0, 2.0, 2.1, 1.0}), InvalidArgument);
}
