#include <doctest.h>

#include <cmath>

#include "kopt/errors.hpp"
#include "kopt/lp.hpp"
#include "testutil.hpp"

using namespace kopt;

namespace {

double simplex_sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

TEST_CASE("identity game splits evenly") {
    const auto game = solve_matrix_game(DenseMatrix::identity(2));
    CHECK(game.lower_value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(game.upper_value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(game.row_strategy[0] == doctest::Approx(0.5));
    CHECK(game.row_strategy[1] == doctest::Approx(0.5));
}

TEST_CASE("duplicated rows pool their mass") {
    DenseMatrix payoff(3, 2, {1.0, 0.0, 1.0, 0.0, 0.0, 1.0});
    const auto game = solve_matrix_game(payoff);
    CHECK(game.lower_value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(game.row_strategy[0] + game.row_strategy[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(game.row_strategy[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("strategies are simplex points and the gap closes") {
    rng::SplitMix64 rng(111);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t m = 3 + static_cast<std::size_t>(rng.next_u64() % 10);
        const std::size_t k = 2 + static_cast<std::size_t>(rng.next_u64() % 6);
        DenseMatrix payoff(m, k);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t c = 0; c < k; ++c) {
                const double v = rng.next_normal();
                payoff(i, c) = v * v;
            }
        }
        const auto game = solve_matrix_game(payoff);
        CHECK(std::abs(simplex_sum(game.row_strategy) - 1.0) <= 1e-9);
        CHECK(std::abs(simplex_sum(game.column_strategy) - 1.0) <= 1e-9);
        for (double v : game.row_strategy) CHECK(v >= 0.0);
        for (double v : game.column_strategy) CHECK(v >= 0.0);
        CHECK(game.lower_value <= game.upper_value + 1e-12);
        CHECK(game.upper_value - game.lower_value <= 1e-9 * std::max(1.0, game.upper_value));
    }
}

TEST_CASE("any strategy pair brackets the optimal value") {
    rng::SplitMix64 rng(112);
    DenseMatrix payoff(6, 4);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t c = 0; c < 4; ++c) payoff(i, c) = rng.next_double();
    }
    const auto game = solve_matrix_game(payoff);
    for (int trial = 0; trial < 50; ++trial) {
        // random row strategy cannot beat the optimum
        const auto p = testutil::random_simplex_point(6, rng);
        double worst = 1e300;
        for (std::size_t c = 0; c < 4; ++c) {
            double s = 0.0;
            for (std::size_t i = 0; i < 6; ++i) s += p[i] * payoff(i, c);
            worst = std::min(worst, s);
        }
        CHECK(worst <= game.upper_value + 1e-12);
    }
}

TEST_CASE("an all-zero column pins the value at zero") {
    DenseMatrix payoff(3, 2, {1.0, 0.0, 0.5, 0.0, 0.25, 0.0});
    const auto game = solve_matrix_game(payoff);
    CHECK(game.lower_value == 0.0);
    CHECK(game.upper_value == 0.0);
    CHECK(game.column_strategy[1] == 1.0);
}

TEST_CASE("negative payoffs are rejected") {
    DenseMatrix payoff(2, 2, {1.0, -0.5, 0.0, 1.0});
    CHECK_THROWS_AS(solve_matrix_game(payoff), InvalidArgument);
}
