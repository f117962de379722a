#include "kopt/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>

#include "kopt/errors.hpp"

namespace kopt {

namespace {

constexpr double kEnterEps = 1e-11;
constexpr double kPivotEps = 1e-10;

// Exact game bounds for a candidate strategy pair, evaluated directly from G.
double min_column_payoff(const DenseMatrix& g, const std::vector<double>& p) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < g.cols(); ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.rows(); ++i) s += p[i] * g(i, c);
        worst = std::min(worst, s);
    }
    return worst;
}

double max_row_payoff(const DenseMatrix& g, const std::vector<double>& mu) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.rows(); ++i) best = std::max(best, dot(g.row(i), mu));
    return best;
}

}  // namespace

GameLpSolution solve_matrix_game(const DenseMatrix& payoff, double tol, std::size_t max_pivots) {
    const std::size_t m = payoff.rows();
    const std::size_t k = payoff.cols();
    for (double v : payoff.data()) {
        if (v < -1e-15) throw InvalidArgument("game payoff entries must be nonnegative");
    }

    // A column with no mass anywhere pins the game value at zero.
    for (std::size_t c = 0; c < k; ++c) {
        double col_max = 0.0;
        for (std::size_t i = 0; i < m; ++i) col_max = std::max(col_max, payoff(i, c));
        if (col_max <= 1e-300) {
            GameLpSolution out;
            out.row_strategy.assign(m, 1.0 / static_cast<double>(m));
            out.column_strategy.assign(k, 0.0);
            out.column_strategy[c] = 1.0;
            out.lower_value = 0.0;
            out.upper_value = 0.0;
            out.pivots = 0;
            return out;
        }
    }

    // Simplex tableau for max 1'w s.t. G w + s = 1, w >= 0, s >= 0.
    // Columns: [w_0..w_{k-1} | s_0..s_{m-1} | rhs].
    const std::size_t ncols = k + m + 1;
    std::vector<double> tab(m * ncols, 0.0);
    std::vector<double> reduced(k + m, 0.0);
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < k; ++j) tab[i * ncols + j] = payoff(i, j);
        tab[i * ncols + k + i] = 1.0;
        tab[i * ncols + k + m] = 1.0;
        basis[i] = k + i;
    }
    for (std::size_t j = 0; j < k; ++j) reduced[j] = -1.0;

    // Incremental reduced costs drift over long degenerate runs; recompute
    // them from the tableau periodically and before accepting optimality.
    auto refresh_reduced = [&]() {
        for (std::size_t j = 0; j < k + m; ++j) {
            double z = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (basis[i] < k) z += tab[i * ncols + j];
            }
            reduced[j] = z - (j < k ? 1.0 : 0.0);
        }
    };

    const std::size_t bland_switch = 5 * (m + k);
    std::size_t pivots = 0;
    while (true) {
        if (pivots > 0 && pivots % 1000 == 0) refresh_reduced();

        // entering column
        auto pick_entering = [&]() {
            std::size_t enter = k + m;
            if (pivots < bland_switch) {
                double best = -kEnterEps;
                for (std::size_t j = 0; j < k + m; ++j) {
                    if (reduced[j] < best) {
                        best = reduced[j];
                        enter = j;
                    }
                }
            } else {
                for (std::size_t j = 0; j < k + m; ++j) {
                    if (reduced[j] < -kEnterEps) {
                        enter = j;
                        break;
                    }
                }
            }
            return enter;
        };
        std::size_t enter = pick_entering();
        if (enter == k + m) {
            refresh_reduced();
            enter = pick_entering();
            if (enter == k + m) break;  // optimal
        }

        // Ratio test. These games are heavily degenerate (unit rhs, many
        // near-parallel columns), so among the minimal-ratio rows take the
        // largest pivot element; tiny pivots blow the tableau up.
        std::size_t leave = m;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            const double a = tab[i * ncols + enter];
            if (a <= kPivotEps) continue;
            const double ratio = tab[i * ncols + k + m] / a;
            if (ratio < best_ratio) {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave == m) {
            throw ConvergenceFailure("game LP is unbounded, payoff matrix malformed", pivots);
        }
        {
            const double cutoff = best_ratio + 1e-12 * (1.0 + best_ratio);
            double best_pivot = tab[leave * ncols + enter];
            for (std::size_t i = 0; i < m; ++i) {
                const double a = tab[i * ncols + enter];
                if (a <= kPivotEps) continue;
                if (tab[i * ncols + k + m] / a <= cutoff && a > best_pivot) {
                    best_pivot = a;
                    leave = i;
                }
            }
        }

        // pivot
        const double piv = tab[leave * ncols + enter];
        for (std::size_t j = 0; j < ncols; ++j) tab[leave * ncols + j] /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave) continue;
            const double f = tab[i * ncols + enter];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < ncols; ++j) tab[i * ncols + j] -= f * tab[leave * ncols + j];
        }
        const double rf = reduced[enter];
        if (rf != 0.0) {
            for (std::size_t j = 0; j < k + m; ++j) reduced[j] -= rf * tab[leave * ncols + j];
        }
        basis[leave] = enter;

        if (++pivots > max_pivots) {
            if (std::getenv("KOPT_LP_TRACE")) {
                std::fprintf(stderr, "lp churn: m=%zu k=%zu pivots=%zu best_reduced=%.3e\n", m, k,
                             pivots, *std::min_element(reduced.begin(), reduced.end()));
            }
            throw ConvergenceFailure("simplex pivot budget exhausted", pivots);
        }
    }

    // primal solution w and dual prices u (reduced costs under the slacks)
    std::vector<double> w(k, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < k) w[basis[i]] = std::max(0.0, tab[i * ncols + k + m]);
    }
    std::vector<double> u(m);
    for (std::size_t i = 0; i < m; ++i) u[i] = std::max(0.0, reduced[k + i]);

    double w_sum = 0.0, u_sum = 0.0;
    for (double v : w) w_sum += v;
    for (double v : u) u_sum += v;
    if (!(w_sum > 0.0) || !(u_sum > 0.0)) {
        throw ConvergenceFailure("degenerate game LP solution", pivots);
    }
    if (std::abs(w_sum - u_sum) > tol * std::max(1.0, w_sum)) {
        throw ConvergenceFailure("simplex terminated with duality gap " +
                                     std::to_string(std::abs(w_sum - u_sum)),
                                 pivots);
    }

    GameLpSolution out;
    out.row_strategy.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.row_strategy[i] = u[i] / u_sum;
    out.column_strategy.resize(k);
    for (std::size_t c = 0; c < k; ++c) out.column_strategy[c] = w[c] / w_sum;
    out.lower_value = min_column_payoff(payoff, out.row_strategy);
    out.upper_value = max_row_payoff(payoff, out.column_strategy);
    out.pivots = pivots;
    return out;
}

}  // namespace kopt
