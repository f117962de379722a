#pragma once

#include <cstddef>
#include <vector>

#include "kopt/matrix.hpp"

namespace kopt {

/// Solution of the matrix game max_{p in simplex} min_col (G^T p)_col for a
/// nonnegative payoff matrix G. lower_value = min_col (G^T p)_col is achieved
/// by row_strategy; upper_value = max_row (G mu)_row is a certified bound for
/// column_strategy mu. lower_value <= game value <= upper_value always holds,
/// so upper_value - lower_value is an exact duality gap.
struct GameLpSolution {
    std::vector<double> row_strategy;     // length = rows of G, on the simplex
    std::vector<double> column_strategy;  // length = cols of G, on the simplex
    double lower_value = 0.0;
    double upper_value = 0.0;
    std::size_t pivots = 0;
};

/// Dense two-strategy game solver via the primal simplex method on the
/// bounded reformulation max 1'w s.t. G w <= 1, w >= 0 (no phase 1 needed).
/// Entries of `payoff` must be nonnegative. Deterministic: Dantzig pricing
/// with lowest-index tie-breaking and a Bland fallback against cycling.
GameLpSolution solve_matrix_game(const DenseMatrix& payoff, double tol = 1e-9,
                                 std::size_t max_pivots = 200000);

}  // namespace kopt
