#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "kopt/distribution.hpp"
#include "kopt/errors.hpp"
#include "kopt/matrix.hpp"

namespace kopt {

enum class Method { Maximin, LPRelax, DOptimal };

std::string method_name(Method method);

/// Output of a distribution optimizer. t_hat is the smallest eigenvalue of
/// the weighted Gram matrix at p_hat (for LPRelax: the relaxed objective);
/// certificate_gap bounds the distance to the method's own optimum.
struct OptimizerResult {
    DistributionVector p_hat;
    double t_hat;
    double certificate_gap;
    std::size_t iterations;
    Method method_tag;
    std::size_t sparsity_count;  // entries of p_hat below kSparsityThreshold
};

/// Raised when an optimizer exhausts its budget; carries the best iterate.
struct MaximinConvergenceFailure : ConvergenceFailure {
    MaximinConvergenceFailure(const std::string& what, std::size_t iterations,
                              OptimizerResult best_so_far)
        : ConvergenceFailure(what, iterations), best(std::move(best_so_far)) {}
    OptimizerResult best;
};

struct MaximinOptions {
    /// Frank-Wolfe warm-start iterations before the cutting-plane stage.
    std::size_t frank_wolfe_iterations = 120;
    /// Pairwise away-step variant of the Frank-Wolfe stage.
    bool away_steps = false;
};

/// Maximizes lambda_min(B^T D(p) B) over the selection simplex.
///
/// The objective is concave in p with exact supergradients g_i = (b_i^T u)^2
/// for a minimal unit eigenvector u (averaged over an eigenbasis when the
/// smallest eigenvalue is clustered within 1e-8). Stage one runs Frank-Wolfe
/// with step 2/(k+2) over the simplex; since the vertex linearization
/// f(e_i) <= f(p) + g^T(e_i - p) collapses to max_i g_i, every iterate also
/// yields a certified upper bound. Stage two closes the remaining gap by an
/// exchange method: minimal-eigenspace directions accumulate as columns of a
/// matrix game whose exact LP solution supplies both an improved iterate and
/// a dual witness W = sum_c mu_c y_c y_c^T with bound max_i b_i^T W b_i.
/// Terminates when the certified gap falls below tol.
OptimizerResult optimize_maximin(const DenseMatrix& b, double tol = 1e-8,
                                 std::size_t max_iters = 2000,
                                 const MaximinOptions& options = {});

/// Diagonal relaxation of the semidefinite constraint: maximize t subject to
/// sum_i p_i B(i,j)^2 >= t for every column j, p on the simplex. Solved
/// exactly as a matrix game LP.
OptimizerResult optimize_lp(const DenseMatrix& b, double tol = 1e-9);

/// Per-iteration trail of the multiplicative D-optimal update, for callers
/// that want to inspect monotonicity.
struct DoptTrace {
    std::vector<std::vector<double>> iterates;  // iters + 1 entries
    std::vector<double> logdets;                // iters + 1 entries
};

/// Multiplicative D-optimal design iteration
///   p_i <- p_i * (b_i^T M(p)^{-1} b_i) / n,
/// run exactly `iters` times from a strictly positive start. The update
/// preserves the simplex identically (sum_i p_i b_i^T M^{-1} b_i = n) and is
/// an ascent scheme for logdet M(p).
OptimizerResult optimize_dopt(const DistributionVector& row_norm_init, const DenseMatrix& b,
                              std::size_t iters = 10, DoptTrace* trace = nullptr);

/// Nonnegative design weights q; the unnormalized form of a distribution
/// (q = p / t).
struct UnnormalizedDesign {
    std::vector<double> q;
};

/// p = q / (1'q), t = 1 / (1'q). Throws ZeroDesign when 1'q <= 0.
std::pair<DistributionVector, double> p_from_q(const UnnormalizedDesign& design);

/// q = p / t. Throws NonPositiveT when t <= 0.
UnnormalizedDesign q_from_p(const DistributionVector& p, double t);

/// The row rescaling that realizes the optimized rate as a condition number:
/// rows sqrt(p_hat_i) * b_i, so that kappa^2 of the result equals 1 / t_hat.
DenseMatrix kappa_optimal_rescaling(const DenseMatrix& b, const OptimizerResult& result);

}  // namespace kopt
