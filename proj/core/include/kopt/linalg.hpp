#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kopt/distribution.hpp"
#include "kopt/matrix.hpp"

namespace kopt {

/// Eigensolves are restricted to this dimension; the library targets
/// desk-scale problems and keeps everything dense.
inline constexpr std::size_t kEigDimCap = 512;

/// Relative rank tolerance: a matrix counts as full column rank when
/// sigma_min > kRankTolerance * sigma_max.
inline constexpr double kRankTolerance = 1e-10;

/// A linear system with unit-norm rows: B(i,:) = A(i,:)/||A(i,:)||, together
/// with the original row norms and (unscaled) right-hand side.
struct NormalizedSystem {
    DenseMatrix unit_rows;
    std::vector<double> row_norms;
    std::vector<double> rhs;
};

/// Builds the NormalizedSystem for (A, b). Throws ZeroRow when a row norm is
/// below 1e-300 and DimensionMismatch when b has the wrong length.
NormalizedSystem row_normalize(const DenseMatrix& a, std::vector<double> b);

/// M = sum_i w_i b_i b_i^T. For a unit-row B and a simplex weight vector the
/// result has unit trace.
SymmetricMatrix weighted_gram(const DenseMatrix& b, std::span<const double> weights);
SymmetricMatrix weighted_gram(const DenseMatrix& b, const DistributionVector& p);

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues ascending; vectors(i, k) holds component i of eigenvector k.
struct EigenDecomposition {
    std::vector<double> values;
    DenseMatrix vectors;
    int sweeps;
};

EigenDecomposition eig_symmetric(const SymmetricMatrix& m, double tol = 1e-13,
                                 int max_sweeps = 64);

struct EigExtremes {
    double lambda_min;
    double lambda_max;
    std::vector<double> min_vector;  // unit eigenvector for lambda_min
};

/// Extreme eigenvalues (and the minimal eigenvector) of a symmetric matrix.
EigExtremes eig_extremes(const SymmetricMatrix& m, double tol = 1e-13);

/// Cholesky factorization of a symmetric positive definite matrix. Throws
/// NotPositiveDefinite on a nonpositive pivot.
class SpdFactorization {
  public:
    static SpdFactorization factor(const SymmetricMatrix& m);

    std::vector<double> solve(std::span<const double> y) const;
    double log_determinant() const;
    std::size_t dim() const { return dim_; }

  private:
    SpdFactorization(std::size_t dim, std::vector<double> lower)
        : dim_(dim), lower_(std::move(lower)) {}

    std::size_t dim_;
    std::vector<double> lower_;  // row-major lower triangle, full storage
};

double logdet(const SymmetricMatrix& m);
std::vector<double> solve_spd(const SymmetricMatrix& m, std::span<const double> y);

/// True when sigma_min(B) > kRankTolerance * sigma_max(B), computed from the
/// spectrum of B^T B.
bool has_full_column_rank(const DenseMatrix& b);

}  // namespace kopt
