#pragma once

#include <cstddef>

#include "kopt/distribution.hpp"
#include "kopt/matrix.hpp"

namespace kopt {

/// Per-step contraction factors for the expected squared error of the
/// randomized sweep: upper_factor = 1 - lambda_min(B^T D(p) B) and
/// lower_factor = 1 - lambda_max(B^T D(p) B). Both lie in [0, 1] and
/// lower_factor <= upper_factor.
struct RatePair {
    double upper_factor;
    double lower_factor;
};

/// Contraction factors for a unit-row, full-column-rank B under selection
/// distribution p.
RatePair rate_pair(const DenseMatrix& b, const DistributionVector& p);

/// ||A||_F / sigma_min(A), computed from the spectrum of A^T A. Throws
/// RankDeficient below the rank tolerance. Always >= sqrt(cols).
double scaled_condition_number(const DenseMatrix& a);

struct ErrorEnvelope {
    double lower;
    double upper;
};

/// Two-sided prediction for the expected squared error after `steps` steps:
/// [lower_factor^k, upper_factor^k] * initial_sq_error.
ErrorEnvelope envelope(double initial_sq_error, const RatePair& rates, std::size_t steps);

/// The classical per-step rate for row-norm selection: 1 - kappa(A)^-2.
double classical_rate(const DenseMatrix& a);

}  // namespace kopt
