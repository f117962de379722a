#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kopt/matrix.hpp"

namespace kopt {

/// Threshold under which a probability is counted as a structural zero when
/// reporting the sparsity of an optimized distribution.
inline constexpr double kSparsityThreshold = 1e-5;

/// A point on the m-simplex used for row selection. Construction validates
/// nonnegativity and that the weights sum to 1 within 1e-9; entries in
/// [-1e-12, 0) are clamped to zero.
class DistributionVector {
  public:
    explicit DistributionVector(std::vector<double> weights);

    static DistributionVector uniform(std::size_t m);
    /// p_i = ||a_i||^2 / ||A||_F^2, the classical row-norm selection rule.
    static DistributionVector from_row_norms(const DenseMatrix& a);
    /// Normalizes a nonnegative vector to unit sum. Throws ZeroDesign when the
    /// sum is not positive.
    static DistributionVector normalized(std::vector<double> nonnegative_weights);

    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::span<const double> weights() const { return weights_; }

    double sum() const;
    /// Number of entries below kSparsityThreshold.
    std::size_t sparsity_count() const;

  private:
    std::vector<double> weights_;
};

}  // namespace kopt
