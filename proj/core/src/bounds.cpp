#include "kopt/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "kopt/errors.hpp"
#include "kopt/linalg.hpp"

namespace kopt {

RatePair rate_pair(const DenseMatrix& b, const DistributionVector& p) {
    const auto gram = weighted_gram(b, p);
    const auto ext = eig_extremes(gram);
    const double upper = std::clamp(1.0 - ext.lambda_min, 0.0, 1.0);
    const double lower = std::clamp(1.0 - ext.lambda_max, 0.0, 1.0);
    return RatePair{upper, lower};
}

namespace {

// lambda_min / lambda_max of A^T A, shared by the kappa-style quantities.
EigExtremes gram_extremes(const DenseMatrix& a) {
    const auto gram = weighted_gram(a, std::vector<double>(a.rows(), 1.0));
    auto ext = eig_extremes(gram);
    if (!(ext.lambda_max > 0.0) ||
        ext.lambda_min <= kRankTolerance * kRankTolerance * ext.lambda_max) {
        throw RankDeficient("matrix is not of full column rank at tolerance " +
                            std::to_string(kRankTolerance));
    }
    return ext;
}

double squared_frobenius(const DenseMatrix& a) {
    return squared_norm(a.data());
}

}  // namespace

double scaled_condition_number(const DenseMatrix& a) {
    const auto ext = gram_extremes(a);
    return std::sqrt(squared_frobenius(a) / ext.lambda_min);
}

ErrorEnvelope envelope(double initial_sq_error, const RatePair& rates, std::size_t steps) {
    const double k = static_cast<double>(steps);
    return ErrorEnvelope{std::pow(rates.lower_factor, k) * initial_sq_error,
                         std::pow(rates.upper_factor, k) * initial_sq_error};
}

double classical_rate(const DenseMatrix& a) {
    const auto ext = gram_extremes(a);
    return 1.0 - ext.lambda_min / squared_frobenius(a);
}

}  // namespace kopt
