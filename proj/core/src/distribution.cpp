#include "kopt/distribution.hpp"

#include <cmath>
#include <string>

#include "kopt/errors.hpp"

namespace kopt {

DistributionVector::DistributionVector(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw InvalidDistribution("distribution must have at least one entry");
    double total = 0.0;
    for (double& w : weights_) {
        if (!std::isfinite(w)) throw InvalidDistribution("distribution weights must be finite");
        if (w < 0.0) {
            if (w < -1e-12) throw InvalidDistribution("negative weight " + std::to_string(w));
            w = 0.0;
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw InvalidDistribution("weights sum to " + std::to_string(total) + ", expected 1");
    }
}

DistributionVector DistributionVector::uniform(std::size_t m) {
    if (m == 0) throw InvalidDistribution("distribution must have at least one entry");
    return DistributionVector(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

DistributionVector DistributionVector::from_row_norms(const DenseMatrix& a) {
    std::vector<double> w(a.rows());
    double total = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        w[i] = squared_norm(a.row(i));
        total += w[i];
    }
    if (total <= 0.0) throw InvalidDistribution("matrix has no nonzero rows");
    for (double& v : w) v /= total;
    return DistributionVector(std::move(w));
}

DistributionVector DistributionVector::normalized(std::vector<double> nonnegative_weights) {
    double total = 0.0;
    for (double& w : nonnegative_weights) {
        if (w < 0.0 && w > -1e-12) w = 0.0;
        total += w;
    }
    if (!(total > 0.0)) throw ZeroDesign("cannot normalize a vector with nonpositive sum");
    for (double& w : nonnegative_weights) w /= total;
    return DistributionVector(std::move(nonnegative_weights));
}

double DistributionVector::sum() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
}

std::size_t DistributionVector::sparsity_count() const {
    std::size_t count = 0;
    for (double w : weights_) {
        if (w < kSparsityThreshold) ++count;
    }
    return count;
}

}  // namespace kopt
