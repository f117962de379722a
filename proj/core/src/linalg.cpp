#include "kopt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kopt/errors.hpp"

namespace kopt {

NormalizedSystem row_normalize(const DenseMatrix& a, std::vector<double> b) {
    if (b.size() != a.rows()) {
        throw DimensionMismatch("rhs length " + std::to_string(b.size()) + " != row count " +
                                std::to_string(a.rows()));
    }
    DenseMatrix unit_rows(a.rows(), a.cols());
    std::vector<double> row_norms(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double nrm = norm(a.row(i));
        if (!(nrm >= 1e-300)) throw ZeroRow(i);
        row_norms[i] = nrm;
        for (std::size_t j = 0; j < a.cols(); ++j) unit_rows(i, j) = a(i, j) / nrm;
    }
    return NormalizedSystem{std::move(unit_rows), std::move(row_norms), std::move(b)};
}

SymmetricMatrix weighted_gram(const DenseMatrix& b, std::span<const double> weights) {
    if (weights.size() != b.rows()) {
        throw DimensionMismatch("weight length " + std::to_string(weights.size()) +
                                " != row count " + std::to_string(b.rows()));
    }
    const std::size_t n = b.cols();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < b.rows(); ++i) {
        const double w = weights[i];
        if (w == 0.0) continue;
        const auto row = b.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double wj = w * row[j];
            for (std::size_t k = j; k < n; ++k) m[j * n + k] += wj * row[k];
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) m[k * n + j] = m[j * n + k];
    }
    return SymmetricMatrix::from_entries(n, std::move(m));
}

SymmetricMatrix weighted_gram(const DenseMatrix& b, const DistributionVector& p) {
    return weighted_gram(b, p.weights());
}

EigenDecomposition eig_symmetric(const SymmetricMatrix& m, double tol, int max_sweeps) {
    const std::size_t n = m.dim();
    if (n > kEigDimCap) {
        throw InvalidArgument("eigensolver dimension " + std::to_string(n) + " exceeds cap " +
                              std::to_string(kEigDimCap));
    }
    std::vector<double> a = m.data();
    DenseMatrix v = DenseMatrix::identity(n);
    const double norm_f = m.frobenius_norm();

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
        }
        return std::sqrt(2.0 * s);
    };

    int sweep = 0;
    if (norm_f > 0.0) {
        for (; sweep < max_sweeps; ++sweep) {
            if (off_norm() <= tol * norm_f) break;
            for (std::size_t p = 0; p + 1 < n; ++p) {
                for (std::size_t q = p + 1; q < n; ++q) {
                    const double apq = a[p * n + q];
                    if (std::abs(apq) <= 1e-3 * tol * norm_f / static_cast<double>(n)) continue;
                    const double app = a[p * n + p];
                    const double aqq = a[q * n + q];
                    const double tau = (aqq - app) / (2.0 * apq);
                    const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                     (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = t * c;

                    // rotate rows/columns p and q of A
                    for (std::size_t k = 0; k < n; ++k) {
                        const double akp = a[k * n + p];
                        const double akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for (std::size_t k = 0; k < n; ++k) {
                        const double apk = a[p * n + k];
                        const double aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    // enforce exact symmetry of the rotated pair
                    a[p * n + q] = a[q * n + p];

                    for (std::size_t k = 0; k < n; ++k) {
                        const double vkp = v(k, p);
                        const double vkq = v(k, q);
                        v(k, p) = c * vkp - s * vkq;
                        v(k, q) = s * vkp + c * vkq;
                    }
                }
            }
        }
        if (off_norm() > tol * norm_f) {
            throw ConvergenceFailure("Jacobi eigensolver did not converge in " +
                                         std::to_string(max_sweeps) + " sweeps",
                                     static_cast<std::size_t>(max_sweeps));
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a[i * n + i] < a[j * n + j]; });

    std::vector<double> values(n);
    DenseMatrix vectors(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        values[k] = a[order[k] * n + order[k]];
        for (std::size_t i = 0; i < n; ++i) vectors(i, k) = v(i, order[k]);
    }
    return EigenDecomposition{std::move(values), std::move(vectors), sweep};
}

EigExtremes eig_extremes(const SymmetricMatrix& m, double tol) {
    EigenDecomposition d = eig_symmetric(m, tol);
    const std::size_t n = m.dim();
    std::vector<double> min_vec(n);
    for (std::size_t i = 0; i < n; ++i) min_vec[i] = d.vectors(i, 0);
    return EigExtremes{d.values.front(), d.values.back(), std::move(min_vec)};
}

SpdFactorization SpdFactorization::factor(const SymmetricMatrix& m) {
    const std::size_t n = m.dim();
    std::vector<double> l(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l[j * n + k] * l[j * n + k];
        if (!(diag > 0.0)) {
            throw NotPositiveDefinite("nonpositive pivot " + std::to_string(diag) +
                                      " at column " + std::to_string(j));
        }
        const double ljj = std::sqrt(diag);
        l[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
            l[i * n + j] = s / ljj;
        }
    }
    return SpdFactorization(n, std::move(l));
}

std::vector<double> SpdFactorization::solve(std::span<const double> y) const {
    if (y.size() != dim_) {
        throw DimensionMismatch("solve: vector length " + std::to_string(y.size()) + " != dim " +
                                std::to_string(dim_));
    }
    std::vector<double> z(y.begin(), y.end());
    // forward: L z = y
    for (std::size_t i = 0; i < dim_; ++i) {
        double s = z[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower_[i * dim_ + k] * z[k];
        z[i] = s / lower_[i * dim_ + i];
    }
    // backward: L^T x = z
    for (std::size_t ii = dim_; ii-- > 0;) {
        double s = z[ii];
        for (std::size_t k = ii + 1; k < dim_; ++k) s -= lower_[k * dim_ + ii] * z[k];
        z[ii] = s / lower_[ii * dim_ + ii];
    }
    return z;
}

double SpdFactorization::log_determinant() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += std::log(lower_[i * dim_ + i]);
    return 2.0 * s;
}

double logdet(const SymmetricMatrix& m) {
    return SpdFactorization::factor(m).log_determinant();
}

std::vector<double> solve_spd(const SymmetricMatrix& m, std::span<const double> y) {
    return SpdFactorization::factor(m).solve(y);
}

bool has_full_column_rank(const DenseMatrix& b) {
    const auto gram = weighted_gram(b, std::vector<double>(b.rows(), 1.0));
    const auto ext = eig_extremes(gram);
    if (ext.lambda_max <= 0.0) return false;
    return ext.lambda_min > kRankTolerance * kRankTolerance * ext.lambda_max;
}

}  // namespace kopt
