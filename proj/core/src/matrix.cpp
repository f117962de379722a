#include "kopt/matrix.hpp"

#include <cmath>
#include <string>

#include "kopt/errors.hpp"

namespace kopt {

namespace {

void check_shape(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw InvalidArgument("matrix dimensions must be positive, got " + std::to_string(rows) +
                              "x" + std::to_string(cols));
    }
}

void check_finite(const std::vector<double>& entries) {
    for (double v : entries) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("matrix entries must be finite");
        }
    }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {
    check_shape(rows, cols);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    check_shape(rows, cols);
    if (entries_.size() != rows * cols) {
        throw DimensionMismatch("entry count " + std::to_string(entries_.size()) +
                                " does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
    }
    check_finite(entries_);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
    if (x.size() != cols_) {
        throw DimensionMismatch("multiply: vector length " + std::to_string(x.size()) +
                                " != cols " + std::to_string(cols_));
    }
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) y[i] = dot(row(i), x);
    return y;
}

std::vector<double> DenseMatrix::transpose_multiply(std::span<const double> x) const {
    if (x.size() != rows_) {
        throw DimensionMismatch("transpose_multiply: vector length " + std::to_string(x.size()) +
                                " != rows " + std::to_string(rows_));
    }
    std::vector<double> y(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) axpy(x[i], row(i), y);
    return y;
}

double DenseMatrix::frobenius_norm() const {
    return norm(entries_);
}

SymmetricMatrix SymmetricMatrix::from_dense(const DenseMatrix& m) {
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("symmetric matrix must be square, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    return from_entries(m.rows(), m.data());
}

SymmetricMatrix SymmetricMatrix::from_entries(std::size_t dim, std::vector<double> entries) {
    if (dim == 0) throw InvalidArgument("symmetric matrix dimension must be positive");
    if (entries.size() != dim * dim) {
        throw DimensionMismatch("symmetric entry count does not match dimension");
    }
    double scale = 0.0;
    for (double v : entries) {
        if (!std::isfinite(v)) throw InvalidArgument("symmetric matrix entries must be finite");
        scale = std::max(scale, std::abs(v));
    }
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i + 1; j < dim; ++j) {
            const double a = entries[i * dim + j];
            const double b = entries[j * dim + i];
            if (std::abs(a - b) > 1e-14 * scale) {
                throw InvalidArgument("matrix is not symmetric at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
            }
            const double avg = 0.5 * (a + b);
            entries[i * dim + j] = avg;
            entries[j * dim + i] = avg;
        }
    }
    return SymmetricMatrix(dim, std::move(entries));
}

double SymmetricMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += entries_[i * dim_ + i];
    return t;
}

double SymmetricMatrix::frobenius_norm() const {
    return norm(entries_);
}

SymmetricMatrix SymmetricMatrix::shifted(double c) const {
    std::vector<double> shifted_entries = entries_;
    for (std::size_t i = 0; i < dim_; ++i) shifted_entries[i * dim_ + i] += c;
    return SymmetricMatrix(dim_, std::move(shifted_entries));
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double squared_norm(std::span<const double> a) {
    return dot(a, a);
}

double norm(std::span<const double> a) {
    return std::sqrt(squared_norm(a));
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace kopt
