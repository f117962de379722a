#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kopt {

/// Dense real matrix, row-major storage. Entries are validated to be finite
/// on construction from raw data; in-place writes through operator() are the
/// caller's responsibility.
class DenseMatrix {
  public:
    DenseMatrix(std::size_t rows, std::size_t cols);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {entries_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) { return {entries_.data() + i * cols_, cols_}; }

    const std::vector<double>& data() const { return entries_; }

    /// y = A x
    std::vector<double> multiply(std::span<const double> x) const;
    /// y = A^T x
    std::vector<double> transpose_multiply(std::span<const double> x) const;

    double frobenius_norm() const;

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> entries_;
};

/// Square symmetric matrix. Factory functions enforce the symmetry tolerance
/// |M(i,j) - M(j,i)| <= 1e-14 * max|entry| and store the symmetrized average.
class SymmetricMatrix {
  public:
    static SymmetricMatrix from_dense(const DenseMatrix& m);
    /// n x n row-major entries, checked like from_dense.
    static SymmetricMatrix from_entries(std::size_t dim, std::vector<double> entries);

    std::size_t dim() const { return dim_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

    double trace() const;
    double frobenius_norm() const;
    const std::vector<double>& data() const { return entries_; }

    /// M + c I, used by spectral-shift tests and shifted solves.
    SymmetricMatrix shifted(double c) const;

  private:
    SymmetricMatrix(std::size_t dim, std::vector<double> entries)
        : dim_(dim), entries_(std::move(entries)) {}

    std::size_t dim_;
    std::vector<double> entries_;
};

// Small dense-vector helpers shared across the library.
double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double norm(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace kopt
