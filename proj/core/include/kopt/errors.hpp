#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kopt {

/// Base class for every error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

/// A matrix row whose norm is (numerically) zero; carries the offending index.
struct ZeroRow : Error {
    explicit ZeroRow(std::size_t row_index)
        : Error("row " + std::to_string(row_index) + " has zero norm"), row(row_index) {}
    std::size_t row;
};

struct ZeroVector : Error {
    using Error::Error;
};

struct InvalidDistribution : Error {
    using Error::Error;
};

struct NotPositiveDefinite : Error {
    using Error::Error;
};

struct RankDeficient : Error {
    using Error::Error;
};

struct ZeroDesign : Error {
    using Error::Error;
};

struct NonPositiveT : Error {
    using Error::Error;
};

struct ConvergenceFailure : Error {
    ConvergenceFailure(const std::string& what, std::size_t iteration_count)
        : Error(what), iterations(iteration_count) {}
    std::size_t iterations;
};

/// File-system failure; message always contains the offending path.
struct IoError : Error {
    using Error::Error;
};

}  // namespace kopt
