#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "kopt/distribution.hpp"
#include "kopt/linalg.hpp"
#include "kopt/matrix.hpp"
#include "kopt/rng.hpp"

namespace kopt {

/// Categorical samplers switch from a cumulative table with binary search to
/// an alias table at this category count.
inline constexpr std::size_t kAliasThreshold = 64;

/// Draws row indices i with probability p_i. Identical (p, seed) pairs
/// reproduce identical draw sequences.
class RowSampler {
  public:
    RowSampler(const DistributionVector& p, std::uint64_t seed);

    std::size_t draw();
    std::size_t categories() const { return categories_; }

  private:
    std::size_t categories_;
    rng::SplitMix64 rng_;
    std::vector<double> cumulative_;       // used when categories < kAliasThreshold
    std::vector<double> alias_prob_;       // otherwise: Vose alias table
    std::vector<std::size_t> alias_index_;
};

RowSampler build_sampler(const DistributionVector& p, std::uint64_t seed);

/// Orthogonal projection of x onto the hyperplane {z : a_row . z = b_val}.
std::vector<double> project_row(std::span<const double> x, std::span<const double> a_row,
                                double b_val);

/// Zero-based sweep order: 0, 1, ..., m-1, 0, ...
inline std::size_t cyclic_index(std::size_t k, std::size_t m) {
    return k % m;
}

struct Cyclic {};
struct Randomized {
    DistributionVector p;
    std::uint64_t seed;
};
using SelectionScheme = std::variant<Cyclic, Randomized>;

/// One solver run. When a truth vector was supplied, squared_errors[j] is
/// ||x_j - x||^2; otherwise (residual_mode) it is ||A x_j - b||^2.
struct TrajectoryRecord {
    std::vector<double> squared_errors;      // steps + 1 entries
    std::vector<std::size_t> selected_rows;  // steps entries
    bool residual_mode;
};

/// Runs `steps` projection steps on the raw system (A, b).
TrajectoryRecord run_solver(const DenseMatrix& a, std::span<const double> b,
                            std::span<const double> x0, const SelectionScheme& scheme,
                            std::size_t steps,
                            const std::optional<std::vector<double>>& truth = std::nullopt);

/// Same iteration driven by the unit-row form; the projection step is
/// scale-invariant, so this produces the iterates of the original system.
TrajectoryRecord run_solver(const NormalizedSystem& system, std::span<const double> x0,
                            const SelectionScheme& scheme, std::size_t steps,
                            const std::optional<std::vector<double>>& truth = std::nullopt);

/// Expected one-step contraction of the squared error in direction y:
/// 1 - y^T M y / ||y||^2 with M = weighted_gram(B, p). Lies in [0, 1].
double one_step_expected_factor(const DenseMatrix& b, const DistributionVector& p,
                                std::span<const double> y);

}  // namespace kopt
