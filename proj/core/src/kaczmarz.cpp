#include "kopt/kaczmarz.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kopt/errors.hpp"

namespace kopt {

RowSampler::RowSampler(const DistributionVector& p, std::uint64_t seed)
    : categories_(p.size()), rng_(seed) {
    if (categories_ < kAliasThreshold) {
        cumulative_.resize(categories_);
        double acc = 0.0;
        for (std::size_t i = 0; i < categories_; ++i) {
            acc += p[i];
            cumulative_[i] = acc;
        }
        cumulative_.back() = 1.0;  // guard the final bin against rounding
    } else {
        // Vose alias construction; worklists processed in ascending index
        // order so the table is a pure function of p.
        const double m = static_cast<double>(categories_);
        std::vector<double> scaled(categories_);
        std::vector<std::size_t> small, large;
        for (std::size_t i = 0; i < categories_; ++i) {
            scaled[i] = p[i] * m;
            (scaled[i] < 1.0 ? small : large).push_back(i);
        }
        alias_prob_.assign(categories_, 1.0);
        alias_index_.resize(categories_);
        for (std::size_t i = 0; i < categories_; ++i) alias_index_[i] = i;
        std::size_t small_pos = 0, large_pos = 0;
        while (small_pos < small.size() && large_pos < large.size()) {
            const std::size_t s = small[small_pos++];
            const std::size_t l = large[large_pos];
            alias_prob_[s] = scaled[s];
            alias_index_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if (scaled[l] < 1.0) {
                small.push_back(l);
                ++large_pos;
            }
        }
    }
}

std::size_t RowSampler::draw() {
    const double u = rng_.next_double();
    if (!cumulative_.empty()) {
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return static_cast<std::size_t>(it - cumulative_.begin());
    }
    const double scaled = u * static_cast<double>(categories_);
    std::size_t cell = static_cast<std::size_t>(scaled);
    if (cell >= categories_) cell = categories_ - 1;
    const double coin = scaled - static_cast<double>(cell);
    return coin < alias_prob_[cell] ? cell : alias_index_[cell];
}

RowSampler build_sampler(const DistributionVector& p, std::uint64_t seed) {
    return RowSampler(p, seed);
}

std::vector<double> project_row(std::span<const double> x, std::span<const double> a_row,
                                double b_val) {
    if (x.size() != a_row.size()) {
        throw DimensionMismatch("project_row: x length " + std::to_string(x.size()) +
                                " != row length " + std::to_string(a_row.size()));
    }
    const double row_sq = squared_norm(a_row);
    if (!(row_sq >= 1e-300)) throw ZeroRow(0);
    std::vector<double> out(x.begin(), x.end());
    const double step = (b_val - dot(a_row, x)) / row_sq;
    axpy(step, a_row, out);
    return out;
}

namespace {

struct RowSelector {
    const SelectionScheme& scheme;
    std::size_t row_count;
    std::optional<RowSampler> sampler;

    RowSelector(const SelectionScheme& s, std::size_t m) : scheme(s), row_count(m) {
        if (const auto* randomized = std::get_if<Randomized>(&s)) {
            if (randomized->p.size() != m) {
                throw DimensionMismatch("selection distribution length does not match row count");
            }
            sampler.emplace(randomized->p, randomized->seed);
        }
    }

    std::size_t pick(std::size_t step) {
        if (sampler) return sampler->draw();
        return cyclic_index(step, row_count);
    }
};

TrajectoryRecord run_projection_loop(const DenseMatrix& rows, std::span<const double> rhs,
                                     std::span<const double> x0, const SelectionScheme& scheme,
                                     std::size_t steps,
                                     const std::optional<std::vector<double>>& truth) {
    const std::size_t m = rows.rows();
    const std::size_t n = rows.cols();
    if (x0.size() != n) {
        throw DimensionMismatch("x0 length " + std::to_string(x0.size()) + " != column count " +
                                std::to_string(n));
    }
    if (truth && truth->size() != n) {
        throw DimensionMismatch("truth length does not match column count");
    }

    // Row norms are needed every step; reject zero rows up front.
    std::vector<double> row_sq(m);
    for (std::size_t i = 0; i < m; ++i) {
        row_sq[i] = squared_norm(rows.row(i));
        if (!(row_sq[i] >= 1e-300)) throw ZeroRow(i);
    }

    if (truth) {
        // consistency precheck: the stated solution must solve the system
        const auto residual = rows.multiply(*truth);
        double res_sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double r = residual[i] - rhs[i];
            res_sq += r * r;
        }
        const double scale = std::max(1.0, norm(rhs));
        if (std::sqrt(res_sq) > 1e-10 * scale) {
            throw InvalidArgument("truth vector does not solve the system (residual " +
                                  std::to_string(std::sqrt(res_sq)) + ")");
        }
    }

    RowSelector selector(scheme, m);
    std::vector<double> x(x0.begin(), x0.end());

    TrajectoryRecord record;
    record.residual_mode = !truth.has_value();
    record.squared_errors.reserve(steps + 1);
    record.selected_rows.reserve(steps);

    auto record_error = [&]() {
        if (truth) {
            double err = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double d = x[j] - (*truth)[j];
                err += d * d;
            }
            record.squared_errors.push_back(err);
        } else {
            const auto ax = rows.multiply(x);
            double err = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double d = ax[i] - rhs[i];
                err += d * d;
            }
            record.squared_errors.push_back(err);
        }
    };

    record_error();
    for (std::size_t k = 0; k < steps; ++k) {
        const std::size_t i = selector.pick(k);
        record.selected_rows.push_back(i);
        const auto row = rows.row(i);
        const double step = (rhs[i] - dot(row, x)) / row_sq[i];
        axpy(step, row, x);
        record_error();
    }
    return record;
}

}  // namespace

TrajectoryRecord run_solver(const DenseMatrix& a, std::span<const double> b,
                            std::span<const double> x0, const SelectionScheme& scheme,
                            std::size_t steps, const std::optional<std::vector<double>>& truth) {
    if (b.size() != a.rows()) {
        throw DimensionMismatch("rhs length " + std::to_string(b.size()) + " != row count " +
                                std::to_string(a.rows()));
    }
    return run_projection_loop(a, b, x0, scheme, steps, truth);
}

TrajectoryRecord run_solver(const NormalizedSystem& system, std::span<const double> x0,
                            const SelectionScheme& scheme, std::size_t steps,
                            const std::optional<std::vector<double>>& truth) {
    std::vector<double> scaled_rhs(system.rhs.size());
    for (std::size_t i = 0; i < scaled_rhs.size(); ++i) {
        scaled_rhs[i] = system.rhs[i] / system.row_norms[i];
    }
    return run_projection_loop(system.unit_rows, scaled_rhs, x0, scheme, steps, truth);
}

double one_step_expected_factor(const DenseMatrix& b, const DistributionVector& p,
                                std::span<const double> y) {
    if (y.size() != b.cols()) {
        throw DimensionMismatch("direction length does not match column count");
    }
    const double y_sq = squared_norm(y);
    if (!(y_sq > 0.0)) throw ZeroVector("direction vector must be nonzero");
    const SymmetricMatrix m = weighted_gram(b, p);
    const std::size_t n = m.dim();
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        quad += y[i] * dot(std::span(m.data()).subspan(i * n, n), y);
    }
    const double factor = 1.0 - quad / y_sq;
    return std::clamp(factor, 0.0, 1.0);
}

}  // namespace kopt
