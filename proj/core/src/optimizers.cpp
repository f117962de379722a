#include "kopt/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "kopt/linalg.hpp"
#include "kopt/lp.hpp"

namespace kopt {

std::string method_name(Method method) {
    switch (method) {
        case Method::Maximin: return "maximin";
        case Method::LPRelax: return "lp";
        case Method::DOptimal: return "dopt";
    }
    return "unknown";
}

namespace {

constexpr double kUnitRowTol = 1e-9;
constexpr double kClusterTol = 1e-8;   // eigenvalue gap below which lambda_min counts as degenerate
constexpr double kCutDedupTol = 1e-10;

void require_unit_rows(const DenseMatrix& b) {
    for (std::size_t i = 0; i < b.rows(); ++i) {
        if (std::abs(norm(b.row(i)) - 1.0) > kUnitRowTol) {
            throw InvalidArgument("row " + std::to_string(i) + " is not unit length");
        }
    }
}

// One objective evaluation: the spectrum of the weighted Gram matrix at p.
// Supergradients have the form g_i = b_i^T W b_i for a unit-trace PSD weight
// matrix W built on the bottom of the spectrum; max_i g_i is then a valid
// upper bound on the optimum for any such W, because
// lambda_min(M(p')) <= tr(M(p') W) <= max_i g_i for every simplex point p'.
struct Eval {
    std::vector<double> p;
    EigenDecomposition eig;
    double lambda_min;
    double lambda_max;

    Eval(const DenseMatrix& rows, std::vector<double> point)
        : p(std::move(point)), eig(eig_symmetric(weighted_gram(rows, p))) {
        lambda_min = eig.values.front();
        lambda_max = eig.values.back();
    }

    std::size_t cluster_size(double margin = 0.0) const {
        const double cap = lambda_min +
                           std::max(margin, kClusterTol * std::max(1.0, std::abs(lambda_max)));
        std::size_t r = 0;
        while (r < eig.values.size() && eig.values[r] <= cap) ++r;
        return r;
    }

    std::vector<double> eigenvector(std::size_t k) const {
        std::vector<double> u(eig.vectors.rows());
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = eig.vectors(i, k);
        return u;
    }
};

struct Supergradient {
    std::vector<double> g;
    double vertex_ub;                            // max_i g_i
    std::vector<std::size_t> support;            // eigenvector indices with weight
};

// g_i = sum_j omega_j (b_i^T v_j)^2 for spectral weights omega on the
// eigenbasis of M(p).
Supergradient weighted_supergradient(const DenseMatrix& rows, const Eval& ev,
                                     const std::vector<double>& omega) {
    const std::size_t m = rows.rows();
    const std::size_t d = rows.cols();
    Supergradient out;
    out.g.assign(m, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        if (omega[j] <= 1e-18) continue;
        out.support.push_back(j);
        for (std::size_t i = 0; i < m; ++i) {
            double c = 0.0;
            for (std::size_t a = 0; a < d; ++a) c += rows(i, a) * ev.eig.vectors(a, j);
            out.g[i] += omega[j] * c * c;
        }
    }
    out.vertex_ub = *std::max_element(out.g.begin(), out.g.end());
    return out;
}

// Equal weights over the bottom eigenvalue cluster.
Supergradient averaged_supergradient(const DenseMatrix& rows, const Eval& ev) {
    const std::size_t d = rows.cols();
    const std::size_t r = ev.cluster_size();
    std::vector<double> omega(d, 0.0);
    for (std::size_t j = 0; j < r; ++j) omega[j] = 1.0 / static_cast<double>(r);
    return weighted_supergradient(rows, ev, omega);
}

// Boltzmann weights exp(-mu (lambda_j - lambda_min)), the gradient of the
// smooth surrogate -(1/mu) log tr exp(-mu M(p)).
Supergradient softmin_supergradient(const DenseMatrix& rows, const Eval& ev, double mu) {
    const std::size_t d = rows.cols();
    std::vector<double> omega(d);
    double total = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        omega[j] = std::exp(-mu * (ev.eig.values[j] - ev.lambda_min));
        total += omega[j];
    }
    for (double& w : omega) w /= total;
    return weighted_supergradient(rows, ev, omega);
}

// Pool of unit cut directions y with cached payoff columns (b_i^T y)^2; the
// LP over the pool reweights them into the best rank-one-combination witness.
struct CutPool {
    const DenseMatrix& rows;
    std::vector<std::vector<double>> directions;
    std::vector<std::vector<double>> columns;

    explicit CutPool(const DenseMatrix& matrix) : rows(matrix) {}

    bool add(const std::vector<double>& y) {
        for (const auto& existing : directions) {
            if (std::abs(dot(existing, y)) > 1.0 - kCutDedupTol) return false;
        }
        std::vector<double> column(rows.rows());
        for (std::size_t i = 0; i < rows.rows(); ++i) {
            const double c = dot(rows.row(i), y);
            column[i] = c * c;
        }
        directions.push_back(y);
        columns.push_back(std::move(column));
        return true;
    }

    DenseMatrix payoff() const {
        DenseMatrix g(rows.rows(), columns.size());
        for (std::size_t c = 0; c < columns.size(); ++c) {
            for (std::size_t i = 0; i < rows.rows(); ++i) g(i, c) = columns[c][i];
        }
        return g;
    }

    // Keep the pool bounded: retain directions the LP still weights plus the
    // most recent arrivals.
    void prune(const std::vector<double>& column_weights, std::size_t cap) {
        if (directions.size() <= cap) return;
        std::vector<std::vector<double>> kept_dirs, kept_cols;
        const std::size_t recent = cap / 4;
        for (std::size_t c = 0; c < directions.size(); ++c) {
            const bool weighted = c < column_weights.size() && column_weights[c] > 1e-15;
            const bool fresh = c + recent >= directions.size();
            if (weighted || fresh) {
                kept_dirs.push_back(std::move(directions[c]));
                kept_cols.push_back(std::move(columns[c]));
            }
        }
        directions = std::move(kept_dirs);
        columns = std::move(kept_cols);
    }
};

struct EngineResult {
    std::vector<double> p;
    double lambda;
    double ub;
    std::size_t iterations;
    // Rank-one directions of the witness behind `ub`; lifting them into an
    // enclosing problem reproduces the bound there.
    std::vector<std::vector<double>> witness_directions;
};

// Exact maximization of the concave map t -> lambda_min((1-t) M0 + t M1)
// on [0, 1] by golden-section search. The Gram matrix is affine in p, so a
// segment between two distributions costs one small eigensolve per probe.
double segment_line_search(const SymmetricMatrix& m0, const SymmetricMatrix& m1) {
    const std::size_t n = m0.dim();
    auto lambda_at = [&](double t) {
        std::vector<double> entries(n * n);
        for (std::size_t k = 0; k < entries.size(); ++k) {
            entries[k] = (1.0 - t) * m0.data()[k] + t * m1.data()[k];
        }
        return eig_symmetric(SymmetricMatrix::from_entries(n, std::move(entries))).values.front();
    };
    constexpr double kInvPhi = 0.6180339887498949;
    double lo = 0.0, hi = 1.0;
    double t1 = hi - kInvPhi * (hi - lo);
    double t2 = lo + kInvPhi * (hi - lo);
    double f1 = lambda_at(t1);
    double f2 = lambda_at(t2);
    for (int it = 0; it < 28; ++it) {
        if (f1 < f2) {
            lo = t1;
            t1 = t2;
            f1 = f2;
            t2 = lo + kInvPhi * (hi - lo);
            f2 = lambda_at(t2);
        } else {
            hi = t2;
            t2 = t1;
            f2 = f1;
            t1 = hi - kInvPhi * (hi - lo);
            f1 = lambda_at(t1);
        }
    }
    return 0.5 * (lo + hi);
}

constexpr int kMaxDepth = 8;

EngineResult maximin_engine(const DenseMatrix& rows, double tol, std::size_t budget,
                            const MaximinOptions& options, int depth);

// Shared state of one engine invocation.
struct EngineState {
    const DenseMatrix& rows;
    double tol;
    std::size_t budget;
    int depth;

    CutPool cuts;
    std::vector<double> best_p;
    double best_lambda = -std::numeric_limits<double>::infinity();
    double best_ub = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best_witness;
    std::size_t iterations = 0;
    bool trace = false;

    EngineState(const DenseMatrix& matrix, double tolerance, std::size_t iteration_budget,
                int recursion_depth)
        : rows(matrix), tol(tolerance), budget(iteration_budget), depth(recursion_depth),
          cuts(matrix), trace(std::getenv("KOPT_MAXIMIN_TRACE") != nullptr) {}

    double gap() const { return best_ub - best_lambda; }
    bool certified() const { return gap() <= tol; }

    void absorb_lower(const Eval& ev) {
        if (ev.lambda_min > best_lambda) {
            best_lambda = ev.lambda_min;
            best_p = ev.p;
        }
    }

    void absorb_upper(double ub, std::vector<std::vector<double>> witness) {
        if (ub < best_ub) {
            best_ub = ub;
            best_witness = std::move(witness);
        }
    }

    void absorb_gradient(const Eval& ev, const Supergradient& sg) {
        absorb_lower(ev);
        std::vector<std::vector<double>> witness;
        witness.reserve(sg.support.size());
        for (std::size_t j : sg.support) witness.push_back(ev.eigenvector(j));
        for (const auto& u : witness) cuts.add(u);
        absorb_upper(sg.vertex_ub, std::move(witness));
    }
};

// Frank-Wolfe over the simplex with step 2/(k+2) and an optional away step.
// Supergradients are averaged over the bottom eigenvalue cluster.
Eval frank_wolfe_stage(EngineState& state, Eval current, const MaximinOptions& options) {
    const std::size_t m = state.rows.rows();
    const std::size_t fw_budget = std::min(options.frank_wolfe_iterations, state.budget);
    for (std::size_t k = 1; state.iterations < fw_budget && !state.certified();
         ++k, ++state.iterations) {
        const Supergradient sg = averaged_supergradient(state.rows, current);
        state.absorb_gradient(current, sg);
        if (state.certified()) break;

        std::size_t toward = 0;
        for (std::size_t i = 1; i < m; ++i) {
            if (sg.g[i] > sg.g[toward]) toward = i;
        }
        const double gamma = 2.0 / static_cast<double>(k + 2);
        std::vector<double> next = current.p;

        bool stepped_away = false;
        if (options.away_steps) {
            std::size_t away = m;
            for (std::size_t i = 0; i < m; ++i) {
                if (next[i] > 1e-15 && (away == m || sg.g[i] < sg.g[away])) away = i;
            }
            const double g_dot_p = dot(sg.g, next);
            if (away < m && next[away] < 1.0 - 1e-15 &&
                g_dot_p - sg.g[away] > sg.g[toward] - g_dot_p) {
                const double gamma_max = next[away] / (1.0 - next[away]);
                const double step = std::min(gamma, gamma_max);
                for (double& v : next) v *= 1.0 + step;
                next[away] -= step;
                stepped_away = true;
            }
        }
        if (!stepped_away) {
            for (double& v : next) v *= 1.0 - gamma;
            next[toward] += gamma;
        }
        current = Eval(state.rows, std::move(next));
    }
    state.absorb_gradient(current, averaged_supergradient(state.rows, current));
    return current;
}

// Multiplicative ascent on the soft-min surrogate: p_i <- p_i (g_i/<g,p>)^beta
// with the sharpness mu tied to the certified gap. Every gradient doubles as
// a dual witness, so the stage both raises the incumbent and tightens the
// bound. Hands over to the exchange stage once progress stalls.
Eval softmin_stage(EngineState& state, Eval current) {
    const std::size_t stage_cap = std::min(state.budget, state.iterations + 400);
    double beta = 1.0;
    std::size_t stall = 0;
    double last_best = state.best_lambda;

    while (state.iterations < stage_cap && !state.certified() && stall < 16) {
        ++state.iterations;
        const double gap_estimate =
            std::max(state.best_ub - current.lambda_min, std::max(state.tol, 1e-14));
        const double mu = std::min(1e12, 8.0 / gap_estimate);
        const Supergradient sg = softmin_supergradient(state.rows, current, mu);
        state.absorb_gradient(current, sg);
        if (state.certified()) break;

        const double g_dot_p = dot(sg.g, current.p);
        if (!(g_dot_p > 0.0)) break;  // degenerate iterate, let the exchange stage take over
        std::vector<double> next(current.p.size());
        double total = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] = current.p[i] * std::pow(sg.g[i] / g_dot_p, beta);
            total += next[i];
        }
        if (!(total > 0.0) || !std::isfinite(total)) break;
        for (double& v : next) v /= total;
        Eval candidate(state.rows, std::move(next));
        if (candidate.lambda_min >= current.lambda_min) {
            current = std::move(candidate);
            beta = std::min(beta * 1.25, 4.0);
        } else {
            beta = std::max(beta * 0.5, 0.125);
        }

        if (state.best_lambda > last_best + std::max(state.tol * 0.02, 1e-15)) {
            last_best = state.best_lambda;
            stall = 0;
        } else {
            ++stall;
        }
    }
    return current;
}

// Maximize along the segment from the incumbent to `target` and absorb the
// best point. lambda_min is concave along segments, so the search is exact.
void line_search_absorb(EngineState& state, const std::vector<double>& target) {
    ++state.iterations;
    const auto m0 = weighted_gram(state.rows, state.best_p);
    const auto m1 = weighted_gram(state.rows, target);
    const double t = segment_line_search(m0, m1);
    std::vector<double> point(target.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
        point[i] = (1.0 - t) * state.best_p[i] + t * target[i];
    }
    Eval ev(state.rows, std::move(point));
    state.absorb_gradient(ev, averaged_supergradient(state.rows, ev));
}

// The optimal witness lives in the bottom eigenspace of the optimal Gram
// matrix. Projecting the rows onto the incumbent's bottom eigenspace yields
// a maximin problem of that (small) dimension whose certified upper bound is
// a certified upper bound here as well: for orthonormal U and any unit-trace
// PSD Y, W = U Y U^T is unit-trace PSD with b_i^T W b_i = (U^T b_i)^T Y
// (U^T b_i). The reduced solve also returns a selection vector over the same
// m rows, which serves as a fresh primal candidate.
void subspace_round(EngineState& state, const Eval& incumbent, std::size_t subspace_dim,
                    const MaximinOptions& options) {
    const std::size_t d = state.rows.cols();
    const std::size_t m = state.rows.rows();
    if (subspace_dim >= d || state.depth >= kMaxDepth) return;

    DenseMatrix projected(m, subspace_dim);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < subspace_dim; ++j) {
            double c = 0.0;
            for (std::size_t a = 0; a < d; ++a) c += state.rows(i, a) * incumbent.eig.vectors(a, j);
            projected(i, j) = c;
        }
    }

    const std::size_t sub_budget = std::min<std::size_t>(
        250, state.budget > state.iterations ? state.budget - state.iterations : 1);
    // The reduced bound only needs to outpace the current gap; sharpen it as
    // the enclosing problem converges.
    const double sub_tol = std::max(0.5 * state.tol, 0.05 * state.gap());
    const EngineResult reduced =
        maximin_engine(projected, sub_tol, sub_budget, options, state.depth + 1);
    state.iterations += reduced.iterations;

    // Lift the reduced witness into this space.
    std::vector<std::vector<double>> lifted;
    lifted.reserve(reduced.witness_directions.size());
    for (const auto& w : reduced.witness_directions) {
        std::vector<double> y(d, 0.0);
        for (std::size_t j = 0; j < subspace_dim; ++j) {
            for (std::size_t a = 0; a < d; ++a) y[a] += incumbent.eig.vectors(a, j) * w[j];
        }
        lifted.push_back(std::move(y));
    }
    for (const auto& y : lifted) state.cuts.add(y);
    state.absorb_upper(reduced.ub, std::move(lifted));

    if (!state.certified()) line_search_absorb(state, reduced.p);
}

// LP reweighting of the accumulated cuts: upper bound from the optimal
// rank-one-combination witness, fresh primal candidates from the row side.
// An LP breakdown (possible when the pool turns numerically dependent) is
// survivable: shrink the pool and move on.
bool exchange_round(EngineState& state) {
    ++state.iterations;
    // a unit-trace witness needs at most dim(dim+1)/2 + 1 directions
    const std::size_t d = state.rows.cols();
    const std::size_t pool_cap = std::max<std::size_t>(96, d * (d + 1) / 2 + 2 * d);

    GameLpSolution game;
    try {
        game = solve_matrix_game(state.cuts.payoff());
    } catch (const ConvergenceFailure&) {
        state.cuts.prune(std::vector<double>(), pool_cap / 2);
        return false;
    }

    std::vector<std::vector<double>> witness;
    for (std::size_t c = 0; c < state.cuts.directions.size(); ++c) {
        if (game.column_strategy[c] > 1e-15) witness.push_back(state.cuts.directions[c]);
    }
    state.absorb_upper(game.upper_value, std::move(witness));
    state.cuts.prune(game.column_strategy, pool_cap);

    const std::size_t cuts_before = state.cuts.directions.size();
    Eval lp_eval(state.rows, game.row_strategy);
    state.absorb_gradient(lp_eval, averaged_supergradient(state.rows, lp_eval));
    if (!state.certified()) line_search_absorb(state, lp_eval.p);
    return state.cuts.directions.size() > cuts_before;
}

EngineResult maximin_engine(const DenseMatrix& rows, double tol, std::size_t budget,
                            const MaximinOptions& options, int depth) {
    const std::size_t m = rows.rows();
    EngineState state(rows, tol, budget, depth);

    Eval current(rows, std::vector<double>(m, 1.0 / static_cast<double>(m)));
    state.absorb_gradient(current, averaged_supergradient(rows, current));

    if (depth == 0) {
        current = frank_wolfe_stage(state, std::move(current), options);
    }
    if (!state.certified()) {
        current = softmin_stage(state, std::move(current));
    }

    std::size_t stagnant = 0;
    std::size_t extra_dims = 0;
    while (!state.certified() && state.iterations < state.budget && stagnant < 6) {
        const double prev_gap = state.gap();

        Eval incumbent(rows, state.best_p);
        const double margin = std::max(2.0 * state.gap(), 0.0);
        const std::size_t cluster = incumbent.cluster_size(margin);
        const std::size_t subspace_dim =
            rows.cols() > 1
                ? std::min(rows.cols() - 1, std::max<std::size_t>(cluster, 1) + extra_dims)
                : 0;
        if (subspace_dim > 0) subspace_round(state, incumbent, subspace_dim, options);

        const bool new_cut = state.certified() ? true : exchange_round(state);

        if (state.trace) {
            std::fprintf(stderr, "%*sdepth %d round: lb=%.9f ub=%.9f gap=%.3e cuts=%zu dim=%zu\n",
                         2 * depth, "", depth, state.best_lambda, state.best_ub, state.gap(),
                         state.cuts.directions.size(), subspace_dim);
        }

        if (state.gap() > prev_gap - std::max(1e-15, 0.01 * tol)) {
            ++stagnant;
            ++extra_dims;
            if (!new_cut && stagnant >= 3) break;
        } else {
            stagnant = 0;
            if (extra_dims > 0) --extra_dims;
        }
    }

    return EngineResult{std::move(state.best_p), state.best_lambda, state.best_ub,
                        state.iterations, std::move(state.best_witness)};
}

OptimizerResult make_result(std::vector<double> p, double t_hat, double gap,
                            std::size_t iterations, Method tag) {
    DistributionVector distribution = DistributionVector::normalized(std::move(p));
    const std::size_t sparsity = distribution.sparsity_count();
    return OptimizerResult{std::move(distribution), t_hat, std::max(0.0, gap), iterations, tag,
                           sparsity};
}

}  // namespace

OptimizerResult optimize_maximin(const DenseMatrix& b, double tol, std::size_t max_iters,
                                 const MaximinOptions& options) {
    require_unit_rows(b);

    {
        const auto gram = weighted_gram(b, DistributionVector::uniform(b.rows()));
        const auto ext = eig_extremes(gram);
        if (ext.lambda_min <= kRankTolerance * kRankTolerance * ext.lambda_max) {
            throw RankDeficient("matrix rows do not span the column space");
        }
    }

    // Leave a slice of the tolerance for the sparsification step below.
    EngineResult result = maximin_engine(b, 0.9 * tol, max_iters, options, 0);
    if (result.ub - result.lambda > tol) {
        OptimizerResult best = make_result(result.p, result.lambda, result.ub - result.lambda,
                                           result.iterations, Method::Maximin);
        throw MaximinConvergenceFailure(
            "maximin certificate gap " + std::to_string(result.ub - result.lambda) +
                " above tolerance after " + std::to_string(result.iterations) + " iterations",
            result.iterations, std::move(best));
    }

    // Optimal designs concentrate on few rows, but the interior iterates keep
    // a trickle of weight on the rest. Drop the smallest weights at the most
    // aggressive threshold whose renormalized point is still certified by the
    // retained dual bound.
    for (double threshold : {1e-3, 3e-4, 1e-4, 3e-5, 1e-5}) {
        std::vector<double> truncated(result.p.size());
        double total = 0.0;
        bool changed = false;
        for (std::size_t i = 0; i < result.p.size(); ++i) {
            truncated[i] = result.p[i] < threshold ? 0.0 : result.p[i];
            changed = changed || truncated[i] != result.p[i];
            total += truncated[i];
        }
        if (!changed || !(total > 0.0)) continue;
        for (double& v : truncated) v /= total;
        const double lambda =
            eig_symmetric(weighted_gram(b, truncated)).values.front();
        if (result.ub - lambda <= tol) {
            result.p = std::move(truncated);
            result.lambda = lambda;
            break;
        }
    }

    return make_result(std::move(result.p), result.lambda, result.ub - result.lambda,
                       result.iterations, Method::Maximin);
}

namespace {

// Maximum-entropy point of the LP-optimal face, computed by Newton on the
// dual of  max H(p) s.t. (G^T p)_j = t* for the tight constraints. The
// simplex method returns a vertex of the face; a solver-grade interior-point
// code returns a centered point instead, and the selection distributions the
// relaxation is used for behave very differently between the two (a vertex
// supports only ~n rows and its Gram matrix is nearly singular). Returns an
// empty vector when the centering iteration fails or leaves the face.
std::vector<double> entropic_face_center(const DenseMatrix& payoff, const GameLpSolution& game) {
    const std::size_t m = payoff.rows();
    const std::size_t k = payoff.cols();
    std::vector<std::size_t> tight;
    for (std::size_t j = 0; j < k; ++j) {
        if (game.column_strategy[j] > 1e-9) tight.push_back(j);
    }
    if (tight.empty()) return {};
    const double target = game.upper_value;
    const std::size_t d = tight.size();

    std::vector<double> nu(d, 0.0);
    std::vector<double> p(m, 1.0 / static_cast<double>(m));
    std::vector<double> residual(d), moments(d);

    auto refresh = [&]() {
        double shift = -std::numeric_limits<double>::infinity();
        std::vector<double> score(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += nu[c] * payoff(i, tight[c]);
            score[i] = s;
            shift = std::max(shift, s);
        }
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            p[i] = std::exp(score[i] - shift);
            total += p[i];
        }
        for (double& v : p) v /= total;
        double err = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += p[i] * payoff(i, tight[c]);
            moments[c] = s;
            residual[c] = s - target;
            err = std::max(err, std::abs(residual[c]));
        }
        return err;
    };

    double err = refresh();
    for (int iter = 0; iter < 60 && err > 1e-11 * std::max(1.0, target); ++iter) {
        // covariance of the tight payoff columns under p
        std::vector<double> hessian(d * d, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t c = 0; c < d; ++c) {
                const double w = p[i] * payoff(i, tight[c]);
                for (std::size_t e = c; e < d; ++e) hessian[c * d + e] += w * payoff(i, tight[e]);
            }
        }
        double ridge = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            for (std::size_t e = c; e < d; ++e) {
                hessian[c * d + e] -= moments[c] * moments[e];
                hessian[e * d + c] = hessian[c * d + e];
            }
            ridge = std::max(ridge, hessian[c * d + c]);
        }
        for (std::size_t c = 0; c < d; ++c) hessian[c * d + c] += 1e-12 * std::max(1.0, ridge);

        std::vector<double> step;
        try {
            step = SpdFactorization::factor(SymmetricMatrix::from_entries(d, hessian))
                       .solve(residual);
        } catch (const NotPositiveDefinite&) {
            return {};
        }
        const std::vector<double> nu_old = nu;
        const double err_old = err;
        double damping = 1.0;
        for (int half = 0; half < 25; ++half) {
            for (std::size_t c = 0; c < d; ++c) nu[c] = nu_old[c] - damping * step[c];
            err = refresh();
            if (err < err_old) break;
            damping *= 0.5;
        }
        if (err >= err_old) return {};
    }
    if (err > 1e-9 * std::max(1.0, target)) return {};

    // must still satisfy the non-tight constraints
    for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += p[i] * payoff(i, j);
        if (s < target - 1e-9 * std::max(1.0, target)) return {};
    }
    return p;
}

}  // namespace

OptimizerResult optimize_lp(const DenseMatrix& b, double tol) {
    require_unit_rows(b);
    const std::size_t m = b.rows();
    const std::size_t n = b.cols();
    DenseMatrix payoff(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) payoff(i, j) = b(i, j) * b(i, j);
    }
    const GameLpSolution game = solve_matrix_game(payoff, tol);

    std::vector<double> p = entropic_face_center(payoff, game);
    if (p.empty()) p = game.row_strategy;
    double achieved = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += p[i] * payoff(i, j);
        achieved = std::min(achieved, s);
    }
    return make_result(std::move(p), achieved, game.upper_value - achieved, game.pivots,
                       Method::LPRelax);
}

OptimizerResult optimize_dopt(const DistributionVector& row_norm_init, const DenseMatrix& b,
                              std::size_t iters, DoptTrace* trace) {
    require_unit_rows(b);
    const std::size_t m = b.rows();
    const std::size_t n = b.cols();
    if (row_norm_init.size() != m) {
        throw DimensionMismatch("initial distribution length does not match row count");
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (!(row_norm_init[i] > 0.0)) {
            throw InvalidDistribution(
                "multiplicative updates require a strictly positive start, entry " +
                std::to_string(i) + " is not");
        }
    }

    std::vector<double> p(row_norm_init.weights().begin(), row_norm_init.weights().end());
    std::vector<double> leverage(m);
    const double inv_n = 1.0 / static_cast<double>(n);

    auto record = [&](double logdet_value) {
        if (trace) {
            trace->iterates.push_back(p);
            trace->logdets.push_back(logdet_value);
        }
    };

    for (std::size_t t = 0; t < iters; ++t) {
        const auto factorization = SpdFactorization::factor(weighted_gram(b, p));
        record(factorization.log_determinant());
        for (std::size_t i = 0; i < m; ++i) {
            const auto solved = factorization.solve(b.row(i));
            leverage[i] = dot(b.row(i), solved);
        }
        for (std::size_t i = 0; i < m; ++i) p[i] *= leverage[i] * inv_n;
    }

    const auto final_gram = weighted_gram(b, p);
    const auto final_factor = SpdFactorization::factor(final_gram);
    record(final_factor.log_determinant());

    // D-criterion certificate: logdet at the optimum exceeds the current
    // value by at most n*log(max_i leverage_i / n).
    double max_leverage = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto solved = final_factor.solve(b.row(i));
        max_leverage = std::max(max_leverage, dot(b.row(i), solved));
    }
    const double gap = static_cast<double>(n) * std::log(std::max(1.0, max_leverage * inv_n));

    const double t_hat = eig_extremes(final_gram).lambda_min;
    return make_result(std::move(p), t_hat, gap, iters, Method::DOptimal);
}

std::pair<DistributionVector, double> p_from_q(const UnnormalizedDesign& design) {
    double total = 0.0;
    for (double v : design.q) {
        if (v < -1e-12) throw InvalidArgument("design weights must be nonnegative");
        total += std::max(0.0, v);
    }
    if (!(total > 0.0)) throw ZeroDesign("design weights sum to zero");
    std::vector<double> p(design.q.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::max(0.0, design.q[i]) / total;
    return {DistributionVector(std::move(p)), 1.0 / total};
}

UnnormalizedDesign q_from_p(const DistributionVector& p, double t) {
    if (!(t > 0.0)) throw NonPositiveT("objective value must be positive, got " + std::to_string(t));
    std::vector<double> q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = p[i] / t;
    return UnnormalizedDesign{std::move(q)};
}

DenseMatrix kappa_optimal_rescaling(const DenseMatrix& b, const OptimizerResult& result) {
    if (result.p_hat.size() != b.rows()) {
        throw DimensionMismatch("distribution length does not match row count");
    }
    DenseMatrix rescaled(b.rows(), b.cols());
    for (std::size_t i = 0; i < b.rows(); ++i) {
        const double s = std::sqrt(result.p_hat[i]);
        for (std::size_t j = 0; j < b.cols(); ++j) rescaled(i, j) = s * b(i, j);
    }
    return rescaled;
}

}  // namespace kopt
