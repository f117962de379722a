#include "kopt/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "kopt/errors.hpp"
#include "kopt/kaczmarz.hpp"
#include "kopt/linalg.hpp"
#include "kopt/optimizers.hpp"

namespace kopt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Trials are accumulated in fixed-size chunks and merged in chunk order, so
// the floating-point result is independent of the worker-thread count.
constexpr std::size_t kTrialChunk = 32;

struct StepAccumulator {
    std::vector<double> sum;
    std::vector<double> sum_sq;

    explicit StepAccumulator(std::size_t entries) : sum(entries, 0.0), sum_sq(entries, 0.0) {}

    void add(const std::vector<double>& values) {
        for (std::size_t k = 0; k < values.size(); ++k) {
            sum[k] += values[k];
            sum_sq[k] += values[k] * values[k];
        }
    }

    void merge(const StepAccumulator& other) {
        for (std::size_t k = 0; k < sum.size(); ++k) {
            sum[k] += other.sum[k];
            sum_sq[k] += other.sum_sq[k];
        }
    }
};

MseCurve finalize_curve(ExperimentMethod method, const StepAccumulator& acc, std::size_t trials) {
    const double n = static_cast<double>(trials);
    MseCurve curve{method, {}, {}, trials};
    curve.mean.resize(acc.sum.size());
    curve.stddev.resize(acc.sum.size());
    for (std::size_t k = 0; k < acc.sum.size(); ++k) {
        const double mean = acc.sum[k] / n;
        curve.mean[k] = mean;
        double var = 0.0;
        if (trials > 1) {
            var = (acc.sum_sq[k] - n * mean * mean) / (n - 1.0);
        }
        curve.stddev[k] = std::sqrt(std::max(0.0, var));
    }
    return curve;
}

void validate(const ExperimentConfig& config) {
    if (config.cols < 1 || config.rows < config.cols) {
        throw InvalidArgument("experiment requires rows >= cols >= 1");
    }
    if (config.trials < 1) throw InvalidArgument("experiment requires at least one trial");
    if (config.methods.empty()) throw InvalidArgument("no methods selected");
    for (std::size_t i = 0; i < config.methods.size(); ++i) {
        for (std::size_t j = i + 1; j < config.methods.size(); ++j) {
            if (config.methods[i] == config.methods[j]) {
                throw InvalidArgument("method " + method_label(config.methods[i]) +
                                      " listed twice");
            }
        }
    }
}

struct PreparedMethod {
    ExperimentMethod method;
    DistributionVector distribution;
    double t_hat;
    double certificate_gap;
    std::size_t optimizer_iterations;
    double optimize_seconds;
};

PreparedMethod prepare_method(ExperimentMethod method, const GeneratedSystem& system,
                              const NormalizedSystem& normalized,
                              const ExperimentConfig& config) {
    const auto start = Clock::now();
    switch (method) {
        case ExperimentMethod::Rka: {
            auto p = DistributionVector::from_row_norms(system.a);
            return PreparedMethod{method, std::move(p), 0.0, 0.0, 0, seconds_since(start)};
        }
        case ExperimentMethod::Orka: {
            auto r = optimize_maximin(normalized.unit_rows, config.maximin_tol,
                                      config.maximin_max_iters);
            return PreparedMethod{method, std::move(r.p_hat), r.t_hat, r.certificate_gap,
                                  r.iterations, seconds_since(start)};
        }
        case ExperimentMethod::Lporka: {
            auto r = optimize_lp(normalized.unit_rows);
            return PreparedMethod{method, std::move(r.p_hat), r.t_hat, r.certificate_gap,
                                  r.iterations, seconds_since(start)};
        }
        case ExperimentMethod::Iteorka: {
            auto r = optimize_dopt(DistributionVector::from_row_norms(system.a),
                                   normalized.unit_rows, config.dopt_iterations);
            return PreparedMethod{method, std::move(r.p_hat), r.t_hat, r.certificate_gap,
                                  r.iterations, seconds_since(start)};
        }
    }
    throw InvalidArgument("unknown method");
}

// Parallel trial loop with deterministic chunked aggregation.
StepAccumulator run_trials(const NormalizedSystem& normalized,
                           const DistributionVector& distribution,
                           const std::vector<double>& truth, const ExperimentConfig& config) {
    const std::size_t entries = config.steps + 1;
    const std::size_t chunk_count = (config.trials + kTrialChunk - 1) / kTrialChunk;
    std::vector<StepAccumulator> chunks(chunk_count, StepAccumulator(entries));
    const std::vector<double> x0(config.cols, 0.0);

    auto process_chunk = [&](std::size_t c) {
        const std::size_t first = c * kTrialChunk;
        const std::size_t last = std::min(first + kTrialChunk, config.trials);
        for (std::size_t trial = first; trial < last; ++trial) {
            const SelectionScheme scheme =
                Randomized{distribution, rng::stream_seed(config.seed, trial)};
            const auto record = run_solver(normalized, x0, scheme, config.steps, truth);
            chunks[c].add(record.squared_errors);
        }
    };

    std::size_t worker_count = config.threads == 0
                                   ? std::max<std::size_t>(1, std::thread::hardware_concurrency())
                                   : config.threads;
    worker_count = std::min(worker_count, chunk_count);
    if (worker_count <= 1) {
        for (std::size_t c = 0; c < chunk_count; ++c) process_chunk(c);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        workers.reserve(worker_count);
        for (std::size_t w = 0; w < worker_count; ++w) {
            workers.emplace_back([&]() {
                for (std::size_t c = next.fetch_add(1); c < chunk_count; c = next.fetch_add(1)) {
                    process_chunk(c);
                }
            });
        }
        for (auto& worker : workers) worker.join();
    }

    StepAccumulator total(entries);
    for (const auto& chunk : chunks) total.merge(chunk);
    return total;
}

}  // namespace

std::string method_label(ExperimentMethod method) {
    switch (method) {
        case ExperimentMethod::Rka: return "rka";
        case ExperimentMethod::Orka: return "orka";
        case ExperimentMethod::Lporka: return "lporka";
        case ExperimentMethod::Iteorka: return "iteorka";
    }
    return "unknown";
}

ExperimentMethod parse_method(const std::string& label) {
    if (label == "rka") return ExperimentMethod::Rka;
    if (label == "orka") return ExperimentMethod::Orka;
    if (label == "lporka") return ExperimentMethod::Lporka;
    if (label == "iteorka") return ExperimentMethod::Iteorka;
    throw InvalidArgument("unknown method '" + label + "'");
}

std::vector<ExperimentMethod> parse_method_list(const std::string& comma_separated) {
    std::vector<ExperimentMethod> methods;
    std::stringstream stream(comma_separated);
    std::string token;
    while (std::getline(stream, token, ',')) {
        if (!token.empty()) methods.push_back(parse_method(token));
    }
    if (methods.empty()) throw InvalidArgument("no methods given");
    return methods;
}

GeneratedSystem generate_system(std::size_t m, std::size_t n, rng::SplitMix64& rng) {
    if (n < 1 || m < n) throw InvalidArgument("system generation requires m >= n >= 1");
    DenseMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        double nrm = 0.0;
        do {
            for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.next_normal();
            nrm = norm(a.row(i));
        } while (nrm < 1e-12);
        double scale = 0.0;
        do {
            scale = rng.next_double();
        } while (scale < 1e-6);
        for (std::size_t j = 0; j < n; ++j) a(i, j) = a(i, j) / nrm * scale;
    }
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = rng.next_normal();
    std::vector<double> b = a.multiply(x);
    return GeneratedSystem{std::move(a), std::move(x), std::move(b)};
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    validate(config);
    const auto start = Clock::now();

    rng::SplitMix64 system_rng(config.seed);
    GeneratedSystem system = generate_system(config.rows, config.cols, system_rng);
    NormalizedSystem normalized = row_normalize(system.a, system.b);

    ExperimentResult result{system.a,
                            system.x,
                            system.b,
                            squared_norm(system.x),
                            {},
                            {},
                            0.0};

    for (ExperimentMethod method : config.methods) {
        try {
            PreparedMethod prepared = prepare_method(method, system, normalized, config);
            const RatePair rates = rate_pair(normalized.unit_rows, prepared.distribution);
            double t_hat = prepared.t_hat;
            if (method == ExperimentMethod::Rka) t_hat = 1.0 - rates.upper_factor;

            const auto solve_start = Clock::now();
            StepAccumulator acc(config.steps + 1);
            if (config.regenerate_per_trial) {
                // robustness mode: a fresh system and distribution per trial
                for (std::size_t trial = 0; trial < config.trials; ++trial) {
                    rng::SplitMix64 trial_rng(rng::stream_seed(config.seed, trial));
                    GeneratedSystem trial_system =
                        trial == 0 ? system : generate_system(config.rows, config.cols, trial_rng);
                    NormalizedSystem trial_normalized =
                        row_normalize(trial_system.a, trial_system.b);
                    PreparedMethod trial_prepared =
                        trial == 0 ? prepared
                                   : prepare_method(method, trial_system, trial_normalized, config);
                    const SelectionScheme scheme = Randomized{
                        trial_prepared.distribution, rng::stream_seed(config.seed, trial)};
                    const std::vector<double> x0(config.cols, 0.0);
                    const auto record = run_solver(trial_normalized, x0, scheme, config.steps,
                                                   trial_system.x);
                    acc.add(record.squared_errors);
                }
            } else {
                acc = run_trials(normalized, prepared.distribution, system.x, config);
            }
            const double solve_seconds = seconds_since(solve_start);

            MseCurve curve = finalize_curve(method, acc, config.trials);
            const std::size_t sparsity = prepared.distribution.sparsity_count();
            result.reports.push_back(MethodReport{method, std::move(prepared.distribution), rates,
                                                  t_hat, prepared.certificate_gap,
                                                  prepared.optimizer_iterations, sparsity,
                                                  prepared.optimize_seconds, solve_seconds,
                                                  std::move(curve)});
        } catch (const Error& failure) {
            result.failures.emplace_back(method, failure.what());
        }
    }

    result.total_seconds = seconds_since(start);
    return result;
}

std::string format_double(double value) {
    char buffer[64];
    const auto conv = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, conv.ptr);
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace

void emit_csv(const ExperimentResult& result, const ExperimentConfig& config,
              const std::filesystem::path& output_dir) {
    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec) throw IoError("cannot create directory " + output_dir.string() + ": " + ec.message());

    {
        auto out = open_output(output_dir / "mse.csv");
        out << "step";
        for (const auto& report : result.reports) out << ',' << method_label(report.method);
        out << '\n';
        for (std::size_t k = 0; k <= config.steps; ++k) {
            out << k;
            for (const auto& report : result.reports) {
                out << ',' << format_double(report.curve.mean[k]);
            }
            out << '\n';
        }
        if (!out) throw IoError("failed writing " + (output_dir / "mse.csv").string());
    }

    {
        auto out = open_output(output_dir / "distributions.csv");
        const DistributionVector row_norm_p = DistributionVector::from_row_norms(result.system_matrix);
        out << "row_index,row_norm_p";
        for (const auto& report : result.reports) out << ',' << method_label(report.method);
        out << '\n';
        for (std::size_t i = 0; i < result.system_matrix.rows(); ++i) {
            out << i << ',' << format_double(row_norm_p[i]);
            for (const auto& report : result.reports) {
                out << ',' << format_double(report.distribution[i]);
            }
            out << '\n';
        }
        if (!out) throw IoError("failed writing " + (output_dir / "distributions.csv").string());
    }

    {
        auto out = open_output(output_dir / "summary.txt");
        out << "rows=" << config.rows << " cols=" << config.cols << " trials=" << config.trials
            << " steps=" << config.steps << " seed=" << config.seed << '\n';
        out << "mean initial squared error: " << format_double(result.mean_initial_sq_error)
            << "\n\n";
        for (const auto& report : result.reports) {
            out << method_label(report.method) << ":\n";
            out << "  upper contraction factor: " << format_double(report.rates.upper_factor)
                << '\n';
            out << "  lower contraction factor: " << format_double(report.rates.lower_factor)
                << '\n';
            out << "  t_hat: " << format_double(report.t_hat) << '\n';
            out << "  certificate gap: " << format_double(report.certificate_gap) << '\n';
            out << "  sparsity count (< 1e-5): " << report.sparsity_count << '\n';
            out << "  optimizer iterations: " << report.optimizer_iterations << '\n';
            out << "  final mean MSE: " << format_double(report.curve.mean.back()) << '\n';
            out << "  optimize seconds: " << format_double(report.optimize_seconds) << '\n';
            out << "  solve seconds: " << format_double(report.solve_seconds) << '\n';
        }
        for (const auto& [method, message] : result.failures) {
            out << method_label(method) << " FAILED: " << message << '\n';
        }
        out << "total seconds: " << format_double(result.total_seconds) << '\n';
        if (!out) throw IoError("failed writing " + (output_dir / "summary.txt").string());
    }
}

}  // namespace kopt
