// Command-line front end: `run` reproduces the Monte-Carlo method comparison,
// `optimize` computes a row-selection distribution for a matrix file, and
// `solve` runs the randomized solver on a raw system.

#include <CLI11.hpp>

#include <cstdint>
#include <functional>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "kopt/errors.hpp"
#include "kopt/experiment.hpp"
#include "kopt/kaczmarz.hpp"
#include "kopt/linalg.hpp"
#include "kopt/optimizers.hpp"

namespace {

// Optional config file: plain `key=value` lines mirroring the long flags.
// Values are loaded before CLI11 parses argv, so explicit flags override the
// file. Lines starting with '#' are comments.
using ConfigSetters = std::map<std::string, std::function<void(const std::string&)>>;

template <typename T>
std::function<void(const std::string&)> bind_value(T& target) {
    return [&target](const std::string& text) {
        if constexpr (std::is_same_v<T, std::string>) {
            target = text;
        } else if constexpr (std::is_same_v<T, bool>) {
            target = text == "1" || text == "true" || text == "yes" || text == "on";
        } else {
            std::stringstream stream(text);
            T value{};
            if (!(stream >> value)) {
                throw kopt::InvalidArgument("cannot parse config value '" + text + "'");
            }
            target = value;
        }
    };
}

std::string config_path_from_argv(int argc, char** argv) {
    for (int i = 0; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return {};
}

void apply_config_file(const std::string& path, const ConfigSetters& setters) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw kopt::IoError("cannot open config file " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw kopt::InvalidArgument("config line is not key=value: '" + line + "'");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto setter = setters.find(key);
        if (setter == setters.end()) {
            throw kopt::InvalidArgument("unknown config key '" + key + "'");
        }
        setter->second(value);
    }
}

// Matrix files are whitespace-delimited text: a "rows cols" header line
// followed by rows*cols entries.
kopt::DenseMatrix read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw kopt::IoError("cannot open matrix file " + path);
    std::size_t rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows == 0 || cols == 0) {
        throw kopt::InvalidArgument("matrix file " + path + " must start with 'rows cols'");
    }
    std::vector<double> entries(rows * cols);
    for (double& v : entries) {
        if (!(in >> v)) {
            throw kopt::InvalidArgument("matrix file " + path + " ended before " +
                                        std::to_string(rows * cols) + " entries");
        }
    }
    return kopt::DenseMatrix(rows, cols, std::move(entries));
}

std::vector<double> read_vector(const std::string& path, std::size_t expected) {
    std::ifstream in(path);
    if (!in) throw kopt::IoError("cannot open vector file " + path);
    std::vector<double> values;
    double v = 0.0;
    while (in >> v) values.push_back(v);
    if (values.size() != expected) {
        throw kopt::InvalidArgument("vector file " + path + " holds " +
                                    std::to_string(values.size()) + " values, expected " +
                                    std::to_string(expected));
    }
    return values;
}

struct RunOptions {
    kopt::ExperimentConfig config;
    std::string methods = "rka,orka,lporka,iteorka";
    std::string out_dir = "out";
};

int run_command(RunOptions& options) {
    options.config.methods = kopt::parse_method_list(options.methods);
    options.config.output_dir = options.out_dir;
    const auto result = kopt::run_experiment(options.config);
    kopt::emit_csv(result, options.config, options.config.output_dir);

    std::cout << "wrote " << (options.config.output_dir / "mse.csv").string() << ", "
              << (options.config.output_dir / "distributions.csv").string() << ", "
              << (options.config.output_dir / "summary.txt").string() << '\n';
    for (const auto& report : result.reports) {
        std::cout << kopt::method_label(report.method)
                  << ": final MSE = " << kopt::format_double(report.curve.mean.back())
                  << ", upper factor = " << kopt::format_double(report.rates.upper_factor)
                  << '\n';
    }
    if (!result.failures.empty()) {
        for (const auto& [method, message] : result.failures) {
            std::cerr << kopt::method_label(method) << " failed: " << message << '\n';
        }
        return 3;
    }
    return 0;
}

struct OptimizeOptions {
    std::string matrix_path;
    std::string method = "maximin";
    double tol = 1e-8;
    std::size_t dopt_iters = 10;
    std::size_t max_iters = 2000;
};

int optimize_command(const OptimizeOptions& options) {
    if (options.matrix_path.empty()) throw kopt::InvalidArgument("--matrix is required");
    const auto a = read_matrix(options.matrix_path);
    const auto normalized = kopt::row_normalize(a, std::vector<double>(a.rows(), 0.0));

    kopt::OptimizerResult result = [&]() {
        if (options.method == "maximin") {
            return kopt::optimize_maximin(normalized.unit_rows, options.tol, options.max_iters);
        }
        if (options.method == "lp") {
            return kopt::optimize_lp(normalized.unit_rows, options.tol);
        }
        if (options.method == "dopt") {
            return kopt::optimize_dopt(kopt::DistributionVector::from_row_norms(a),
                                       normalized.unit_rows, options.dopt_iters);
        }
        throw kopt::InvalidArgument("unknown optimizer '" + options.method + "'");
    }();

    for (std::size_t i = 0; i < result.p_hat.size(); ++i) {
        std::cout << kopt::format_double(result.p_hat[i]) << '\n';
    }
    std::cerr << kopt::method_name(result.method_tag)
              << ": t_hat = " << kopt::format_double(result.t_hat)
              << ", certificate gap = " << kopt::format_double(result.certificate_gap)
              << ", iterations = " << result.iterations
              << ", zeros (< 1e-5) = " << result.sparsity_count << '\n';
    return 0;
}

struct SolveOptions {
    std::string matrix_path;
    std::string rhs_path;
    std::string p_path;
    std::size_t steps = 100;
    std::uint64_t seed = 0;
};

int solve_command(const SolveOptions& options) {
    if (options.matrix_path.empty() || options.rhs_path.empty() || options.p_path.empty()) {
        throw kopt::InvalidArgument("--matrix, --rhs and --p are required");
    }
    const auto a = read_matrix(options.matrix_path);
    const auto b = read_vector(options.rhs_path, a.rows());
    kopt::DistributionVector p(read_vector(options.p_path, a.rows()));

    const std::vector<double> x0(a.cols(), 0.0);
    const kopt::SelectionScheme scheme = kopt::Randomized{std::move(p), options.seed};
    const auto record = kopt::run_solver(a, b, x0, scheme, options.steps);
    for (double err : record.squared_errors) std::cout << kopt::format_double(err) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized Kaczmarz solver with optimized row-selection distributions"};
    app.require_subcommand(1);

    std::string config_path;

    RunOptions run_options;
    auto* run = app.add_subcommand("run", "Generate a system and compare selection methods");
    run->add_option("--config", config_path, "Config file with key=value lines (flags override)");
    run->add_option("--m", run_options.config.rows, "Row count")->capture_default_str();
    run->add_option("--n", run_options.config.cols, "Column count")->capture_default_str();
    run->add_option("--trials", run_options.config.trials, "Monte-Carlo trials per method")
        ->capture_default_str();
    run->add_option("--steps", run_options.config.steps, "Projection steps per trial")
        ->capture_default_str();
    run->add_option("--seed", run_options.config.seed, "Experiment seed")->capture_default_str();
    run->add_option("--methods", run_options.methods, "Comma-separated method list")
        ->capture_default_str();
    run->add_option("--dopt-iters", run_options.config.dopt_iterations,
                    "Multiplicative design iterations")
        ->capture_default_str();
    run->add_option("--out", run_options.out_dir, "Output directory")->capture_default_str();
    run->add_option("--threads", run_options.config.threads,
                    "Worker threads (0 = hardware count; result is thread-count independent)")
        ->capture_default_str();
    run->add_option("--maximin-tol", run_options.config.maximin_tol,
                    "Certificate tolerance for the maximin optimizer")
        ->capture_default_str();
    run->add_flag("--regen-per-trial", run_options.config.regenerate_per_trial,
                  "Draw a fresh system per trial (robustness mode)");

    OptimizeOptions optimize_options;
    auto* optimize = app.add_subcommand("optimize", "Compute a row-selection distribution");
    optimize->add_option("--config", config_path,
                         "Config file with key=value lines (flags override)");
    optimize->add_option("--matrix", optimize_options.matrix_path, "Matrix file");
    optimize->add_option("--method", optimize_options.method, "maximin, lp or dopt")
        ->capture_default_str();
    optimize->add_option("--tol", optimize_options.tol, "Certificate tolerance")
        ->capture_default_str();
    optimize->add_option("--dopt-iters", optimize_options.dopt_iters,
                         "Multiplicative design iterations")
        ->capture_default_str();
    optimize->add_option("--max-iters", optimize_options.max_iters,
                         "Iteration budget for the maximin optimizer")
        ->capture_default_str();

    SolveOptions solve_options;
    auto* solve = app.add_subcommand("solve", "Run the randomized solver on a raw system");
    solve->add_option("--config", config_path,
                      "Config file with key=value lines (flags override)");
    solve->add_option("--matrix", solve_options.matrix_path, "Matrix file");
    solve->add_option("--rhs", solve_options.rhs_path, "Right-hand side file");
    solve->add_option("--p", solve_options.p_path, "Distribution file, one probability per line");
    solve->add_option("--steps", solve_options.steps, "Projection steps")->capture_default_str();
    solve->add_option("--seed", solve_options.seed, "Sampling seed")->capture_default_str();

    // Config values are applied to the bound defaults before parsing, so any
    // flag given on the command line wins.
    try {
        const std::string sub = argc >= 2 ? argv[1] : "";
        const std::string file = config_path_from_argv(argc, argv);
        if (sub == "run") {
            ConfigSetters setters{
                {"m", bind_value(run_options.config.rows)},
                {"n", bind_value(run_options.config.cols)},
                {"trials", bind_value(run_options.config.trials)},
                {"steps", bind_value(run_options.config.steps)},
                {"seed", bind_value(run_options.config.seed)},
                {"methods", bind_value(run_options.methods)},
                {"dopt-iters", bind_value(run_options.config.dopt_iterations)},
                {"out", bind_value(run_options.out_dir)},
                {"threads", bind_value(run_options.config.threads)},
                {"maximin-tol", bind_value(run_options.config.maximin_tol)},
                {"regen-per-trial", bind_value(run_options.config.regenerate_per_trial)},
            };
            apply_config_file(file, setters);
        } else if (sub == "optimize") {
            ConfigSetters setters{
                {"matrix", bind_value(optimize_options.matrix_path)},
                {"method", bind_value(optimize_options.method)},
                {"tol", bind_value(optimize_options.tol)},
                {"dopt-iters", bind_value(optimize_options.dopt_iters)},
                {"max-iters", bind_value(optimize_options.max_iters)},
            };
            apply_config_file(file, setters);
        } else if (sub == "solve") {
            ConfigSetters setters{
                {"matrix", bind_value(solve_options.matrix_path)},
                {"rhs", bind_value(solve_options.rhs_path)},
                {"p", bind_value(solve_options.p_path)},
                {"steps", bind_value(solve_options.steps)},
                {"seed", bind_value(solve_options.seed)},
            };
            apply_config_file(file, setters);
        }
    } catch (const kopt::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return run_command(run_options);
        if (optimize->parsed()) return optimize_command(optimize_options);
        if (solve->parsed()) return solve_command(solve_options);
    } catch (const kopt::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const kopt::DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const kopt::InvalidDistribution& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const kopt::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const kopt::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
