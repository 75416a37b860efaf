// Command-line interface: dataset generation/loading, hyperparameter
// fitting, greedy training with trace export, and the three-scheme
// benchmark. Exit codes: 0 success, 1 usage error, 2 data error,
// 3 numeric failure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ggp/bench.hpp"
#include "ggp/errors.hpp"
#include "ggp/gp.hpp"
#include "ggp/greedy.hpp"
#include "ggp/io.hpp"

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flags shared by the commands that need one dataset.
struct DataFlags {
    std::string input;             // CSV path; empty means synthetic
    std::string function = "xsinx";
    Eigen::Index n = 200;
    std::string domain = "0:10";
    double noise_std = -1.0;       // < 0: 0.1 * std of the clean targets
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
    cmd->add_option("--input", f.input, "Dataset CSV (header x1[,x2,...],y)");
    cmd->add_option("--function", f.function,
                    "Synthetic test function: x2sinx, xsinx, poly_sin")
        ->capture_default_str();
    cmd->add_option("--n", f.n, "Synthetic training points")->capture_default_str();
    cmd->add_option("--domain", f.domain, "Synthetic input interval a:b")
        ->capture_default_str();
    cmd->add_option("--noise-std", f.noise_std,
                    "Target noise std; negative selects 0.1 * std of the clean targets")
        ->capture_default_str();
}

std::pair<double, double> parse_domain(const std::string& s) {
    const std::size_t colon = s.find(':');
    double lo = 0.0, hi = 0.0;
    auto parse = [&](std::string_view sv, double& out) {
        const auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), out);
        return ec == std::errc() && p == sv.data() + sv.size();
    };
    if (colon == std::string::npos || !parse(std::string_view(s).substr(0, colon), lo) ||
        !parse(std::string_view(s).substr(colon + 1), hi) || !(lo < hi))
        throw UsageError("--domain must be a:b with a < b, got '" + s + "'");
    return {lo, hi};
}

double parse_delta(const std::string& s) {
    if (s == "auto")
        return std::numeric_limits<double>::quiet_NaN(); // resolved per dataset
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw UsageError("--delta must be a number, 'inf', '-inf', or 'auto', got '" + s + "'");
    return v;
}

ggp::TestFunction parse_function_or_throw(const std::string& name) {
    const auto f = ggp::parse_test_function(name);
    if (!f)
        throw UsageError("unknown test function '" + name + "'");
    return *f;
}

// Flat key=value config support. Values from the file become trailing
// "--key value" arguments for every key not already given on the command
// line, so explicit flags override config values, which override defaults.
std::vector<std::string> merge_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty())
        return args;

    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ggp::ParseError("config line is not key=value", lineno);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key.empty() || key == "config")
            throw ggp::ParseError("invalid config key '" + key + "'", lineno);

        // single-token form so both value options and boolean flags work
        const std::string flag = "--" + key;
        const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (!given)
            args.push_back(flag + "=" + value);
    }
    return args;
}

ggp::Dataset load_dataset(const DataFlags& f, std::uint64_t seed) {
    if (!f.input.empty())
        return ggp::parse_dataset_csv(fs::path(f.input));
    const ggp::TestFunction fn = parse_function_or_throw(f.function);
    const auto [lo, hi] = parse_domain(f.domain);
    double noise = f.noise_std;
    if (noise < 0.0) {
        const ggp::Dataset clean = ggp::generate_dataset(fn, f.n, lo, hi, 0.0, seed);
        noise = 0.1 * ggp::sample_std(clean.targets);
    }
    return ggp::generate_dataset(fn, f.n, lo, hi, noise, seed);
}

int cmd_fit_hypers(const DataFlags& data_flags, Eigen::Index subset_size, std::uint64_t seed,
                   const std::string& out_dir) {
    const ggp::Dataset data = load_dataset(data_flags, seed);
    const Eigen::Index subset =
        subset_size > 0 ? subset_size : ggp::default_subset_size(data.size());
    const ggp::FitReport report = ggp::fit_hyperparameters_report(data, subset, seed);

    const ggp::HypersRecord rec{report.hypers, report.lml, subset, seed};
    fs::create_directories(out_dir);
    ggp::write_hypers_record(fs::path(out_dir) / "hypers.txt", rec);
    ggp::write_hypers_record(std::cout, rec);
    return 0;
}

int cmd_train_greedy(const DataFlags& data_flags, Eigen::Index subset_size,
                     const std::string& delta_str, int max_stages, std::uint64_t seed,
                     bool trace, const std::string& out_dir) {
    const ggp::Dataset data = load_dataset(data_flags, seed);
    const Eigen::Index subset =
        subset_size > 0 ? subset_size : ggp::default_subset_size(data.size());
    const ggp::FitReport report = ggp::fit_hyperparameters_report(data, subset, seed);

    double delta = parse_delta(delta_str);
    if (std::isnan(delta))
        delta = ggp::default_delta(data.targets);
    if (max_stages <= 0)
        max_stages = ggp::default_max_stages(data.size());

    fs::create_directories(out_dir);
    ggp::write_hypers_record(fs::path(out_dir) / "hypers.txt",
                             ggp::HypersRecord{report.hypers, report.lml, subset, seed});

    std::ofstream trace_out;
    std::function<void(const ggp::StageRecord&)> on_stage;
    if (trace) {
        trace_out.open(fs::path(out_dir) / "trace.csv");
        if (!trace_out)
            throw std::invalid_argument("cannot open trace output file");
        trace_out << "stage,point_index,delta_score,mu,std\n";
        on_stage = [&trace_out](const ggp::StageRecord& rec) {
            const std::vector<ggp::StageRecord> one{rec};
            std::ostringstream block;
            ggp::write_trace_csv(block, one);
            const std::string text = block.str();
            trace_out << text.substr(text.find('\n') + 1); // drop the repeated header
            trace_out.flush();
        };
    }

    const ggp::GreedyResult result =
        ggp::run(data, report.hypers, delta, max_stages, seed, trace, on_stage);

    {
        std::ofstream out(fs::path(out_dir) / "active_set.csv");
        ggp::write_active_set_csv(out, result.final_active_idx);
    }
    {
        std::ofstream out(fs::path(out_dir) / "rmse_history.csv");
        ggp::write_rmse_history_csv(out, result.rmse_history);
    }

    std::cout << "selected " << result.final_active_idx.size() << " of " << data.size()
              << " training points in " << result.rmse_history.size() << " stages; final "
              << "remainder rmse " << ggp::format_double(result.rmse_history.back()) << "\n";
    return 0;
}

int cmd_benchmark(ggp::ExperimentConfig cfg, const std::vector<std::string>& function_names,
                  const std::string& delta_str, const std::string& out_dir) {
    cfg.delta = parse_delta(delta_str);
    if (!function_names.empty() &&
        !(function_names.size() == 1 && function_names.front() == "all")) {
        cfg.functions.clear();
        for (const std::string& name : function_names)
            cfg.functions.push_back(parse_function_or_throw(name));
    }

    const ggp::ComparisonTable table = ggp::compare_schemes(cfg);

    fs::create_directories(out_dir);
    ggp::write_results_csv(fs::path(out_dir) / "results.csv", table.rows);
    const std::string summary = ggp::render_summary_table(table.summary);
    {
        std::ofstream out(fs::path(out_dir) / "summary.txt");
        out << summary;
    }
    std::cout << summary;

    const bool all_failed = std::all_of(table.rows.begin(), table.rows.end(),
                                        [](const ggp::TrialRow& r) { return !r.error.empty(); });
    if (all_failed) {
        std::cerr << "benchmark: every trial failed\n";
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian process regression with greedy forward selection of the training set"};
    app.require_subcommand(1);

    // fit-hypers
    DataFlags fit_data;
    Eigen::Index fit_subset = 0;
    std::uint64_t fit_seed = 42;
    std::string fit_out = ".";
    CLI::App* fit = app.add_subcommand(
        "fit-hypers", "Fit kernel hyperparameters by subset marginal likelihood");
    add_data_flags(fit, fit_data);
    fit->add_option("--subset-size", fit_subset, "LML subset size; 0 selects min(N, 100)")
        ->capture_default_str();
    fit->add_option("--seed", fit_seed, "RNG seed")->capture_default_str();
    fit->add_option("--out", fit_out, "Output directory")->capture_default_str();
    std::string fit_config;
    fit->add_option("--config", fit_config, "Flat key=value config file");

    // train-greedy
    DataFlags train_data;
    Eigen::Index train_subset = 0;
    std::string train_delta = "auto";
    int train_max_stages = 0;
    std::uint64_t train_seed = 42;
    bool train_trace = false;
    std::string train_out = ".";
    CLI::App* train =
        app.add_subcommand("train-greedy", "Greedy forward-selection GP training");
    add_data_flags(train, train_data);
    train->add_option("--subset-size", train_subset,
                      "LML subset size for the hyperparameter pre-fit; 0 selects min(N, 100)")
        ->capture_default_str();
    train->add_option("--delta", train_delta,
                      "RMSE-decrease convergence threshold; 'auto' selects 1e-3 * std(y)")
        ->capture_default_str();
    train->add_option("--max-stages", train_max_stages, "Stage cap; 0 selects ceil(N/2)")
        ->capture_default_str();
    train->add_option("--seed", train_seed, "RNG seed")->capture_default_str();
    train->add_flag("--trace", train_trace, "Write the per-stage trace CSV");
    train->add_option("--out", train_out, "Output directory")->capture_default_str();
    std::string train_config;
    train->add_option("--config", train_config, "Flat key=value config file");

    // benchmark
    ggp::ExperimentConfig bench_cfg;
    bench_cfg.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::string> bench_functions;
    std::string bench_delta = "auto";
    std::string bench_domain = "0:10";
    std::string bench_out = ".";
    CLI::App* bench = app.add_subcommand(
        "benchmark", "Compare full, random-subset, and greedy training schemes");
    bench->add_option("--function", bench_functions,
                      "Test functions to benchmark (repeatable); default all");
    bench->add_option("--trials", bench_cfg.trials, "Trials per function")->capture_default_str();
    bench->add_option("--n", bench_cfg.n_train, "Training points per trial")
        ->capture_default_str();
    bench->add_option("--domain", bench_domain, "Input interval a:b")->capture_default_str();
    bench->add_option("--noise-std", bench_cfg.noise_std,
                      "Target noise std; negative selects 0.1 * std of the clean targets")
        ->capture_default_str();
    bench->add_option("--delta", bench_delta,
                      "RMSE-decrease convergence threshold; 'auto' selects 1e-3 * std(y)")
        ->capture_default_str();
    bench->add_option("--max-stages", bench_cfg.max_stages, "Stage cap; 0 selects ceil(N/2)")
        ->capture_default_str();
    bench->add_option("--subset-size", bench_cfg.subset_size,
                      "LML subset size; 0 selects min(N, 100)")
        ->capture_default_str();
    bench->add_option("--seed", bench_cfg.seed, "Base RNG seed")->capture_default_str();
    bench->add_option("--threads", bench_cfg.threads, "Worker threads; 1 forces serial")
        ->capture_default_str();
    bench->add_option("--out", bench_out, "Output directory")->capture_default_str();
    std::string bench_config;
    bench->add_option("--config", bench_config, "Flat key=value config file");

    std::vector<std::string> args;
    try {
        args = merge_config_args(argc, argv);
    } catch (const ggp::ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::vector<const char*> argv_merged{argv[0]};
    for (const std::string& a : args)
        argv_merged.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv_merged.size()), argv_merged.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (fit->parsed())
            return cmd_fit_hypers(fit_data, fit_subset, fit_seed, fit_out);
        if (train->parsed())
            return cmd_train_greedy(train_data, train_subset, train_delta, train_max_stages,
                                    train_seed, train_trace, train_out);
        if (bench->parsed()) {
            const auto [lo, hi] = parse_domain(bench_domain);
            bench_cfg.domain_lo = lo;
            bench_cfg.domain_hi = hi;
            return cmd_benchmark(bench_cfg, bench_functions, bench_delta, bench_out);
        }
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ggp::NotPositiveDefiniteError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const ggp::ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
