#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ggp/dataset.hpp"
#include "ggp/gp.hpp"

namespace ggp {

// 1-D benchmark functions.
enum class TestFunction { x2sinx, xsinx, poly_sin };

const char* to_string(TestFunction f);
std::optional<TestFunction> parse_test_function(std::string_view name);
double eval_test_function(TestFunction f, double x);

// n inputs uniform on [lo, hi] (seeded), targets f(x) + N(0, noise_std^2)
// noise (seeded). The inputs drawn for a given seed do not depend on
// noise_std.
Dataset generate_dataset(TestFunction f, Eigen::Index n, double lo, double hi,
                         double noise_std, std::uint64_t seed);

// Evenly spaced inputs on [lo, hi] with noiseless targets; the holdout set.
Dataset grid_dataset(TestFunction f, Eigen::Index n, double lo, double hi);

enum class Scheme { full, random_subset, greedy };
const char* to_string(Scheme s);

struct SchemeResult {
    Scheme scheme = Scheme::full;
    double test_rmse = 0.0;
    double active_fraction = 1.0;
    Eigen::Index active_size = 0;
    double wall_time_s = 0.0;
    std::uint64_t seed = 0;
};

// Per-scheme knobs. delta NaN and max_stages 0 select the defaults;
// random_subset_size must be set (to the greedy run's active size) before
// running the random scheme.
struct SchemeConfig {
    double delta = std::numeric_limits<double>::quiet_NaN();
    int max_stages = 0;
    Eigen::Index random_subset_size = 0;
};

// Trains under one scheme and scores RMSE on the holdout inputs against the
// holdout targets (noiseless by construction of grid_dataset).
SchemeResult run_scheme(Scheme scheme,
                        const Dataset& train,
                        const Dataset& test,
                        const Hyperparameters& h,
                        const SchemeConfig& config,
                        std::uint64_t seed);

struct ExperimentConfig {
    std::vector<TestFunction> functions{TestFunction::x2sinx, TestFunction::xsinx,
                                        TestFunction::poly_sin};
    int trials = 20;
    Eigen::Index n_train = 200;
    Eigen::Index n_test = 200;
    double domain_lo = 0.0;
    double domain_hi = 10.0;
    double noise_std = -1.0; // < 0: 0.1 * std of the clean targets
    double delta = std::numeric_limits<double>::quiet_NaN(); // NaN: 1e-3 * std(y)
    int max_stages = 0;        // 0: ceil(N / 2)
    Eigen::Index subset_size = 0; // 0: min(N, 100)
    std::uint64_t seed = 42;
    int threads = 1;
    FitConfig fit;
};

// One results row per scheme x function x trial. error is empty on success;
// a failed row keeps rmse = NaN.
struct TrialRow {
    std::string scheme;
    std::string function;
    int trial = 0;
    std::uint64_t seed = 0;
    double rmse = std::numeric_limits<double>::quiet_NaN();
    Eigen::Index active_size = 0;
    double active_fraction = 0.0;
    double wall_time_s = 0.0;
    std::string error;
};

struct FunctionSummary {
    std::string function;
    double full_rmse_median = 0.0, full_rmse_iqr = 0.0;
    double random_rmse_median = 0.0, random_rmse_iqr = 0.0;
    double greedy_rmse_median = 0.0, greedy_rmse_iqr = 0.0;
    double active_fraction_median = 0.0;
    int trials = 0;
    int failed_trials = 0;
};

struct ComparisonTable {
    std::vector<TrialRow> rows;
    std::vector<FunctionSummary> summary;
};

// Quantile with linear interpolation between order statistics; NaN on empty.
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

// Deterministic fold of rows into per-function medians/IQRs.
std::vector<FunctionSummary> aggregate_rows(const std::vector<TrialRow>& rows);

// The full protocol: per function and trial, fit hyperparameters on a random
// subset, run greedy (fixing the active size), then random at equal size,
// then the full GP, all scored on the same holdout grid. Trials run in
// parallel when threads > 1; the table is identical at any thread count.
ComparisonTable compare_schemes(const ExperimentConfig& config);

} // namespace ggp
