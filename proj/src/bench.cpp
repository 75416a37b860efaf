#include "ggp/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>

#include "ggp/errors.hpp"
#include "ggp/greedy.hpp"

namespace ggp {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double rmse_against(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth) {
    return std::sqrt((predicted - truth).squaredNorm() / static_cast<double>(truth.size()));
}

// Runs tasks 0..count-1 on `threads` workers; each task writes only its own
// slot, so results do not depend on the thread count.
void parallel_for(int count, int threads, const std::function<void(int)>& task) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i)
            task(i);
        return;
    }
    std::atomic<int> cursor{0};
    auto worker = [&] {
        for (int i = cursor.fetch_add(1); i < count; i = cursor.fetch_add(1))
            task(i);
    };
    std::vector<std::thread> pool;
    const int n_workers = std::min(threads, count);
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
}

} // namespace

const char* to_string(TestFunction f) {
    switch (f) {
    case TestFunction::x2sinx: return "x2sinx";
    case TestFunction::xsinx: return "xsinx";
    case TestFunction::poly_sin: return "poly_sin";
    }
    return "?";
}

std::optional<TestFunction> parse_test_function(std::string_view name) {
    if (name == "x2sinx") return TestFunction::x2sinx;
    if (name == "xsinx") return TestFunction::xsinx;
    if (name == "poly_sin") return TestFunction::poly_sin;
    return std::nullopt;
}

double eval_test_function(TestFunction f, double x) {
    if (!std::isfinite(x))
        throw std::invalid_argument("eval_test_function: non-finite input");
    switch (f) {
    case TestFunction::x2sinx: return x * x * std::sin(x);
    case TestFunction::xsinx: return x * std::sin(x);
    case TestFunction::poly_sin: return 0.5 * std::sin(x) + 0.5 * x - 0.02 * (x - 5.0) * (x - 5.0);
    }
    throw std::invalid_argument("eval_test_function: unknown function");
}

Dataset generate_dataset(TestFunction f, Eigen::Index n, double lo, double hi,
                         double noise_std, std::uint64_t seed) {
    if (n < 2)
        throw std::invalid_argument("generate_dataset: need n >= 2");
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
        throw std::invalid_argument("generate_dataset: invalid domain interval");
    if (!(std::isfinite(noise_std) && noise_std >= 0.0))
        throw std::invalid_argument("generate_dataset: noise_std must be >= 0");

    Dataset d;
    d.inputs.resize(n, 1);
    d.targets.resize(n);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(lo, hi);
    for (Eigen::Index i = 0; i < n; ++i)
        d.inputs(i, 0) = ux(rng);
    for (Eigen::Index i = 0; i < n; ++i)
        d.targets(i) = eval_test_function(f, d.inputs(i, 0));
    if (noise_std > 0.0) {
        std::normal_distribution<double> eps(0.0, noise_std);
        for (Eigen::Index i = 0; i < n; ++i)
            d.targets(i) += eps(rng);
    }

    d.metadata = DatasetMetadata{to_string(f), noise_std, lo, hi, seed};
    return d;
}

Dataset grid_dataset(TestFunction f, Eigen::Index n, double lo, double hi) {
    if (n < 2)
        throw std::invalid_argument("grid_dataset: need n >= 2");
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
        throw std::invalid_argument("grid_dataset: invalid domain interval");
    Dataset d;
    d.inputs.resize(n, 1);
    d.targets.resize(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        d.inputs(i, 0) = lo + step * static_cast<double>(i);
        d.targets(i) = eval_test_function(f, d.inputs(i, 0));
    }
    d.metadata = DatasetMetadata{to_string(f), 0.0, lo, hi, 0};
    return d;
}

const char* to_string(Scheme s) {
    switch (s) {
    case Scheme::full: return "full";
    case Scheme::random_subset: return "random";
    case Scheme::greedy: return "greedy";
    }
    return "?";
}

namespace {

SchemeResult run_scheme_impl(Scheme scheme,
                             const Dataset& train,
                             const Dataset& test,
                             const Hyperparameters& h,
                             const SchemeConfig& config,
                             std::uint64_t seed) {
    train.validate();
    test.validate();
    const Eigen::Index n = train.size();
    const auto t0 = std::chrono::steady_clock::now();

    SchemeResult r;
    r.scheme = scheme;
    r.seed = seed;

    switch (scheme) {
    case Scheme::full: {
        const GPModel model = GPModel::fit(train.inputs, train.targets, h);
        r.test_rmse = rmse_against(predict(model, test.inputs).mean, test.targets);
        r.active_size = n;
        r.active_fraction = 1.0;
        break;
    }
    case Scheme::greedy: {
        const double delta =
            std::isnan(config.delta) ? default_delta(train.targets) : config.delta;
        const int max_stages =
            config.max_stages > 0 ? config.max_stages : default_max_stages(n);
        const GreedyResult res = run(train, h, delta, max_stages, seed);
        r.test_rmse = rmse_against(predict(res.model, test.inputs).mean, test.targets);
        r.active_size = static_cast<Eigen::Index>(res.final_active_idx.size());
        r.active_fraction = static_cast<double>(r.active_size) / static_cast<double>(n);
        break;
    }
    case Scheme::random_subset: {
        const Eigen::Index k = config.random_subset_size;
        if (k < 1 || k > n)
            throw std::invalid_argument(
                "run_scheme: random scheme needs the matched active size from the greedy run");
        const std::vector<Eigen::Index> idx = sample_without_replacement(n, k, seed);
        Eigen::MatrixXd X(k, train.dim());
        Eigen::VectorXd y(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            X.row(i) = train.inputs.row(idx[static_cast<std::size_t>(i)]);
            y(i) = train.targets(idx[static_cast<std::size_t>(i)]);
        }
        const GPModel model = GPModel::fit(std::move(X), std::move(y), h);
        r.test_rmse = rmse_against(predict(model, test.inputs).mean, test.targets);
        r.active_size = k;
        r.active_fraction = static_cast<double>(k) / static_cast<double>(n);
        break;
    }
    }

    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace

SchemeResult run_scheme(Scheme scheme,
                        const Dataset& train,
                        const Dataset& test,
                        const Hyperparameters& h,
                        const SchemeConfig& config,
                        std::uint64_t seed) {
    // same-type rethrow keeps the error classification while naming the scheme
    const std::string context = std::string(to_string(scheme)) + " scheme: ";
    try {
        return run_scheme_impl(scheme, train, test, h, config, seed);
    } catch (const NotPositiveDefiniteError& e) {
        throw NotPositiveDefiniteError(context + e.what(), e.schur_complement());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(context + e.what());
    }
}

double quantile(std::vector<double> values, double q) {
    if (values.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size())
        return values.back();
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

double median(std::vector<double> values) {
    return quantile(std::move(values), 0.5);
}

std::vector<FunctionSummary> aggregate_rows(const std::vector<TrialRow>& rows) {
    std::vector<std::string> order;
    for (const TrialRow& row : rows)
        if (std::find(order.begin(), order.end(), row.function) == order.end())
            order.push_back(row.function);

    std::vector<FunctionSummary> out;
    for (const std::string& fn : order) {
        FunctionSummary s;
        s.function = fn;
        std::vector<double> full, random_subset, greedy, fractions;
        std::vector<int> failed;
        for (const TrialRow& row : rows) {
            if (row.function != fn)
                continue;
            s.trials = std::max(s.trials, row.trial + 1);
            if (!row.error.empty()) {
                if (std::find(failed.begin(), failed.end(), row.trial) == failed.end())
                    failed.push_back(row.trial);
                continue;
            }
            if (row.scheme == "full")
                full.push_back(row.rmse);
            else if (row.scheme == "random")
                random_subset.push_back(row.rmse);
            else if (row.scheme == "greedy") {
                greedy.push_back(row.rmse);
                fractions.push_back(row.active_fraction);
            }
        }
        s.full_rmse_median = median(full);
        s.full_rmse_iqr = quantile(full, 0.75) - quantile(full, 0.25);
        s.random_rmse_median = median(random_subset);
        s.random_rmse_iqr = quantile(random_subset, 0.75) - quantile(random_subset, 0.25);
        s.greedy_rmse_median = median(greedy);
        s.greedy_rmse_iqr = quantile(greedy, 0.75) - quantile(greedy, 0.25);
        s.active_fraction_median = median(fractions);
        s.failed_trials = static_cast<int>(failed.size());
        out.push_back(std::move(s));
    }
    return out;
}

ComparisonTable compare_schemes(const ExperimentConfig& config) {
    if (config.functions.empty())
        throw std::invalid_argument("compare_schemes: no functions configured");
    if (config.trials < 1)
        throw std::invalid_argument("compare_schemes: need at least one trial");

    const int n_tasks = static_cast<int>(config.functions.size()) * config.trials;
    std::vector<std::array<TrialRow, 3>> slots(static_cast<std::size_t>(n_tasks));

    auto task = [&](int index) {
        const int fi = index / config.trials;
        const int trial = index % config.trials;
        const TestFunction fn = config.functions[static_cast<std::size_t>(fi)];

        const std::uint64_t base =
            mix64(config.seed ^ mix64((static_cast<std::uint64_t>(fi) << 32) ^
                                      static_cast<std::uint64_t>(trial)));
        const std::uint64_t data_seed = mix64(base ^ 1);
        const std::uint64_t fit_seed = mix64(base ^ 2);
        const std::uint64_t greedy_seed = mix64(base ^ 3);
        const std::uint64_t random_seed = mix64(base ^ 4);

        auto& rows = slots[static_cast<std::size_t>(index)];
        for (std::size_t k = 0; k < rows.size(); ++k) {
            rows[k].function = to_string(fn);
            rows[k].trial = trial;
        }
        rows[0].scheme = "full";
        rows[0].seed = base;
        rows[1].scheme = "random";
        rows[1].seed = random_seed;
        rows[2].scheme = "greedy";
        rows[2].seed = greedy_seed;

        try {
            double noise = config.noise_std;
            if (noise < 0.0) {
                const Dataset clean = generate_dataset(fn, config.n_train, config.domain_lo,
                                                       config.domain_hi, 0.0, data_seed);
                noise = 0.1 * sample_std(clean.targets);
            }
            const Dataset train = generate_dataset(fn, config.n_train, config.domain_lo,
                                                   config.domain_hi, noise, data_seed);
            const Dataset test =
                grid_dataset(fn, config.n_test, config.domain_lo, config.domain_hi);

            const Eigen::Index subset = config.subset_size > 0
                                            ? config.subset_size
                                            : default_subset_size(train.size());
            const Hyperparameters h = fit_hyperparameters(train, subset, fit_seed, config.fit);

            SchemeConfig scheme_cfg;
            scheme_cfg.delta = config.delta;
            scheme_cfg.max_stages = config.max_stages;

            auto fill = [](TrialRow& row, const SchemeResult& res) {
                row.rmse = res.test_rmse;
                row.active_size = res.active_size;
                row.active_fraction = res.active_fraction;
                row.wall_time_s = res.wall_time_s;
            };

            // greedy first: it fixes the size the random scheme must match
            try {
                const SchemeResult g =
                    run_scheme(Scheme::greedy, train, test, h, scheme_cfg, greedy_seed);
                fill(rows[2], g);
                scheme_cfg.random_subset_size = g.active_size;
                try {
                    fill(rows[1], run_scheme(Scheme::random_subset, train, test, h, scheme_cfg,
                                             random_seed));
                } catch (const std::exception& e) {
                    rows[1].error = e.what();
                }
            } catch (const std::exception& e) {
                rows[2].error = e.what();
                rows[1].error = "skipped: greedy scheme failed, matched size unavailable";
            }
            try {
                fill(rows[0], run_scheme(Scheme::full, train, test, h, scheme_cfg, base));
            } catch (const std::exception& e) {
                rows[0].error = e.what();
            }
        } catch (const std::exception& e) {
            for (auto& row : rows)
                if (row.error.empty() && std::isnan(row.rmse))
                    row.error = e.what();
        }
    };

    parallel_for(n_tasks, config.threads, task);

    ComparisonTable table;
    table.rows.reserve(static_cast<std::size_t>(n_tasks) * 3);
    for (const auto& rows : slots)
        for (const TrialRow& row : rows)
            table.rows.push_back(row);
    table.summary = aggregate_rows(table.rows);
    return table;
}

} // namespace ggp
