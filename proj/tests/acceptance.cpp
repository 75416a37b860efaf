// Acceptance suite: runs every top-level criterion and prints one pass/fail
// line each. Exits nonzero if any criterion fails. argv[1] must be the path
// to the CLI binary (used by the golden-file criterion).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ggp/bench.hpp"
#include "ggp/errors.hpp"
#include "ggp/gp.hpp"
#include "ggp/greedy.hpp"
#include "ggp/io.hpp"
#include "ggp/kernel.hpp"
#include "ggp/linalg.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
    if (!ok)
        throw Failure(message);
}

std::string g_cli_path;

// ---------------------------------------------------------------- criterion 1

void oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<Eigen::Index> sizes(20, 100);

    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = sizes(rng);
        const Eigen::Index dim = 1 + trial % 2;
        const ggp::Dataset d = oracle::random_dataset(n, dim, rng);
        const ggp::Hyperparameters h = oracle::random_hypers(rng);

        ggp::GreedyState s = ggp::init_state(d, h, static_cast<std::uint64_t>(trial));
        while (true) {
            const oracle::DensePosterior ref =
                oracle::dense_remainder_posterior(d, h, s.active_idx, s.remainder_idx);
            const double mu_err = (s.mu - ref.mean).cwiseAbs().maxCoeff();
            const double sigma_err = oracle::max_abs_diff(s.sigma, ref.cov);
            require(mu_err < 1e-8, "stage " + std::to_string(s.stage) + " mean deviates by " +
                                       std::to_string(mu_err));
            require(sigma_err < 1e-8, "stage " + std::to_string(s.stage) +
                                          " covariance deviates by " + std::to_string(sigma_err));
            if (s.remainder_idx.size() <= 1)
                break;
            s = ggp::step(s, d);
        }
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require(seconds < 60.0, "runtime " + std::to_string(seconds) + "s exceeds 60s");
}

// ---------------------------------------------------------------- criterion 2

void inverse_update_correctness() {
    std::mt19937_64 rng(77);
    const Eigen::Index n = 201;
    const Eigen::MatrixXd A = oracle::random_spd(n, rng);

    ggp::GrowableInverse g;
    std::vector<double> counts, cumulative;
    const std::vector<Eigen::Index> probes{50, 100, 200};
    double chain_err = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        g = ggp::grow_inverse(g, A.block(0, t, t, 1), A(t, t));
        if (g.dim() == 200)
            chain_err = oracle::max_abs_diff(
                g.inverse(), oracle::dense_inverse(A.topLeftCorner(200, 200).eval()));
        for (Eigen::Index p : probes)
            if (t == p) {
                counts.push_back(static_cast<double>(g.last_grow_multiply_adds()));
                cumulative.push_back(static_cast<double>(g.cumulative_multiply_adds()));
            }
    }
    require(chain_err < 1e-8,
            "200-grow chain deviates from the dense inverse by " + std::to_string(chain_err));

    auto fit_and_check = [](const std::vector<double>& values,
                            const std::vector<double>& model, double tol,
                            const std::string& label) {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k) {
            num += values[k] * model[k];
            den += model[k] * model[k];
        }
        const double c = num / den;
        for (std::size_t k = 0; k < values.size(); ++k) {
            const double misfit = std::abs(values[k] - c * model[k]) / values[k];
            require(misfit < tol, label + " misfit " + std::to_string(misfit) + " at point " +
                                      std::to_string(k));
        }
    };

    std::vector<double> quad, law;
    for (Eigen::Index p : probes) {
        const double t = static_cast<double>(p);
        quad.push_back(t * t);
        law.push_back(t * (t + 1.0) * (2.0 * t + 1.0) / 6.0);
    }
    fit_and_check(counts, quad, 0.10, "per-grow quadratic");
    fit_and_check(cumulative, law, 0.15, "cumulative cubic");
}

// ---------------------------------------------------------------- criterion 3

void full_gp_correctness() {
    std::mt19937_64 rng(99);
    for (const Eigen::Index n : {50, 120, 200}) {
        for (const Eigen::Index dim : {1, 2}) {
            const ggp::Hyperparameters h = oracle::random_hypers(rng);
            const Eigen::MatrixXd X = oracle::random_inputs(n, dim, rng);
            const Eigen::VectorXd y = oracle::sample_gp_prior(X, h, rng);
            const Eigen::MatrixXd Xs = oracle::random_inputs(20, dim, rng);

            const ggp::GPModel m = ggp::GPModel::fit(X, y, h);
            const ggp::Prediction p = ggp::predict(m, Xs, true);
            const oracle::DensePosterior ref = oracle::dense_posterior(X, y, Xs, h);
            const double mean_err = (p.mean - ref.mean).cwiseAbs().maxCoeff();
            const double cov_err = oracle::max_abs_diff(p.covariance, ref.cov);
            require(mean_err < 1e-9, "predictive mean deviates by " + std::to_string(mean_err) +
                                         " at n=" + std::to_string(n));
            require(cov_err < 1e-9, "predictive covariance deviates by " +
                                        std::to_string(cov_err) + " at n=" + std::to_string(n));

            const double lml = ggp::log_marginal_likelihood(X, y, h);
            const double ref_lml =
                oracle::gaussian_log_density(y, ggp::gram_matrix(X, X, h, true));
            require(std::abs(lml - ref_lml) < 1e-8,
                    "LML deviates by " + std::to_string(std::abs(lml - ref_lml)) +
                        " at n=" + std::to_string(n));
        }
    }
}

// ---------------------------------------------------------------- criterion 4

void table2_qualitative() {
    const auto t0 = std::chrono::steady_clock::now();

    ggp::ExperimentConfig cfg; // stock benchmark defaults: n=200, [0,10], 20 trials
    cfg.seed = 42;
    cfg.threads = static_cast<int>(std::max(2u, std::thread::hardware_concurrency()));

    const ggp::ComparisonTable table = ggp::compare_schemes(cfg);
    require(table.summary.size() == 3, "expected three function summaries");
    for (const ggp::FunctionSummary& s : table.summary) {
        require(s.failed_trials == 0,
                s.function + ": " + std::to_string(s.failed_trials) + " trials failed");
        require(s.greedy_rmse_median <= s.random_rmse_median,
                s.function + ": greedy median " + std::to_string(s.greedy_rmse_median) +
                    " above random median " + std::to_string(s.random_rmse_median));
        require(s.greedy_rmse_median <= 1.5 * s.full_rmse_median,
                s.function + ": greedy median " + std::to_string(s.greedy_rmse_median) +
                    " above 1.5x full median " + std::to_string(s.full_rmse_median));
        require(s.active_fraction_median <= 0.45,
                s.function + ": median active fraction " +
                    std::to_string(s.active_fraction_median) + " above 0.45");
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require(seconds < 600.0, "runtime " + std::to_string(seconds) + "s exceeds 600s");
}

// ---------------------------------------------------------------- criterion 5

void convergence_rule() {
    std::mt19937_64 rng(5);
    const ggp::Dataset d = oracle::random_dataset(40, 1, rng);
    const ggp::Hyperparameters h{1.0, 1.0, 0.05};

    const ggp::GreedyResult immediate =
        ggp::run(d, h, std::numeric_limits<double>::infinity(), 39, 8);
    require(immediate.final_active_idx.size() == 2,
            "expected 2 active points under an infinite threshold, got " +
                std::to_string(immediate.final_active_idx.size()));

    const ggp::GreedyResult exhaustive =
        ggp::run(d, h, -std::numeric_limits<double>::infinity(), 39, 8);
    require(exhaustive.final_active_idx.size() == 39,
            "expected N-1 active points under a -inf threshold");

    const ggp::GPModel batch =
        ggp::GPModel::fit(exhaustive.model.train_inputs, exhaustive.model.train_targets, h);
    const Eigen::MatrixXd probe = oracle::random_inputs(25, 1, rng);
    for (const Eigen::MatrixXd& Xs : {exhaustive.model.train_inputs, probe}) {
        const ggp::Prediction a = ggp::predict(exhaustive.model, Xs, true);
        const ggp::Prediction b = ggp::predict(batch, Xs, true);
        require((a.mean - b.mean).cwiseAbs().maxCoeff() < 1e-8,
                "greedy-built model mean deviates from the batch GP");
        require(oracle::max_abs_diff(a.covariance, b.covariance) < 1e-8,
                "greedy-built model covariance deviates from the batch GP");
    }
}

// ---------------------------------------------------------------- criterion 6

void property_suite() {
    std::mt19937_64 rng(6);

    // kernel symmetry, bounds, decay
    for (int c = 0; c < 100; ++c) {
        const ggp::Hyperparameters h = oracle::random_hypers(rng);
        const Eigen::MatrixXd P = oracle::random_inputs(2, 1 + c % 3, rng);
        const Eigen::VectorXd a = P.row(0).transpose();
        const Eigen::VectorXd b = P.row(1).transpose();
        const double kab = ggp::se_kernel(a, b, h, false);
        require(kab == ggp::se_kernel(b, a, h, false), "kernel symmetry violated");
        require(kab >= 0.0 && kab <= h.signal_variance, "kernel bounds violated");
        const double nearer = ggp::se_kernel(a, (a + 0.5 * (b - a)).eval(), h, false);
        if ((a - b).norm() > 1e-12)
            require(nearer > kab, "kernel decay violated");
    }

    // Gram matrices with noise are positive definite
    for (int c = 0; c < 100; ++c) {
        const ggp::Hyperparameters h = oracle::random_hypers(rng);
        const Eigen::MatrixXd X = oracle::random_inputs(15, 1, rng);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ggp::gram_matrix(X, X, h, true));
        require(es.eigenvalues().minCoeff() > 0.0, "noisy Gram matrix not PD");
    }

    // variance monotonicity and the partition invariant across greedy stages
    int monotonicity_checks = 0;
    for (int c = 0; c < 4; ++c) {
        const ggp::Dataset d = oracle::random_dataset(30, 1, rng);
        const ggp::Hyperparameters h = oracle::random_hypers(rng);
        ggp::GreedyState s = ggp::init_state(d, h, static_cast<std::uint64_t>(c));
        while (s.remainder_idx.size() > 1) {
            const ggp::GreedyState next = ggp::step(s, d);
            const Eigen::Index chosen = next.active_idx.back();
            for (std::size_t p = 0, pn = 0; p < s.remainder_idx.size(); ++p) {
                if (s.remainder_idx[p] == chosen)
                    continue;
                require(next.sigma(static_cast<Eigen::Index>(pn), static_cast<Eigen::Index>(pn)) <=
                            s.sigma(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)) +
                                1e-10,
                        "variance increased across a stage");
                ++monotonicity_checks;
                ++pn;
            }
            std::set<Eigen::Index> all(next.active_idx.begin(), next.active_idx.end());
            all.insert(next.remainder_idx.begin(), next.remainder_idx.end());
            require(all.size() == 30, "active/remainder sets do not partition the dataset");
            s = next;
        }
    }
    require(monotonicity_checks >= 100, "not enough monotonicity cases");

    // determinism under fixed seeds at any thread count
    ggp::ExperimentConfig cfg;
    cfg.functions = {ggp::TestFunction::xsinx};
    cfg.trials = 2;
    cfg.n_train = 50;
    cfg.n_test = 30;
    cfg.subset_size = 25;
    cfg.fit.num_starts = 2;
    cfg.fit.max_iterations = 60;
    cfg.seed = 13;
    cfg.threads = 1;
    const ggp::ComparisonTable serial = ggp::compare_schemes(cfg);
    cfg.threads = 3;
    const ggp::ComparisonTable threaded = ggp::compare_schemes(cfg);
    require(serial.rows.size() == threaded.rows.size(), "row counts differ across thread counts");
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        const bool same = serial.rows[i].scheme == threaded.rows[i].scheme &&
                          serial.rows[i].seed == threaded.rows[i].seed &&
                          ((std::isnan(serial.rows[i].rmse) && std::isnan(threaded.rows[i].rmse)) ||
                           serial.rows[i].rmse == threaded.rows[i].rmse) &&
                          serial.rows[i].active_size == threaded.rows[i].active_size;
        require(same, "row " + std::to_string(i) + " differs across thread counts");
    }

    // predictive variance is never negative
    for (int c = 0; c < 100; ++c) {
        const ggp::Hyperparameters h = oracle::random_hypers(rng);
        const Eigen::MatrixXd X = oracle::random_inputs(10, 1, rng);
        const Eigen::VectorXd y = oracle::sample_gp_prior(X, h, rng);
        const ggp::GPModel m = ggp::GPModel::fit(X, y, h);
        const ggp::Prediction p = ggp::predict(m, oracle::random_inputs(6, 1, rng));
        require(p.variance.minCoeff() >= 0.0, "negative predictive variance");
    }
}

// ---------------------------------------------------------------- criterion 7

int run_cli(const std::string& args, const fs::path& dir, std::string* out_text = nullptr) {
    const fs::path out_file = dir / "stdout.txt";
    const std::string cmd =
        g_cli_path + " " + args + " > " + out_file.string() + " 2> /dev/null";
    const int raw = std::system(cmd.c_str());
    if (out_text) {
        std::ifstream in(out_file);
        std::stringstream buf;
        buf << in.rdbuf();
        *out_text = buf.str();
    }
    return WEXITSTATUS(raw);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    require(in.good(), "missing file: " + p.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void cli_golden() {
    require(!g_cli_path.empty(), "CLI path not provided on the command line");
    const fs::path dir = fs::temp_directory_path() / "greedygp_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    // benchmark: the aggregate table recomputes exactly from the rows
    std::string bench_stdout;
    const int bench_rc = run_cli("benchmark --function xsinx --trials 1 --n 60 "
                                 "--subset-size 30 --seed 9 --threads 2 --out " +
                                     (dir / "bench").string(),
                                 dir, &bench_stdout);
    require(bench_rc == 0, "benchmark exited with " + std::to_string(bench_rc));
    const auto rows = ggp::parse_results_csv(dir / "bench" / "results.csv");
    require(rows.size() == 3, "expected 3 result rows");
    const std::string recomputed = ggp::render_summary_table(ggp::aggregate_rows(rows));
    require(recomputed == slurp(dir / "bench" / "summary.txt"),
            "summary table does not recompute from the results rows");

    // trace stage count equals the RMSE history length
    const int train_rc = run_cli("train-greedy --function xsinx --n 60 --subset-size 30 "
                                 "--max-stages 9 --delta -inf --seed 4 --trace --out " +
                                     (dir / "train").string(),
                                 dir);
    require(train_rc == 0, "train-greedy exited with " + std::to_string(train_rc));
    std::istringstream rmse_in(slurp(dir / "train" / "rmse_history.csv"));
    std::string line;
    std::getline(rmse_in, line);
    std::size_t stages = 0;
    while (std::getline(rmse_in, line))
        ++stages;
    std::istringstream trace_in(slurp(dir / "train" / "trace.csv"));
    std::getline(trace_in, line);
    std::set<std::string> trace_stages;
    while (std::getline(trace_in, line))
        trace_stages.insert(line.substr(0, line.find(',')));
    require(trace_stages.size() == stages,
            "trace covers " + std::to_string(trace_stages.size()) + " stages but the history has " +
                std::to_string(stages));

    // dataset CSV round-trips byte-exactly at full precision
    std::mt19937_64 rng(7);
    const ggp::Dataset d = oracle::random_dataset(40, 2, rng);
    std::ostringstream first;
    ggp::write_dataset_csv(first, d);
    std::istringstream parse_in(first.str());
    const ggp::Dataset back = ggp::parse_dataset_csv(parse_in);
    std::ostringstream second;
    ggp::write_dataset_csv(second, back);
    require(first.str() == second.str(), "dataset CSV round-trip is not byte-exact");
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1)
        g_cli_path = argv[1];

    const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
        {"oracle equivalence of incremental and batch posteriors", oracle_equivalence},
        {"inverse-update correctness and quadratic cost", inverse_update_correctness},
        {"full-GP predictive and marginal-likelihood correctness", full_gp_correctness},
        {"qualitative scheme ordering on the benchmark functions", table2_qualitative},
        {"convergence-rule conformance", convergence_rule},
        {"property suite", property_suite},
        {"CLI golden files", cli_golden},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string message;
        bool ok = true;
        try {
            criteria[i].second();
        } catch (const std::exception& e) {
            ok = false;
            message = e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << (i + 1) << ": "
                  << criteria[i].first;
        std::cout << " (" << std::fixed << std::setprecision(1) << seconds << "s)";
        if (!ok)
            std::cout << " -- " << message;
        std::cout << "\n" << std::defaultfloat;
        if (!ok)
            ++failures;
    }
    return failures == 0 ? 0 : 1;
}
