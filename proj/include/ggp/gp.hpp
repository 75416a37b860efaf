#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ggp/dataset.hpp"
#include "ggp/kernel.hpp"
#include "ggp/linalg.hpp"

namespace ggp {

// Batch GP regression model. cached_inverse holds (K + sigma_n^2 I)^-1 for
// the stored training set; its dimension always equals the number of
// training points. Immutable after construction.
struct GPModel {
    Hyperparameters hypers;
    Eigen::MatrixXd train_inputs;
    Eigen::VectorXd train_targets;
    GrowableInverse cached_inverse;

    // Batch fit: inverts K + sigma_n^2 I directly. An empty training set is
    // allowed and yields the prior.
    static GPModel fit(Eigen::MatrixXd X, Eigen::VectorXd y, const Hyperparameters& h);
};

// Predictive posterior of the latent function at the query points. The
// covariance never includes sigma_n^2; variance holds the diagonal, clamped
// to >= 0, and covariance is filled only when full covariance was requested.
struct Prediction {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;
    Eigen::MatrixXd covariance;
};

Prediction predict(const GPModel& m,
                   const Eigen::Ref<const Eigen::MatrixXd>& X_star,
                   bool want_full_cov = false);

// log N(y; 0, K + sigma_n^2 I), the marginalized log-likelihood of the
// targets under the GP prior.
double log_marginal_likelihood(const Eigen::Ref<const Eigen::MatrixXd>& X,
                               const Eigen::Ref<const Eigen::VectorXd>& y,
                               const Hyperparameters& h);

// Settings for the multi-start simplex search over log-parameterized
// hyperparameters (order: sigma_f^2, lengthscale, sigma_n^2).
struct FitConfig {
    int num_starts = 8;
    int max_iterations = 300;
    double tolerance = 1e-9;
    double initial_step = 0.75;
    std::array<double, 3> log_lower{-6.0, -4.0, -10.0};
    std::array<double, 3> log_upper{6.0, 4.0, 4.0};
};

struct FitReport {
    Hyperparameters hypers;
    double lml = 0.0;                   // best LML achieved on the subset
    std::vector<Eigen::Index> subset;   // indices the likelihood was scored on
    std::vector<double> start_lmls;     // LML at each start's initial point
};

// Maximizes the subset LML over log-space hyperparameters from num_starts
// seeded starting points; the winner is the best final value, ties going to
// the lowest start index. The returned LML is never below the LML at any
// start's initial point.
FitReport fit_hyperparameters_report(const Dataset& d,
                                     Eigen::Index subset_size,
                                     std::uint64_t rng_seed,
                                     const FitConfig& config = {});

Hyperparameters fit_hyperparameters(const Dataset& d,
                                    Eigen::Index subset_size,
                                    std::uint64_t rng_seed,
                                    const FitConfig& config = {});

inline Eigen::Index default_subset_size(Eigen::Index n) {
    return n < 100 ? n : 100;
}

// First k of a seeded uniform permutation of {0..n-1}; the subset drawn by
// fit_hyperparameters_report for the same (n, k, seed).
std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n,
                                                     Eigen::Index k,
                                                     std::uint64_t seed);

} // namespace ggp
