#include "ggp/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "ggp/errors.hpp"
#include "ggp/nelder_mead.hpp"

namespace ggp {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

// splitmix64 step; used to derive independent seed streams.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

GPModel GPModel::fit(Eigen::MatrixXd X, Eigen::VectorXd y, const Hyperparameters& h) {
    h.validate();
    if (X.rows() != y.size())
        throw std::invalid_argument("GPModel::fit: inputs and targets differ in length");
    GPModel m;
    m.hypers = h;
    if (X.rows() > 0) {
        const Eigen::MatrixXd C = gram_matrix(X, X, h, /*add_noise_on_diagonal=*/true);
        m.cached_inverse = GrowableInverse::from_matrix(C);
    }
    m.train_inputs = std::move(X);
    m.train_targets = std::move(y);
    return m;
}

Prediction predict(const GPModel& m,
                   const Eigen::Ref<const Eigen::MatrixXd>& X_star,
                   bool want_full_cov) {
    m.hypers.validate();
    if (X_star.rows() == 0)
        throw std::invalid_argument("predict: no query points");
    if (!X_star.allFinite())
        throw std::invalid_argument("predict: non-finite query point");

    const Eigen::Index n_star = X_star.rows();
    Prediction p;

    if (m.train_inputs.rows() == 0) {
        // no data: the prior
        p.mean = Eigen::VectorXd::Zero(n_star);
        if (want_full_cov) {
            p.covariance = gram_matrix(X_star, X_star, m.hypers, false);
            p.variance = p.covariance.diagonal().cwiseMax(0.0);
            p.covariance.diagonal() = p.variance;
        } else {
            p.variance = Eigen::VectorXd::Constant(n_star, m.hypers.signal_variance);
        }
        return p;
    }

    if (X_star.cols() != m.train_inputs.cols())
        throw std::invalid_argument("predict: query dimension differs from training dimension");
    if (m.cached_inverse.dim() != m.train_inputs.rows())
        throw std::invalid_argument("predict: cached inverse does not match the training set");

    const Eigen::MatrixXd K_star = gram_matrix(X_star, m.train_inputs, m.hypers, false);
    const Eigen::MatrixXd W = K_star * m.cached_inverse.inverse(); // K_* (K + s2 I)^-1
    p.mean = W * m.train_targets;

    if (want_full_cov) {
        const Eigen::MatrixXd K_ss = gram_matrix(X_star, X_star, m.hypers, false);
        p.covariance = K_ss - W * K_star.transpose();
        p.variance = p.covariance.diagonal().cwiseMax(0.0);
        p.covariance.diagonal() = p.variance;
    } else {
        p.variance.resize(n_star);
        for (Eigen::Index i = 0; i < n_star; ++i) {
            const double v = m.hypers.signal_variance - W.row(i).dot(K_star.row(i));
            p.variance(i) = std::max(v, 0.0);
        }
    }
    return p;
}

double log_marginal_likelihood(const Eigen::Ref<const Eigen::MatrixXd>& X,
                               const Eigen::Ref<const Eigen::VectorXd>& y,
                               const Hyperparameters& h) {
    h.validate();
    if (y.size() < 1 || X.rows() != y.size())
        throw std::invalid_argument("log_marginal_likelihood: need matching inputs and targets");

    const Eigen::MatrixXd C = gram_matrix(X, X, h, /*add_noise_on_diagonal=*/true);
    const Eigen::VectorXd alpha = solve_psd(C, y);
    const double n = static_cast<double>(y.size());
    return -0.5 * y.dot(alpha) - 0.5 * log_det_psd(C) - 0.5 * n * kLogTwoPi;
}

std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n,
                                                     Eigen::Index k,
                                                     std::uint64_t seed) {
    if (k < 0 || k > n)
        throw std::invalid_argument("sample_without_replacement: subset size out of range");
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::mt19937_64 rng(seed);
    for (Eigen::Index i = 0; i < k; ++i) {
        std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

namespace {

// Heuristic center for the first search start: signal variance from the
// target variance, lengthscale from the median pairwise distance, noise at
// a tenth of the target variance.
Eigen::Vector3d heuristic_log_start(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const double var_y = sample_std(y) * sample_std(y);
    const double sf2 = var_y > 0.0 ? var_y : 1e-300;

    const Eigen::Index m = std::min<Eigen::Index>(X.rows(), 50);
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double d = (X.row(i) - X.row(j)).norm();
            if (d > 0.0)
                dists.push_back(d);
        }
    double ell = 1.0;
    if (!dists.empty()) {
        const auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
        std::nth_element(dists.begin(), mid, dists.end());
        ell = *mid;
    }

    const double sn2 = 0.1 * var_y + 1e-8;
    return {std::log(sf2), std::log(ell), std::log(sn2)};
}

} // namespace

FitReport fit_hyperparameters_report(const Dataset& d,
                                     Eigen::Index subset_size,
                                     std::uint64_t rng_seed,
                                     const FitConfig& config) {
    d.validate();
    if (subset_size < 1 || subset_size > d.size())
        throw std::invalid_argument("fit_hyperparameters: subset_size must be in [1, N]");
    if (config.num_starts < 1)
        throw std::invalid_argument("fit_hyperparameters: need at least one start");

    FitReport report;
    report.subset = sample_without_replacement(d.size(), subset_size, rng_seed);

    Eigen::MatrixXd Xs(subset_size, d.dim());
    Eigen::VectorXd ys(subset_size);
    for (Eigen::Index i = 0; i < subset_size; ++i) {
        Xs.row(i) = d.inputs.row(report.subset[static_cast<std::size_t>(i)]);
        ys(i) = d.targets(report.subset[static_cast<std::size_t>(i)]);
    }

    const Eigen::Vector3d lower(config.log_lower[0], config.log_lower[1], config.log_lower[2]);
    const Eigen::Vector3d upper(config.log_upper[0], config.log_upper[1], config.log_upper[2]);

    auto objective = [&](const Eigen::VectorXd& log_theta) -> double {
        Hyperparameters h;
        h.signal_variance = std::exp(log_theta(0));
        h.lengthscale = std::exp(log_theta(1));
        h.noise_variance = std::exp(log_theta(2));
        try {
            return -log_marginal_likelihood(Xs, ys, h);
        } catch (const NotPositiveDefiniteError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::vector<Eigen::VectorXd> starts;
    starts.reserve(static_cast<std::size_t>(config.num_starts));
    starts.push_back(heuristic_log_start(Xs, ys).cwiseMax(lower).cwiseMin(upper));
    std::mt19937_64 rng(mix64(rng_seed ^ 0x517cc1b727220a95ULL));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (starts.size() < static_cast<std::size_t>(config.num_starts)) {
        Eigen::VectorXd x(3);
        for (int i = 0; i < 3; ++i)
            x(i) = lower(i) + (upper(i) - lower(i)) * unit(rng);
        starts.push_back(std::move(x));
    }

    NelderMeadOptions nm;
    nm.max_iterations = config.max_iterations;
    nm.tolerance = config.tolerance;
    nm.initial_step = config.initial_step;

    double best_value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x;
    for (const Eigen::VectorXd& x0 : starts) {
        report.start_lmls.push_back(-objective(x0));
        const NelderMeadResult r = nelder_mead_minimize(objective, x0, lower, upper, nm);
        if (r.value < best_value) {
            best_value = r.value;
            best_x = r.x;
        }
    }
    if (!std::isfinite(best_value))
        throw NotPositiveDefiniteError("fit_hyperparameters: every start failed factorization");

    report.hypers.signal_variance = std::exp(best_x(0));
    report.hypers.lengthscale = std::exp(best_x(1));
    report.hypers.noise_variance = std::exp(best_x(2));
    report.hypers.validate();
    report.lml = -best_value;
    return report;
}

Hyperparameters fit_hyperparameters(const Dataset& d,
                                    Eigen::Index subset_size,
                                    std::uint64_t rng_seed,
                                    const FitConfig& config) {
    return fit_hyperparameters_report(d, subset_size, rng_seed, config).hypers;
}

} // namespace ggp
