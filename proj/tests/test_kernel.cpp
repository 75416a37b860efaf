#include <doctest.h>

#include <cmath>
#include <random>

#include "ggp/kernel.hpp"
#include "oracles.hpp"

using ggp::gram_matrix;
using ggp::Hyperparameters;
using ggp::se_kernel;

namespace {

Eigen::VectorXd vec1(double x) {
    Eigen::VectorXd v(1);
    v << x;
    return v;
}

} // namespace

TEST_CASE("hyperparameter validation") {
    Hyperparameters h;
    CHECK_NOTHROW(h.validate());

    h.signal_variance = 0.0;
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
    h.signal_variance = 1.0;

    h.lengthscale = -1.0;
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
    h.lengthscale = 1.0;

    h.noise_variance = -1e-9;
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
    h.noise_variance = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
}

TEST_CASE("se_kernel at zero distance includes the noise term") {
    Hyperparameters h{1.0, 1.0, 0.25};
    CHECK(se_kernel(vec1(0.0), vec1(0.0), h, true) == 1.25);
    CHECK(se_kernel(vec1(0.0), vec1(0.0), h, false) == 1.0);
}

TEST_CASE("se_kernel matches direct evaluation at unit distance") {
    Hyperparameters h{2.0, 1.0, 0.0};
    const double expected = 2.0 * std::exp(-0.5);
    CHECK(se_kernel(vec1(0.0), vec1(1.0), h, false) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(se_kernel(vec1(0.0), vec1(1.0), h, false) == doctest::Approx(1.21306).epsilon(1e-5));
}

TEST_CASE("se_kernel decays to numerical zero at extreme distance") {
    Hyperparameters h{1.0, 1.0, 0.0};
    CHECK(se_kernel(vec1(0.0), vec1(100.0), h, false) < 1e-300);
}

TEST_CASE("se_kernel rejects non-finite inputs and bad dimensions") {
    Hyperparameters h;
    CHECK_THROWS_AS(se_kernel(vec1(std::numeric_limits<double>::infinity()), vec1(0.0), h, false),
                    std::invalid_argument);
    CHECK_THROWS_AS(se_kernel(vec1(std::numeric_limits<double>::quiet_NaN()), vec1(0.0), h, false),
                    std::invalid_argument);
    Eigen::VectorXd two(2);
    two << 0.0, 0.0;
    CHECK_THROWS_AS(se_kernel(two, vec1(0.0), h, false), std::invalid_argument);
    CHECK_THROWS_AS(se_kernel(Eigen::VectorXd(0), Eigen::VectorXd(0), h, false),
                    std::invalid_argument);
}

TEST_CASE("se_kernel symmetry, bounds, and strict decay (property)") {
    std::mt19937_64 rng(20260801);
    std::uniform_int_distribution<int> dims(1, 3);
    for (int trial = 0; trial < 120; ++trial) {
        const Hyperparameters h = oracle::random_hypers(rng);
        const Eigen::Index d = dims(rng);
        const Eigen::MatrixXd P = oracle::random_inputs(2, d, rng);
        const Eigen::VectorXd a = P.row(0).transpose();
        const Eigen::VectorXd b = P.row(1).transpose();
        CAPTURE(trial);

        const double kab = se_kernel(a, b, h, false);
        CHECK(kab == se_kernel(b, a, h, false)); // exact
        CHECK(kab >= 0.0);
        CHECK(kab <= h.signal_variance);
        CHECK(se_kernel(a, a, h, false) == h.signal_variance);
        if ((a - b).norm() > 0.0)
            CHECK(kab < h.signal_variance);

        // strictly decreasing in distance along a ray
        const Eigen::VectorXd dir = Eigen::VectorXd::Ones(d).normalized();
        double prev = se_kernel(a, a, h, false);
        for (double r : {0.5, 1.0, 2.0, 4.0}) {
            const double k = se_kernel(a, (a + r * dir).eval(), h, false);
            CHECK(k < prev);
            prev = k;
        }
    }
}

TEST_CASE("gram_matrix single point with noise") {
    Hyperparameters h{1.0, 1.0, 0.25};
    Eigen::MatrixXd X(1, 1);
    X << 3.0;
    const Eigen::MatrixXd K = gram_matrix(X, X, h, true);
    REQUIRE(K.rows() == 1);
    REQUIRE(K.cols() == 1);
    CHECK(K(0, 0) == 1.25);
}

TEST_CASE("gram_matrix agrees with se_kernel entrywise and handles the diagonal") {
    std::mt19937_64 rng(7);
    const Hyperparameters h = oracle::random_hypers(rng);
    const Eigen::MatrixXd X = oracle::random_inputs(12, 2, rng);
    const Eigen::MatrixXd K = gram_matrix(X, X, h, true);
    const Eigen::MatrixXd K0 = gram_matrix(X, X, h, false);

    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        CHECK(K(i, i) == h.signal_variance + h.noise_variance);
        for (Eigen::Index j = 0; j < X.rows(); ++j) {
            const double base = se_kernel(X.row(i).transpose(), X.row(j).transpose(), h, false);
            CHECK(K0(i, j) == base); // exact
            CHECK(K(i, j) == (i == j ? base + h.noise_variance : base));
        }
    }
    // noise identity: K - sigma_n^2 I == K0 entrywise
    Eigen::MatrixXd K_stripped = K;
    K_stripped.diagonal().array() -= h.noise_variance;
    CHECK(oracle::max_abs_diff(K_stripped, K0) == 0.0);
}

TEST_CASE("gram_matrix with noise is positive definite (property)") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        Hyperparameters h = oracle::random_hypers(rng);
        const Eigen::MatrixXd X = oracle::random_inputs(20, 1, rng);
        const Eigen::MatrixXd K = gram_matrix(X, X, h, true);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
        CAPTURE(trial);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("gram_matrix input validation") {
    Hyperparameters h;
    Eigen::MatrixXd X(2, 1), Y(3, 2), empty(0, 1);
    X << 0.0, 1.0;
    Y.setZero();
    CHECK_THROWS_AS(gram_matrix(empty, X, h, false), std::invalid_argument);
    CHECK_THROWS_AS(gram_matrix(X, empty, h, false), std::invalid_argument);
    CHECK_THROWS_AS(gram_matrix(X, Y, h, false), std::invalid_argument);
    Eigen::MatrixXd X3(3, 1);
    X3 << 0.0, 1.0, 2.0;
    CHECK_THROWS_AS(gram_matrix(X, X3, h, true), std::invalid_argument);
    CHECK_NOTHROW(gram_matrix(X, X3, h, false));
}
