#pragma once

#include <Eigen/Dense>

namespace ggp {

// Squared-exponential kernel hyperparameters. signal_variance and
// noise_variance are in squared target units, lengthscale in input units.
struct Hyperparameters {
    double signal_variance = 1.0; // sigma_f^2 > 0
    double lengthscale = 1.0;     // l > 0
    double noise_variance = 0.0;  // sigma_n^2 >= 0

    // Throws std::invalid_argument if any field is non-finite or out of range.
    void validate() const;
};

// k(xi, xj) = sigma_f^2 * exp(-|xi - xj|^2 / (2 l^2)) [+ sigma_n^2].
// include_noise adds the delta_ij term; it is an index condition, so set it
// only when xi and xj refer to the same training point.
double se_kernel(const Eigen::Ref<const Eigen::VectorXd>& xi,
                 const Eigen::Ref<const Eigen::VectorXd>& xj,
                 const Hyperparameters& h,
                 bool include_noise = false);

// Pairwise kernel matrix between two point sets (one point per row).
// add_noise_on_diagonal is valid only when Xa and Xb are the same indexed
// set; it adds sigma_n^2 at i == j.
Eigen::MatrixXd gram_matrix(const Eigen::Ref<const Eigen::MatrixXd>& Xa,
                            const Eigen::Ref<const Eigen::MatrixXd>& Xb,
                            const Hyperparameters& h,
                            bool add_noise_on_diagonal = false);

} // namespace ggp
