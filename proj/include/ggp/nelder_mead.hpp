#pragma once

#include <functional>

#include <Eigen/Dense>

namespace ggp {

struct NelderMeadOptions {
    int max_iterations = 300;
    double tolerance = 1e-9;   // stop when the simplex value spread is below this
    double initial_step = 0.75; // per-coordinate offset of the initial simplex
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value;
    int iterations;
};

// Derivative-free simplex minimization inside the box [lower, upper].
// Candidate points are projected onto the box before evaluation, so the
// objective is never called outside it. x0 is a vertex of the initial
// simplex, hence the result never scores worse than f(x0). Objective
// values of NaN are treated as +infinity.
NelderMeadResult nelder_mead_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                      const Eigen::VectorXd& x0,
                                      const Eigen::VectorXd& lower,
                                      const Eigen::VectorXd& upper,
                                      const NelderMeadOptions& options = {});

} // namespace ggp
