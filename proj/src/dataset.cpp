#include "ggp/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace ggp {

void Dataset::validate() const {
    if (targets.size() < 1)
        throw std::invalid_argument("dataset: must contain at least one point");
    if (inputs.rows() != targets.size())
        throw std::invalid_argument("dataset: inputs and targets differ in length");
    if (inputs.cols() < 1)
        throw std::invalid_argument("dataset: inputs must have at least one dimension");
    if (!inputs.allFinite() || !targets.allFinite())
        throw std::invalid_argument("dataset: non-finite entries");
}

double sample_std(const Eigen::Ref<const Eigen::VectorXd>& v) {
    const Eigen::Index n = v.size();
    if (n < 2)
        return 0.0;
    const double mean = v.mean();
    const double ss = (v.array() - mean).square().sum();
    return std::sqrt(ss / static_cast<double>(n - 1));
}

} // namespace ggp
