#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace ggp {

// Provenance of a synthetic dataset; absent for data loaded from files.
struct DatasetMetadata {
    std::string generator;
    double noise_std = 0.0;
    double domain_lo = 0.0;
    double domain_hi = 0.0;
    std::uint64_t seed = 0;
};

// Paired inputs and targets. Inputs hold one d-dimensional point per row.
struct Dataset {
    Eigen::MatrixXd inputs;
    Eigen::VectorXd targets;
    std::optional<DatasetMetadata> metadata;

    Eigen::Index size() const { return targets.size(); }
    Eigen::Index dim() const { return inputs.cols(); }

    // Throws std::invalid_argument on size mismatch, emptiness, or
    // non-finite entries.
    void validate() const;
};

// Sample standard deviation (n-1 normalization); 0 for fewer than 2 values.
double sample_std(const Eigen::Ref<const Eigen::VectorXd>& v);

} // namespace ggp
