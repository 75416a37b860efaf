#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace ggp {

// Explicitly stored inverse of a symmetric positive definite matrix that
// grows one row and column at a time. Growing uses the Schur-complement
// block inversion identity
//
//   [[A, b], [b^T, d]]^-1 = [[A^-1 + u u^T / s, -u / s], [-u^T / s, 1 / s]]
//
// with u = A^-1 b and s = d - b^T u, which costs O(t^2) at dimension t
// instead of the O(t^3) of a fresh factorization. Values are immutable
// after construction; grow_inverse returns a new value.
class GrowableInverse {
public:
    GrowableInverse() = default; // dimension 0

    // Direct inverse of an SPD matrix via Cholesky; the O(n^3) batch path.
    static GrowableInverse from_matrix(const Eigen::Ref<const Eigen::MatrixXd>& A);

    Eigen::Index dim() const { return inv_.rows(); }
    const Eigen::MatrixXd& inverse() const { return inv_; }

    // Scalar multiply-add counts of the Schur updates, for complexity checks.
    std::uint64_t last_grow_multiply_adds() const { return last_madds_; }
    std::uint64_t cumulative_multiply_adds() const { return total_madds_; }

    // The Schur complement must exceed kSchurFloorRel times the new diagonal
    // entry d, otherwise the extension is treated as numerically non-PD.
    static constexpr double kSchurFloorRel = 1e-10;

    friend GrowableInverse grow_inverse(const GrowableInverse& g,
                                        const Eigen::Ref<const Eigen::VectorXd>& b,
                                        double d);

private:
    Eigen::MatrixXd inv_;
    std::uint64_t last_madds_ = 0;
    std::uint64_t total_madds_ = 0;
};

// Extends g (the inverse of some t x t SPD matrix A) to the inverse of
// [[A, b], [b^T, d]]. Throws NotPositiveDefiniteError, carrying the Schur
// complement, when the extended matrix is numerically non-PD.
GrowableInverse grow_inverse(const GrowableInverse& g,
                             const Eigen::Ref<const Eigen::VectorXd>& b,
                             double d);

// X with A X = B for SPD A, via Cholesky.
Eigen::MatrixXd solve_psd(const Eigen::Ref<const Eigen::MatrixXd>& A,
                          const Eigen::Ref<const Eigen::MatrixXd>& B);

// log |A| for SPD A, via Cholesky (never through the raw determinant).
double log_det_psd(const Eigen::Ref<const Eigen::MatrixXd>& A);

} // namespace ggp
