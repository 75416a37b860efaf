#include "ggp/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ggp/errors.hpp"

namespace ggp {

GrowableInverse GrowableInverse::from_matrix(const Eigen::Ref<const Eigen::MatrixXd>& A) {
    if (A.rows() != A.cols())
        throw std::invalid_argument("GrowableInverse::from_matrix: matrix must be square");
    GrowableInverse g;
    if (A.rows() == 0)
        return g;
    if (!A.allFinite())
        throw std::invalid_argument("GrowableInverse::from_matrix: non-finite entries");
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefiniteError("GrowableInverse::from_matrix: Cholesky factorization failed");
    g.inv_ = llt.solve(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
    // keep the symmetry invariant exact
    g.inv_ = ((g.inv_ + g.inv_.transpose()) * 0.5).eval();
    return g;
}

GrowableInverse grow_inverse(const GrowableInverse& g,
                             const Eigen::Ref<const Eigen::VectorXd>& b,
                             double d) {
    const Eigen::Index t = g.dim();
    if (b.size() != t)
        throw std::invalid_argument("grow_inverse: cross-covariance vector has wrong length");
    if (!(std::isfinite(d) && d > 0.0))
        throw std::invalid_argument("grow_inverse: new diagonal entry must be finite and > 0");
    if (!b.allFinite())
        throw std::invalid_argument("grow_inverse: non-finite cross-covariance entries");

    // The loops below are the O(t^2) Schur update; madds tracks their
    // scalar multiply-add count for the complexity tests.
    std::uint64_t madds = 0;

    Eigen::VectorXd u(t); // A^-1 b
    for (Eigen::Index i = 0; i < t; ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < t; ++j)
            acc += g.inv_(i, j) * b(j);
        u(i) = acc;
    }
    madds += static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(t);

    double s = d;
    for (Eigen::Index i = 0; i < t; ++i)
        s -= b(i) * u(i);
    madds += static_cast<std::uint64_t>(t);

    if (!(s > GrowableInverse::kSchurFloorRel * d))
        throw NotPositiveDefiniteError(
            "grow_inverse: Schur complement " + std::to_string(s) +
                " at or below the jitter floor; extended matrix is not positive definite",
            s);

    const double inv_s = 1.0 / s;
    Eigen::VectorXd w(t); // u / s
    for (Eigen::Index i = 0; i < t; ++i)
        w(i) = u(i) * inv_s;
    madds += static_cast<std::uint64_t>(t);

    GrowableInverse out;
    out.inv_.resize(t + 1, t + 1);
    for (Eigen::Index i = 0; i < t; ++i) {
        for (Eigen::Index j = i; j < t; ++j) {
            const double v = g.inv_(i, j) + u(i) * w(j);
            out.inv_(i, j) = v;
            out.inv_(j, i) = v;
        }
        out.inv_(i, t) = -w(i);
        out.inv_(t, i) = -w(i);
    }
    out.inv_(t, t) = inv_s;
    madds += static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(t + 1) / 2;

    out.last_madds_ = madds;
    out.total_madds_ = g.total_madds_ + madds;
    return out;
}

Eigen::MatrixXd solve_psd(const Eigen::Ref<const Eigen::MatrixXd>& A,
                          const Eigen::Ref<const Eigen::MatrixXd>& B) {
    if (A.rows() != A.cols())
        throw std::invalid_argument("solve_psd: matrix must be square");
    if (B.rows() != A.rows())
        throw std::invalid_argument("solve_psd: right-hand side has wrong row count");
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefiniteError("solve_psd: Cholesky factorization failed");
    return llt.solve(B);
}

double log_det_psd(const Eigen::Ref<const Eigen::MatrixXd>& A) {
    if (A.rows() != A.cols())
        throw std::invalid_argument("log_det_psd: matrix must be square");
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefiniteError("log_det_psd: Cholesky factorization failed");
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

} // namespace ggp
