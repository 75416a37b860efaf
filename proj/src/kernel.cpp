#include "ggp/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace ggp {

namespace {

// Plain sequential accumulation so that the result is bit-identical for
// (a, b) and (b, a) and between the scalar and matrix entry points.
template <class A, class B>
double squared_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        const double t = a(k) - b(k);
        acc += t * t;
    }
    return acc;
}

} // namespace

void Hyperparameters::validate() const {
    if (!(std::isfinite(signal_variance) && signal_variance > 0.0))
        throw std::invalid_argument("hyperparameters: signal_variance must be finite and > 0");
    if (!(std::isfinite(lengthscale) && lengthscale > 0.0))
        throw std::invalid_argument("hyperparameters: lengthscale must be finite and > 0");
    if (!(std::isfinite(noise_variance) && noise_variance >= 0.0))
        throw std::invalid_argument("hyperparameters: noise_variance must be finite and >= 0");
}

double se_kernel(const Eigen::Ref<const Eigen::VectorXd>& xi,
                 const Eigen::Ref<const Eigen::VectorXd>& xj,
                 const Hyperparameters& h,
                 bool include_noise) {
    h.validate();
    if (xi.size() == 0 || xi.size() != xj.size())
        throw std::invalid_argument("se_kernel: points must be non-empty and of equal dimension");
    if (!xi.allFinite() || !xj.allFinite())
        throw std::invalid_argument("se_kernel: non-finite input point");

    const double d2 = squared_distance(xi, xj);
    double k = h.signal_variance * std::exp(-d2 / (2.0 * h.lengthscale * h.lengthscale));
    if (include_noise)
        k += h.noise_variance;
    return k;
}

Eigen::MatrixXd gram_matrix(const Eigen::Ref<const Eigen::MatrixXd>& Xa,
                            const Eigen::Ref<const Eigen::MatrixXd>& Xb,
                            const Hyperparameters& h,
                            bool add_noise_on_diagonal) {
    h.validate();
    if (Xa.rows() == 0 || Xb.rows() == 0)
        throw std::invalid_argument("gram_matrix: empty input list");
    if (Xa.cols() != Xb.cols())
        throw std::invalid_argument("gram_matrix: input dimension mismatch");
    if (add_noise_on_diagonal && Xa.rows() != Xb.rows())
        throw std::invalid_argument("gram_matrix: noise on the diagonal requires a single indexed point set");
    if (!Xa.allFinite() || !Xb.allFinite())
        throw std::invalid_argument("gram_matrix: non-finite input point");

    Eigen::MatrixXd K(Xa.rows(), Xb.rows());
    for (Eigen::Index i = 0; i < Xa.rows(); ++i) {
        for (Eigen::Index j = 0; j < Xb.rows(); ++j) {
            const double d2 = squared_distance(Xa.row(i), Xb.row(j));
            K(i, j) = h.signal_variance * std::exp(-d2 / (2.0 * h.lengthscale * h.lengthscale));
        }
    }
    if (add_noise_on_diagonal)
        K.diagonal().array() += h.noise_variance;
    return K;
}

} // namespace ggp
