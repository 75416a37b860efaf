#include "ggp/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ggp {

namespace {

Eigen::VectorXd clamp_to_box(Eigen::VectorXd x,
                             const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x(i) = std::min(std::max(x(i), lower(i)), upper(i));
    return x;
}

} // namespace

NelderMeadResult nelder_mead_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                      const Eigen::VectorXd& x0,
                                      const Eigen::VectorXd& lower,
                                      const Eigen::VectorXd& upper,
                                      const NelderMeadOptions& options) {
    const Eigen::Index n = x0.size();
    if (n == 0)
        throw std::invalid_argument("nelder_mead_minimize: empty start point");
    if (lower.size() != n || upper.size() != n || (lower.array() > upper.array()).any())
        throw std::invalid_argument("nelder_mead_minimize: invalid bounds");

    constexpr double kAlpha = 1.0; // reflection
    constexpr double kGamma = 2.0; // expansion
    constexpr double kRho = 0.5;   // contraction
    constexpr double kSigma = 0.5; // shrink

    auto eval = [&](const Eigen::VectorXd& x) {
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    // Initial simplex: x0 plus one offset vertex per coordinate, stepping
    // away from the nearer bound so vertices stay distinct after clamping.
    std::vector<Eigen::VectorXd> verts;
    verts.reserve(static_cast<std::size_t>(n) + 1);
    verts.push_back(clamp_to_box(x0, lower, upper));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd v = verts[0];
        double step = options.initial_step;
        if (v(i) + step > upper(i))
            step = -step;
        v(i) += step;
        verts.push_back(clamp_to_box(std::move(v), lower, upper));
    }

    std::vector<double> vals(verts.size());
    for (std::size_t i = 0; i < verts.size(); ++i)
        vals[i] = eval(verts[i]);

    std::vector<std::size_t> order(verts.size());
    auto sort_order = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    };

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        sort_order();
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];

        if (std::isfinite(vals[best]) && vals[worst] - vals[best] <= options.tolerance)
            break;

        // centroid of all vertices but the worst
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t k = 0; k + 1 < order.size(); ++k)
            centroid += verts[order[k]];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd reflected =
            clamp_to_box(centroid + kAlpha * (centroid - verts[worst]), lower, upper);
        const double f_reflected = eval(reflected);

        if (f_reflected < vals[best]) {
            const Eigen::VectorXd expanded =
                clamp_to_box(centroid + kGamma * (reflected - centroid), lower, upper);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                verts[worst] = expanded;
                vals[worst] = f_expanded;
            } else {
                verts[worst] = reflected;
                vals[worst] = f_reflected;
            }
        } else if (f_reflected < vals[second_worst]) {
            verts[worst] = reflected;
            vals[worst] = f_reflected;
        } else {
            const bool outside = f_reflected < vals[worst];
            const Eigen::VectorXd toward = outside ? reflected : verts[worst];
            const Eigen::VectorXd contracted =
                clamp_to_box(centroid + kRho * (toward - centroid), lower, upper);
            const double f_contracted = eval(contracted);
            if (f_contracted < (outside ? f_reflected : vals[worst])) {
                verts[worst] = contracted;
                vals[worst] = f_contracted;
            } else {
                for (std::size_t k = 1; k < order.size(); ++k) {
                    const std::size_t idx = order[k];
                    verts[idx] = clamp_to_box(
                        verts[order[0]] + kSigma * (verts[idx] - verts[order[0]]), lower, upper);
                    vals[idx] = eval(verts[idx]);
                }
            }
        }
    }

    sort_order();
    return NelderMeadResult{verts[order.front()], vals[order.front()], iter};
}

} // namespace ggp
