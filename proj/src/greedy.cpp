#include "ggp/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "ggp/errors.hpp"

namespace ggp {

namespace {

// argmax over remainder positions with the lowest-dataset-index tie rule;
// remainder_idx is ascending, so the first strict maximum wins. Entries in
// `excluded` are skipped.
Eigen::Index select_position(const Eigen::VectorXd& scores,
                             const std::vector<Eigen::Index>& remainder,
                             const std::vector<Eigen::Index>& excluded) {
    Eigen::Index best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (Eigen::Index p = 0; p < scores.size(); ++p) {
        if (std::find(excluded.begin(), excluded.end(), remainder[static_cast<std::size_t>(p)]) !=
            excluded.end())
            continue;
        if (scores(p) > best_score) {
            best_score = scores(p);
            best = p;
        }
    }
    if (best < 0)
        throw std::invalid_argument("greedy: no selectable remainder candidate");
    return best;
}

StageRecord make_record(const GreedyState& s, const Dataset& d) {
    StageRecord rec;
    rec.stage = s.stage;
    rec.remainder = s.remainder_idx;
    rec.delta = selection_scores(s, d);
    rec.mu = s.mu;
    rec.sigma_diag = s.sigma.diagonal().cwiseMax(0.0);
    return rec;
}

} // namespace

GreedyState init_state(const Dataset& d, const Hyperparameters& h, std::uint64_t rng_seed) {
    d.validate();
    h.validate();
    const Eigen::Index n = d.size();
    if (n < 2)
        throw std::invalid_argument("init_state: need at least two training points");

    GreedyState s;
    s.hypers = h;
    s.gram = std::make_shared<const Eigen::MatrixXd>(gram_matrix(d.inputs, d.inputs, h, false));
    s.rng.seed(rng_seed);

    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    const Eigen::Index i0 = pick(s.rng);

    s.stage = 1;
    s.active_idx = {i0};
    s.remainder_idx.reserve(static_cast<std::size_t>(n - 1));
    for (Eigen::Index i = 0; i < n; ++i)
        if (i != i0)
            s.remainder_idx.push_back(i);

    const Eigen::MatrixXd& K = *s.gram;
    s.inverse = grow_inverse(GrowableInverse{}, Eigen::VectorXd(0), K(i0, i0) + h.noise_variance);
    const double inv0 = s.inverse.inverse()(0, 0);

    const Eigen::Index m = n - 1;
    s.mu.resize(m);
    s.sigma.resize(m, m);
    for (Eigen::Index p = 0; p < m; ++p) {
        const Eigen::Index r = s.remainder_idx[static_cast<std::size_t>(p)];
        s.mu(p) = K(r, i0) * inv0 * d.targets(i0);
        for (Eigen::Index q = p; q < m; ++q) {
            const Eigen::Index c = s.remainder_idx[static_cast<std::size_t>(q)];
            const double v = K(r, c) - K(r, i0) * inv0 * K(i0, c);
            s.sigma(p, q) = v;
            s.sigma(q, p) = v;
        }
    }

    s.rmse_history.push_back(remainder_rmse(s, d));
    return s;
}

Eigen::VectorXd selection_scores(const GreedyState& s, const Dataset& d) {
    const Eigen::Index m = static_cast<Eigen::Index>(s.remainder_idx.size());
    if (s.mu.size() != m || s.sigma.rows() != m)
        throw std::invalid_argument("selection_scores: inconsistent state");
    Eigen::VectorXd delta(m);
    for (Eigen::Index p = 0; p < m; ++p) {
        const Eigen::Index r = s.remainder_idx[static_cast<std::size_t>(p)];
        delta(p) = std::sqrt(std::max(s.sigma(p, p), 0.0)) + std::abs(s.mu(p) - d.targets(r));
    }
    return delta;
}

double remainder_rmse(const GreedyState& s, const Dataset& d) {
    const Eigen::Index m = static_cast<Eigen::Index>(s.remainder_idx.size());
    if (m == 0)
        throw std::invalid_argument("remainder_rmse: empty remainder");
    double acc = 0.0;
    for (Eigen::Index p = 0; p < m; ++p) {
        const Eigen::Index r = s.remainder_idx[static_cast<std::size_t>(p)];
        const double t = s.mu(p) - d.targets(r);
        acc += t * t;
    }
    return std::sqrt(acc / static_cast<double>(m));
}

GreedyState step(const GreedyState& s, const Dataset& d,
                 const std::vector<Eigen::Index>& excluded) {
    const Eigen::Index m = static_cast<Eigen::Index>(s.remainder_idx.size());
    if (m < 2)
        throw std::invalid_argument("step: need at least two remainder points");

    const Eigen::VectorXd scores = selection_scores(s, d);
    const Eigen::Index pos = select_position(scores, s.remainder_idx, excluded);
    const Eigen::Index j = s.remainder_idx[static_cast<std::size_t>(pos)];
    const Eigen::Index t = static_cast<Eigen::Index>(s.active_idx.size());
    const Eigen::MatrixXd& K = *s.gram;

    Eigen::VectorXd b(t);
    for (Eigen::Index k = 0; k < t; ++k)
        b(k) = K(s.active_idx[static_cast<std::size_t>(k)], j);

    GrowableInverse grown;
    try {
        grown = grow_inverse(s.inverse, b, K(j, j) + s.hypers.noise_variance);
    } catch (const NotPositiveDefiniteError& e) {
        throw NotPositiveDefiniteError(
            "step: growing the active set with candidate " + std::to_string(j) +
                " failed: " + e.what(),
            e.schur_complement());
    }

    const double denom = s.sigma(pos, pos) + s.hypers.noise_variance;
    if (!(denom > 0.0))
        throw NotPositiveDefiniteError(
            "step: conditioning variance for candidate " + std::to_string(j) +
                " is not positive",
            denom);
    const double gain = (d.targets(j) - s.mu(pos)) / denom;
    const Eigen::VectorXd col = s.sigma.col(pos);
    const Eigen::VectorXd w = col / denom;

    GreedyState next;
    next.stage = s.stage + 1;
    next.hypers = s.hypers;
    next.gram = s.gram;
    next.rng = s.rng;
    next.inverse = std::move(grown);
    next.active_idx = s.active_idx;
    next.active_idx.push_back(j);
    next.remainder_idx.reserve(static_cast<std::size_t>(m - 1));
    for (Eigen::Index p = 0; p < m; ++p)
        if (p != pos)
            next.remainder_idx.push_back(s.remainder_idx[static_cast<std::size_t>(p)]);

    // rank-one conditioning on the new observation, dropping row/column pos
    next.mu.resize(m - 1);
    next.sigma.resize(m - 1, m - 1);
    for (Eigen::Index p = 0, pn = 0; p < m; ++p) {
        if (p == pos)
            continue;
        next.mu(pn) = s.mu(p) + col(p) * gain;
        for (Eigen::Index q = p, qn = pn; q < m; ++q) {
            if (q == pos)
                continue;
            const double v = s.sigma(p, q) - col(p) * w(q);
            next.sigma(pn, qn) = v;
            next.sigma(qn, pn) = v;
            ++qn;
        }
        ++pn;
    }

    next.rmse_history = s.rmse_history;
    next.rmse_history.push_back(remainder_rmse(next, d));
    return next;
}

GreedyState step(const GreedyState& s, const Dataset& d) {
    return step(s, d, {});
}

double default_delta(const Eigen::Ref<const Eigen::VectorXd>& y) {
    return 3e-5 * sample_std(y);
}

int default_max_stages(Eigen::Index n) {
    return static_cast<int>((n + 1) / 2); // ceil(n / 2)
}

GreedyResult run(const Dataset& d,
                 const Hyperparameters& h,
                 double delta,
                 int max_stages,
                 std::uint64_t rng_seed,
                 bool trace,
                 const std::function<void(const StageRecord&)>& on_stage) {
    d.validate();
    h.validate();
    const Eigen::Index n = d.size();
    if (n < 2)
        throw std::invalid_argument("run: need at least two training points");
    if (max_stages < 1 || max_stages > static_cast<int>(n) - 1)
        throw std::invalid_argument("run: max_stages must be in [1, N-1]");
    if (std::isnan(delta))
        throw std::invalid_argument("run: delta must not be NaN");

    GreedyState s = init_state(d, h, rng_seed);
    std::vector<StageRecord> records;
    if (trace)
        records.push_back(make_record(s, d));

    while (s.stage < max_stages && s.remainder_idx.size() > 1) {
        GreedyState next;
        try {
            next = step(s, d, {});
        } catch (const NotPositiveDefiniteError&) {
            // skip the offending candidate once; a second failure aborts
            const Eigen::VectorXd scores = selection_scores(s, d);
            const Eigen::Index failed_pos = select_position(scores, s.remainder_idx, {});
            const std::vector<Eigen::Index> excluded{
                s.remainder_idx[static_cast<std::size_t>(failed_pos)]};
            try {
                next = step(s, d, excluded);
            } catch (const NotPositiveDefiniteError&) {
                if (trace && on_stage)
                    on_stage(records.back()); // flush the stage that failed
                throw;
            }
        }
        if (trace) {
            records.back().selected = next.active_idx.back();
            if (on_stage)
                on_stage(records.back());
        }
        s = std::move(next);
        if (trace)
            records.push_back(make_record(s, d));

        // converged once the stage-to-stage RMSE change is small; a large
        // transient increase keeps the run alive rather than ending it
        const std::size_t k = s.rmse_history.size();
        if (k >= 2 && std::abs(s.rmse_history[k - 2] - s.rmse_history[k - 1]) < delta)
            break;
    }
    if (trace && on_stage && !records.empty())
        on_stage(records.back());

    const Eigen::Index t = static_cast<Eigen::Index>(s.active_idx.size());
    Eigen::MatrixXd X_active(t, d.dim());
    Eigen::VectorXd y_active(t);
    for (Eigen::Index k = 0; k < t; ++k) {
        X_active.row(k) = d.inputs.row(s.active_idx[static_cast<std::size_t>(k)]);
        y_active(k) = d.targets(s.active_idx[static_cast<std::size_t>(k)]);
    }

    GreedyResult result;
    result.final_active_idx = s.active_idx;
    result.model = GPModel{h, std::move(X_active), std::move(y_active), s.inverse};
    result.rmse_history = s.rmse_history;
    result.stage_trace = std::move(records);
    return result;
}

} // namespace ggp
