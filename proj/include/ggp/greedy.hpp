#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ggp/dataset.hpp"
#include "ggp/gp.hpp"
#include "ggp/kernel.hpp"
#include "ggp/linalg.hpp"

namespace ggp {

// Snapshot of stagewise greedy training. At stage t the active set holds
// t indices, the remainder the other N - t in ascending dataset order, and
// (mu, sigma) are the posterior mean and covariance of the remainder
// targets conditioned on the active observations. The full noiseless Gram
// matrix is computed once per run and shared between stages.
struct GreedyState {
    int stage = 0;
    std::vector<Eigen::Index> active_idx;    // in selection order
    std::vector<Eigen::Index> remainder_idx; // ascending
    GrowableInverse inverse;                 // (K_I + sigma_n^2 I)^-1
    Eigen::VectorXd mu;                      // posterior mean on the remainder
    Eigen::MatrixXd sigma;                   // posterior covariance on the remainder
    std::vector<double> rmse_history;        // one entry per completed stage
    std::mt19937_64 rng;
    Hyperparameters hypers;
    std::shared_ptr<const Eigen::MatrixXd> gram; // K(X, X), no noise
};

// Per-stage snapshot kept when tracing: the remainder quantities the stage
// scored, plus the index it selected (-1 for the final stage).
struct StageRecord {
    int stage = 0;
    Eigen::Index selected = -1;
    std::vector<Eigen::Index> remainder;
    Eigen::VectorXd delta;
    Eigen::VectorXd mu;
    Eigen::VectorXd sigma_diag;
};

struct GreedyResult {
    std::vector<Eigen::Index> final_active_idx;
    GPModel model;
    std::vector<double> rmse_history;
    std::vector<StageRecord> stage_trace; // empty unless tracing was requested
};

// Stage 1: one uniformly random active point (seeded), posterior computed
// on the other N - 1.
GreedyState init_state(const Dataset& d, const Hyperparameters& h, std::uint64_t rng_seed);

// Selection score per remainder position: posterior standard deviation
// plus absolute residual. Uses only cached state.
Eigen::VectorXd selection_scores(const GreedyState& s, const Dataset& d);

// Root-mean-square of (mu - y) over the remainder.
double remainder_rmse(const GreedyState& s, const Dataset& d);

// Moves the argmax-score remainder point (ties to the lowest dataset index,
// indices in `excluded` skipped) into the active set, grows the inverse,
// and applies the rank-one conditioning update to (mu, sigma).
GreedyState step(const GreedyState& s, const Dataset& d,
                 const std::vector<Eigen::Index>& excluded);
GreedyState step(const GreedyState& s, const Dataset& d);

// Default convergence threshold (scale-free) and stage cap.
double default_delta(const Eigen::Ref<const Eigen::VectorXd>& y);
int default_max_stages(Eigen::Index n);

// Full training loop: init, then step until the stage-to-stage RMSE change
// |RMSE_{t-1} - RMSE_t| falls below delta (checked from stage 2 on), the
// stage cap is reached, or a single remainder point is left. A candidate
// whose growth is numerically non-PD is skipped once per stage; a second
// consecutive failure aborts the run.
// When tracing, on_stage (if set) receives each finished record as soon as
// its selection is known, including the last one before an abort.
GreedyResult run(const Dataset& d,
                 const Hyperparameters& h,
                 double delta,
                 int max_stages,
                 std::uint64_t rng_seed,
                 bool trace = false,
                 const std::function<void(const StageRecord&)>& on_stage = {});

} // namespace ggp
