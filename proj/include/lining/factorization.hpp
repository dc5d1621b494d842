#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "lining/geometry.hpp"
#include "lining/kernels.hpp"

namespace lining {

/// How negative observations are made admissible for the non-negative
/// factorization. `automatic` adds c = -min(X) + epsilon before training when
/// any observed value is negative; `fixed` always adds the given offset;
/// `off` trains the data as is. The offset is recorded in the train report
/// and subtracted again by reconstruct().
enum class ShiftPolicy { off, automatic, fixed };

/// Non-negative factors of the completed matrix: u is M x H, v is H x N.
struct FactorPair {
    Matrix u;
    Matrix v;
    int rank = 0;
};

struct TrainConfig {
    int rank = 2;                // H
    double lambda1 = 0.0;        // adjacency constraint weight
    double lambda2 = 0.0;        // axisymmetry constraint weight
    double learning_rate = 0.01; // alpha
    int max_epochs = 5000;       // P
    int patience = 50;           // early-stop epochs; 0 disables early stopping
    double val_fraction = 0.2;   // observed-cell share held out for early stopping
    std::uint64_t seed = 0;
    ShiftPolicy shift_policy = ShiftPolicy::automatic;
    double shift_offset = 0.0;  // used when shift_policy == fixed
    double shift_epsilon = 1.0; // margin above -min for the automatic shift
    bool wrap = false;          // also couple the (N, 1) column pair

    void validate() const;
};

struct TrainReport {
    int epochs_run = 0;
    bool early_stopped = false;
    LossBreakdown final_loss; // objective on the (shifted) training data
    double offset = 0.0;      // shift applied before training
    double best_val_rmse = -1.0; // -1 when no validation holdout was used
    int val_cells = 0;
};

/// Factors with entries drawn uniformly from (0, 1], deterministic per seed.
FactorPair init_factors(int layers, int parts, int rank, std::uint64_t seed);

/// Full objective: squared residuals on observed cells, plus the Q-weighted
/// adjacency penalty over column pairs (n, n+1), plus the axisymmetry penalty
/// over column pairs (n, N+1-n) counted once from each side.
LossBreakdown loss(const ObservationMatrix& x, const FactorPair& f, std::span<const double> q,
                   double lambda1, double lambda2, bool wrap = false,
                   Exec exec = Exec::parallel);

/// Exact analytic gradient of the full objective with respect to U and V.
Gradients gradient(const ObservationMatrix& x, const FactorPair& f, std::span<const double> q,
                   double lambda1, double lambda2, bool wrap = false,
                   Exec exec = Exec::parallel);

/// Trains the factor pair by SGD over the observed cells (shuffled each
/// epoch, per-cell data updates with projection to max(0, .)) plus one
/// full-gradient step per epoch for the two regularizers at the same
/// learning rate. Early stopping watches RMSE on a seeded holdout of the
/// observed cells and returns the best-validation factors.
///
/// Deterministic per seed: factors come from init_factors(cfg.seed); the
/// validation split and every epoch shuffle draw from a single
/// mt19937_64 stream seeded with mix_seed(cfg.seed, kTrainStream).
/// warm_start, when given, replaces the random initialization.
std::pair<FactorPair, TrainReport> factorize(const ObservationMatrix& x,
                                             std::span<const double> q, const TrainConfig& cfg,
                                             Exec exec = Exec::parallel,
                                             const FactorPair* warm_start = nullptr);

/// Stream tag for the shuffle/validation RNG inside factorize.
inline constexpr std::uint64_t kTrainStream = 0x7261696e;

/// Dense completed matrix UV - offset.
Matrix reconstruct(const FactorPair& f, double offset = 0.0, Exec exec = Exec::parallel);

} // namespace lining
