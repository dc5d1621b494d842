#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lining/factorization.hpp"

namespace lining {

/// Deviation metrics between a truth series and a prediction series.
/// pcc is null (never 0) when either series has zero variance or fewer
/// than two samples.
struct MetricReport {
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> pcc;
    std::size_t n = 0;
};

MetricReport metrics(std::span<const double> truth, std::span<const double> pred);

/// Partitions the observed cells into k folds whose sizes differ by at most
/// one; deterministic per seed.
std::vector<std::vector<CellIndex>> kfold_split(const std::vector<CellIndex>& cells, int k,
                                                std::uint64_t seed);

struct CvRow {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double mean_rmse = 0.0; // NaN when failed
    bool failed = false;
};

struct SearchResult {
    double best_lambda1 = 0.0;
    double best_lambda2 = 0.0;
    int folds = 0;
    std::vector<CvRow> cv_table; // full candidate grid, sorted by (lambda1, lambda2)
};

/// K-fold cross-validated grid search over the (lambda1, lambda2) candidates.
/// Every candidate is scored by the mean validation RMSE over the same K
/// folds; ties break toward the smaller lambda1, then lambda2. Candidates
/// whose training fails are recorded in the table and excluded from ranking.
/// Training seeds derive from (seed, fold) only, so the result does not
/// depend on candidate enumeration order. Fold trainings run concurrently.
SearchResult grid_search(const ObservationMatrix& x, std::span<const double> q,
                         std::span<const double> grid1, std::span<const double> grid2, int folds,
                         const TrainConfig& cfg, std::uint64_t seed, Exec exec = Exec::parallel);

/// Leave-one-sensor-out evaluation over a series of daily snapshots.
struct CrossTestResult {
    MetricReport report;
    std::vector<std::string> dates; // days that scored
    std::vector<double> truth;
    std::vector<double> predicted;
    std::vector<std::string> failed_dates;
};

/// For each day: drop the test cell from the observed set, train, predict
/// the dropped cell, then score the whole series. with_constraints=false is
/// the plain-factorization baseline (lambda1 = lambda2 = 0). Days train
/// concurrently with per-day seeds mixed from cfg.seed and the day index.
CrossTestResult cross_test(const std::vector<std::pair<std::string, ObservationMatrix>>& days,
                           std::span<const double> q, CellIndex test_cell, const TrainConfig& cfg,
                           bool with_constraints, Exec exec = Exec::parallel);

} // namespace lining
