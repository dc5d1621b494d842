#include "lining/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lining/rng.hpp"

namespace lining {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
} // namespace

MetricReport metrics(std::span<const double> truth, std::span<const double> pred) {
    if (truth.size() != pred.size())
        throw ShapeError("metrics: series lengths differ");
    if (truth.empty())
        throw ShapeError("metrics: empty series");
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (!std::isfinite(truth[i]) || !std::isfinite(pred[i]))
            throw DataError("metrics: non-finite value at index " + std::to_string(i));

    MetricReport out;
    out.n = truth.size();
    const double n = static_cast<double>(truth.size());

    double sq = 0.0, abs = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double e = truth[i] - pred[i];
        sq += e * e;
        abs += std::abs(e);
    }
    out.rmse = std::sqrt(sq / n);
    out.mae = abs / n;

    if (truth.size() >= 2) {
        double mean_t = 0.0, mean_p = 0.0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            mean_t += truth[i];
            mean_p += pred[i];
        }
        mean_t /= n;
        mean_p /= n;
        double cov = 0.0, var_t = 0.0, var_p = 0.0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const double dt = truth[i] - mean_t;
            const double dp = pred[i] - mean_p;
            cov += dt * dp;
            var_t += dt * dt;
            var_p += dp * dp;
        }
        if (var_t > 0.0 && var_p > 0.0)
            out.pcc = std::clamp(cov / std::sqrt(var_t * var_p), -1.0, 1.0);
        // zero variance: pcc stays null rather than a misleading 0
    }
    return out;
}

std::vector<std::vector<CellIndex>> kfold_split(const std::vector<CellIndex>& cells, int k,
                                                std::uint64_t seed) {
    if (k < 1)
        throw ConfigError("kfold_split: k must be >= 1");
    if (static_cast<std::size_t>(k) > cells.size())
        throw ConfigError("kfold_split: k = " + std::to_string(k) + " exceeds " +
                          std::to_string(cells.size()) + " cells");

    std::vector<CellIndex> shuffled = cells;
    Rng eng(mix_seed(seed, 0x666f6c64));
    std::shuffle(shuffled.begin(), shuffled.end(), eng);

    std::vector<std::vector<CellIndex>> folds(k);
    for (std::size_t i = 0; i < shuffled.size(); ++i)
        folds[i % k].push_back(shuffled[i]);
    return folds;
}

namespace {

/// Mean validation RMSE of one (lambda1, lambda2) candidate on one fold;
/// NaN when training fails.
double fold_rmse(const ObservationMatrix& x, std::span<const double> q,
                 const std::vector<CellIndex>& fold, const TrainConfig& cfg, Exec exec) {
    ObservationMatrix train_obs = x;
    for (const CellIndex& c : fold)
        train_obs.clear(c);
    if (train_obs.observed_count() == 0)
        return kNan;

    try {
        auto [factors, report] = factorize(train_obs, q, cfg, exec);
        Matrix recon = reconstruct(factors, report.offset, exec);
        double acc = 0.0;
        for (const CellIndex& c : fold) {
            const double e = x.values()(c.layer - 1, c.part - 1) - recon(c.layer - 1, c.part - 1);
            acc += e * e;
        }
        return std::sqrt(acc / static_cast<double>(fold.size()));
    } catch (const Error&) {
        return kNan;
    }
}

} // namespace

SearchResult grid_search(const ObservationMatrix& x, std::span<const double> q,
                         std::span<const double> grid1, std::span<const double> grid2, int folds,
                         const TrainConfig& cfg, std::uint64_t seed, Exec exec) {
    if (grid1.empty() || grid2.empty())
        throw ConfigError("grid_search: candidate grids must be non-empty");
    cfg.validate();

    const std::vector<CellIndex> observed = x.observed_cells();
    const auto fold_cells = kfold_split(observed, folds, seed);

    struct Job {
        double l1, l2;
        int candidate, fold;
    };
    std::vector<Job> jobs;
    const int n_candidates = static_cast<int>(grid1.size() * grid2.size());
    jobs.reserve(static_cast<std::size_t>(n_candidates) * folds);
    int candidate = 0;
    for (double l1 : grid1)
        for (double l2 : grid2) {
            for (int f = 0; f < folds; ++f)
                jobs.push_back({l1, l2, candidate, f});
            ++candidate;
        }

    std::vector<double> job_rmse(jobs.size(), kNan);
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(jobs.size()); ++j) {
        const Job& job = jobs[j];
        TrainConfig run_cfg = cfg;
        run_cfg.lambda1 = job.l1;
        run_cfg.lambda2 = job.l2;
        // Seed depends on the fold only: every candidate sees identical
        // initialization and shuffle sequences, and the search result cannot
        // depend on enumeration order.
        run_cfg.seed = mix_seed(seed, static_cast<std::uint64_t>(job.fold));
        job_rmse[j] = fold_rmse(x, q, fold_cells[job.fold], run_cfg, exec);
    }

    SearchResult result;
    result.folds = folds;
    result.cv_table.resize(n_candidates);
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        CvRow& row = result.cv_table[jobs[j].candidate];
        row.lambda1 = jobs[j].l1;
        row.lambda2 = jobs[j].l2;
        if (std::isnan(job_rmse[j]))
            row.failed = true;
        else
            row.mean_rmse += job_rmse[j] / static_cast<double>(folds);
    }
    for (CvRow& row : result.cv_table)
        if (row.failed)
            row.mean_rmse = kNan;

    std::sort(result.cv_table.begin(), result.cv_table.end(), [](const CvRow& a, const CvRow& b) {
        if (a.lambda1 != b.lambda1)
            return a.lambda1 < b.lambda1;
        return a.lambda2 < b.lambda2;
    });

    const CvRow* best = nullptr;
    for (const CvRow& row : result.cv_table) {
        if (row.failed)
            continue;
        if (!best || row.mean_rmse < best->mean_rmse)
            best = &row; // table is (lambda1, lambda2)-sorted: ties keep the smaller pair
    }
    if (!best)
        throw TrainingError("grid_search: every candidate failed to train");
    result.best_lambda1 = best->lambda1;
    result.best_lambda2 = best->lambda2;
    return result;
}

CrossTestResult cross_test(const std::vector<std::pair<std::string, ObservationMatrix>>& days,
                           std::span<const double> q, CellIndex test_cell, const TrainConfig& cfg,
                           bool with_constraints, Exec exec) {
    if (days.empty())
        throw ConfigError("cross_test: no daily snapshots given");
    cfg.validate();
    for (const auto& [date, obs] : days)
        if (!obs.is_observed(test_cell))
            throw ConfigError("cross_test: test cell (" + std::to_string(test_cell.layer) + "," +
                              std::to_string(test_cell.part) + ") is not observed on " + date);

    TrainConfig base_cfg = cfg;
    if (!with_constraints) {
        base_cfg.lambda1 = 0.0;
        base_cfg.lambda2 = 0.0;
    }

    const std::ptrdiff_t n_days = static_cast<std::ptrdiff_t>(days.size());
    std::vector<double> predicted(days.size(), kNan);
    std::vector<double> truth(days.size(), kNan);

#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (std::ptrdiff_t d = 0; d < n_days; ++d) {
        const auto& [date, obs] = days[d];
        ObservationMatrix train_obs = obs;
        train_obs.clear(test_cell);
        if (train_obs.observed_count() == 0)
            continue; // recorded as a failed day below
        TrainConfig day_cfg = base_cfg;
        day_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(d));
        try {
            auto [factors, report] = factorize(train_obs, q, day_cfg, exec);
            Matrix recon = reconstruct(factors, report.offset, exec);
            predicted[d] = recon(test_cell.layer - 1, test_cell.part - 1);
            truth[d] = obs.at(test_cell);
        } catch (const Error&) {
            // leave NaN: day recorded as failed
        }
    }

    CrossTestResult result;
    for (std::size_t d = 0; d < days.size(); ++d) {
        if (std::isnan(predicted[d])) {
            result.failed_dates.push_back(days[d].first);
        } else {
            result.dates.push_back(days[d].first);
            result.truth.push_back(truth[d]);
            result.predicted.push_back(predicted[d]);
        }
    }
    if (result.dates.empty())
        throw TrainingError("cross_test: training failed on every day");
    result.report = metrics(result.truth, result.predicted);
    return result;
}

} // namespace lining
