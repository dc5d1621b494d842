#include "lining/factorization.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "lining/rng.hpp"

namespace lining {

namespace {

void check_shapes(const ObservationMatrix& x, const FactorPair& f, std::span<const double> q,
                  bool wrap) {
    const int m = x.grid().layers, n = x.grid().parts;
    if (f.u.rows() != m || f.u.cols() != f.rank)
        throw ShapeError("factor U must be " + std::to_string(m) + "x" + std::to_string(f.rank));
    if (f.v.rows() != f.rank || f.v.cols() != n)
        throw ShapeError("factor V must be " + std::to_string(f.rank) + "x" + std::to_string(n));
    const std::size_t want = static_cast<std::size_t>(wrap ? n : n - 1);
    if (q.size() != want)
        throw ShapeError("q_weights length " + std::to_string(q.size()) + ", expected " +
                         std::to_string(want));
}

double rmse_on_cells(const Matrix& values, const Matrix& recon,
                     const std::vector<CellIndex>& cells) {
    double acc = 0.0;
    for (const CellIndex& c : cells) {
        const double r = values(c.layer - 1, c.part - 1) - recon(c.layer - 1, c.part - 1);
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(cells.size()));
}

bool all_finite(const Matrix& a) {
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (!std::isfinite(a(i, j)))
                return false;
    return true;
}

// Magnitudes beyond this are treated as divergence; max(0, .) projection can
// otherwise fold an overflow back into a finite value and mask it.
constexpr double kDivergenceLimit = 1e150;

double frobenius(const Matrix& a) {
    double acc = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            acc += a(i, j) * a(i, j);
    return std::sqrt(acc);
}

// UV is invariant under (U*s, V/s). The regularizer gradient on U scales
// with |V| and vice versa, so letting the factor norms drift apart makes the
// per-epoch regularizer step arbitrarily stiff; rebalancing after each epoch
// keeps it well conditioned without touching the objective.
void rebalance(FactorPair& f) {
    const double fu = frobenius(f.u);
    const double fv = frobenius(f.v);
    if (fu <= 0.0 || fv <= 0.0)
        return;
    const double s = std::sqrt(fv / fu);
    for (int i = 0; i < f.u.rows(); ++i)
        for (int k = 0; k < f.u.cols(); ++k)
            f.u(i, k) *= s;
    for (int k = 0; k < f.v.rows(); ++k)
        for (int j = 0; j < f.v.cols(); ++j)
            f.v(k, j) /= s;
}

} // namespace

void TrainConfig::validate() const {
    if (rank < 1)
        throw ConfigError("train: rank must be >= 1");
    if (lambda1 < 0.0 || lambda2 < 0.0)
        throw ConfigError("train: lambda1 and lambda2 must be >= 0");
    if (!(learning_rate > 0.0))
        throw ConfigError("train: learning_rate must be > 0");
    if (max_epochs < 1)
        throw ConfigError("train: max_epochs must be >= 1");
    if (patience < 0)
        throw ConfigError("train: patience must be >= 0");
    if (patience > 0 && !(val_fraction > 0.0 && val_fraction < 1.0))
        throw ConfigError("train: val_fraction must be in (0, 1) when patience > 0");
    if (!(shift_epsilon > 0.0))
        throw ConfigError("train: shift_epsilon must be > 0");
}

FactorPair init_factors(int layers, int parts, int rank, std::uint64_t seed) {
    if (layers < 1 || parts < 1)
        throw ConfigError("init_factors: dimensions must be positive");
    if (rank < 1 || rank > std::min(layers, parts))
        throw ConfigError("init_factors: rank " + std::to_string(rank) +
                          " outside 1..min(M,N) = 1.." +
                          std::to_string(std::min(layers, parts)));

    FactorPair f;
    f.rank = rank;
    f.u = Matrix(layers, rank);
    f.v = Matrix(rank, parts);

    Rng eng(mix_seed(seed, 0x696e6974));
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    // 1 - U[0,1) lies in (0, 1]: strictly positive entries.
    for (int i = 0; i < layers; ++i)
        for (int k = 0; k < rank; ++k)
            f.u(i, k) = 1.0 - dist(eng);
    for (int k = 0; k < rank; ++k)
        for (int j = 0; j < parts; ++j)
            f.v(k, j) = 1.0 - dist(eng);
    return f;
}

LossBreakdown loss(const ObservationMatrix& x, const FactorPair& f, std::span<const double> q,
                   double lambda1, double lambda2, bool wrap, Exec exec) {
    check_shapes(x, f, q, wrap);
    Matrix recon;
    kernels::multiply(f.u, f.v, recon, exec);
    return kernels::loss_terms(x.values(), x.mask(), recon, q, lambda1, lambda2, wrap, exec);
}

Gradients gradient(const ObservationMatrix& x, const FactorPair& f, std::span<const double> q,
                   double lambda1, double lambda2, bool wrap, Exec exec) {
    check_shapes(x, f, q, wrap);
    Matrix recon, field;
    kernels::multiply(f.u, f.v, recon, exec);
    kernels::objective_grad_field(x.values(), x.mask(), recon, q, lambda1, lambda2, wrap, field,
                                  exec);
    Gradients g;
    kernels::grad_factors(f.u, f.v, field, g.u, g.v, exec);
    return g;
}

std::pair<FactorPair, TrainReport> factorize(const ObservationMatrix& x,
                                             std::span<const double> q, const TrainConfig& cfg,
                                             Exec exec, const FactorPair* warm_start) {
    cfg.validate();
    const TunnelGrid& grid = x.grid();
    const int m = grid.layers, n = grid.parts, h = cfg.rank;
    if (h > std::min(m, n))
        throw ConfigError("train: rank " + std::to_string(h) + " exceeds min(M,N) = " +
                          std::to_string(std::min(m, n)));

    const std::size_t want_q = static_cast<std::size_t>(cfg.wrap ? n : n - 1);
    if (q.size() != want_q)
        throw ShapeError("q_weights length " + std::to_string(q.size()) + ", expected " +
                         std::to_string(want_q));

    std::vector<CellIndex> observed = x.observed_cells();
    if (observed.empty())
        throw DataError("factorize: at least one observed cell is required");
    if (static_cast<int>(observed.size()) < h)
        throw ConfigError("factorize: " + std::to_string(observed.size()) +
                          " observed cells cannot identify rank " + std::to_string(h));

    // Shift negative data into the non-negative range the factorization needs.
    double offset = 0.0;
    double min_obs = 0.0;
    for (const CellIndex& c : observed)
        min_obs = std::min(min_obs, x.values()(c.layer - 1, c.part - 1));
    if (cfg.shift_policy == ShiftPolicy::automatic && min_obs < 0.0)
        offset = -min_obs + cfg.shift_epsilon;
    else if (cfg.shift_policy == ShiftPolicy::fixed)
        offset = cfg.shift_offset;

    ObservationMatrix data(grid);
    for (const CellIndex& c : observed)
        data.set(c, x.values()(c.layer - 1, c.part - 1) + offset);

    FactorPair factors;
    if (warm_start) {
        if (warm_start->u.rows() != m || warm_start->u.cols() != h ||
            warm_start->v.rows() != h || warm_start->v.cols() != n)
            throw ShapeError("factorize: warm-start factors have the wrong shape");
        factors = *warm_start;
    } else {
        factors = init_factors(m, n, h, cfg.seed);
    }
    Rng eng(mix_seed(cfg.seed, kTrainStream));

    // Validation holdout for early stopping. With too few observed cells the
    // holdout would be empty; training then runs to max_epochs.
    std::vector<CellIndex> train_cells = observed;
    std::vector<CellIndex> val_cells;
    if (cfg.patience > 0) {
        const int val_n =
            static_cast<int>(std::floor(cfg.val_fraction * static_cast<double>(observed.size())));
        if (val_n >= 1 && val_n < static_cast<int>(observed.size())) {
            std::shuffle(train_cells.begin(), train_cells.end(), eng);
            val_cells.assign(train_cells.begin(), train_cells.begin() + val_n);
            train_cells.erase(train_cells.begin(), train_cells.begin() + val_n);
        }
    }
    const bool early_stopping = !val_cells.empty();
    const bool reg_active = cfg.lambda1 > 0.0 || cfg.lambda2 > 0.0;
    const double alpha = cfg.learning_rate;

    Matrix recon, field, grad_u, grad_v;
    Matrix no_mask(m, n, 0.0); // regularizer-only gradient: data term masked out

    FactorPair best = factors;
    double best_val = std::numeric_limits<double>::infinity();
    int stale_epochs = 0;
    TrainReport report;
    report.offset = offset;
    report.val_cells = static_cast<int>(val_cells.size());

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        report.epochs_run = epoch;
        std::shuffle(train_cells.begin(), train_cells.end(), eng);

        // Per-cell data-term updates with projection to max(0, .).
        for (const CellIndex& c : train_cells) {
            const int i = c.layer - 1, j = c.part - 1;
            double dot = 0.0;
            for (int k = 0; k < h; ++k)
                dot += factors.u(i, k) * factors.v(k, j);
            const double err = data.values()(i, j) - dot;
            if (!(std::abs(err) < kDivergenceLimit))
                throw TrainingError("training diverged at epoch " + std::to_string(epoch) +
                                    "; reduce learning_rate");
            for (int k = 0; k < h; ++k) {
                factors.u(i, k) = std::max(0.0, factors.u(i, k) + alpha * 2.0 * err * factors.v(k, j));
                factors.v(k, j) = std::max(0.0, factors.v(k, j) + alpha * 2.0 * err * factors.u(i, k));
                assert(factors.u(i, k) >= 0.0 && factors.v(k, j) >= 0.0);
            }
        }

        // One full-gradient step per epoch for the two regularizers. The
        // data term stays out of it (zero mask); it is handled per cell above.
        if (reg_active) {
            kernels::multiply(factors.u, factors.v, recon, exec);
            kernels::objective_grad_field(data.values(), no_mask, recon, q, cfg.lambda1,
                                          cfg.lambda2, cfg.wrap, field, exec);
            kernels::grad_factors(factors.u, factors.v, field, grad_u, grad_v, exec);
            for (int i = 0; i < m; ++i)
                for (int k = 0; k < h; ++k)
                    factors.u(i, k) = std::max(0.0, factors.u(i, k) - alpha * grad_u(i, k));
            for (int k = 0; k < h; ++k)
                for (int j = 0; j < n; ++j)
                    factors.v(k, j) = std::max(0.0, factors.v(k, j) - alpha * grad_v(k, j));
            rebalance(factors);
        }

        if (!all_finite(factors.u) || !all_finite(factors.v) ||
            frobenius(factors.u) > kDivergenceLimit || frobenius(factors.v) > kDivergenceLimit)
            throw TrainingError("training diverged at epoch " + std::to_string(epoch) +
                                "; reduce learning_rate");

        if (early_stopping) {
            kernels::multiply(factors.u, factors.v, recon, exec);
            const double val = rmse_on_cells(data.values(), recon, val_cells);
            if (val < best_val) {
                best_val = val;
                best = factors;
                stale_epochs = 0;
            } else if (++stale_epochs >= cfg.patience) {
                report.early_stopped = true;
                break;
            }
        }
    }

    FactorPair result = early_stopping ? best : factors;
    report.best_val_rmse = early_stopping ? best_val : -1.0;
    report.final_loss = loss(data, result, q, cfg.lambda1, cfg.lambda2, cfg.wrap, exec);
    return {std::move(result), report};
}

Matrix reconstruct(const FactorPair& f, double offset, Exec exec) {
    Matrix recon;
    kernels::multiply(f.u, f.v, recon, exec);
    if (offset != 0.0)
        for (int i = 0; i < recon.rows(); ++i)
            for (int j = 0; j < recon.cols(); ++j)
                recon(i, j) -= offset;
    return recon;
}

} // namespace lining
