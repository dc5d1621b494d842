#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "lining/evaluation.hpp"
#include "lining/rng.hpp"

using namespace lining;

namespace {

TunnelGrid small_grid(int layers, int parts) { return {layers, parts, 10.0}; }

/// Literal transcription of the plain per-cell SGD trainer, mirroring the
/// RNG protocol of factorize but with only the data-term updates. Kept
/// independent of the library training path on purpose.
FactorPair plain_sgd_reference(const ObservationMatrix& x, const TrainConfig& cfg) {
    const int m = x.grid().layers, n = x.grid().parts, h = cfg.rank;
    FactorPair f = init_factors(m, n, h, cfg.seed);
    Rng eng(mix_seed(cfg.seed, kTrainStream));

    std::vector<CellIndex> train = x.observed_cells();
    std::vector<CellIndex> val;
    if (cfg.patience > 0) {
        const int val_n =
            static_cast<int>(std::floor(cfg.val_fraction * static_cast<double>(train.size())));
        if (val_n >= 1 && val_n < static_cast<int>(train.size())) {
            std::shuffle(train.begin(), train.end(), eng);
            val.assign(train.begin(), train.begin() + val_n);
            train.erase(train.begin(), train.begin() + val_n);
        }
    }

    auto val_rmse = [&]() {
        double acc = 0.0;
        for (const CellIndex& c : val) {
            double dot = 0.0;
            for (int k = 0; k < h; ++k)
                dot += f.u(c.layer - 1, k) * f.v(k, c.part - 1);
            const double r = x.values()(c.layer - 1, c.part - 1) - dot;
            acc += r * r;
        }
        return std::sqrt(acc / static_cast<double>(val.size()));
    };

    FactorPair best = f;
    double best_val = std::numeric_limits<double>::infinity();
    int stale = 0;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::shuffle(train.begin(), train.end(), eng);
        for (const CellIndex& c : train) {
            const int i = c.layer - 1, j = c.part - 1;
            double dot = 0.0;
            for (int k = 0; k < h; ++k)
                dot += f.u(i, k) * f.v(k, j);
            const double err = x.values()(i, j) - dot;
            for (int k = 0; k < h; ++k) {
                f.u(i, k) = std::max(0.0, f.u(i, k) + cfg.learning_rate * 2.0 * err * f.v(k, j));
                f.v(k, j) = std::max(0.0, f.v(k, j) + cfg.learning_rate * 2.0 * err * f.u(i, k));
            }
        }
        if (!val.empty()) {
            const double v = val_rmse();
            if (v < best_val) {
                best_val = v;
                best = f;
                stale = 0;
            } else if (++stale >= cfg.patience) {
                return best;
            }
        }
    }
    return val.empty() ? f : best;
}

} // namespace

TEST_SUITE("evaluation") {

TEST_CASE("metrics on hand series") {
    const std::vector<double> same{1.0, 5.0, 9.0};
    MetricReport r = metrics(same, same);
    CHECK(r.rmse == 0.0);
    CHECK(r.mae == 0.0);
    REQUIRE(r.pcc.has_value());
    CHECK(*r.pcc == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> up{1.0, 2.0, 3.0};
    const std::vector<double> down{3.0, 2.0, 1.0};
    r = metrics(up, down);
    REQUIRE(r.pcc.has_value());
    CHECK(*r.pcc == doctest::Approx(-1.0).epsilon(1e-12));

    const std::vector<double> truth{0.0, 0.0, 4.0};
    const std::vector<double> pred{0.0, 0.0, 2.0};
    r = metrics(truth, pred);
    CHECK(r.rmse == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(r.mae == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("metrics reports zero variance as a null pcc, never 0") {
    const std::vector<double> flat{2.0, 2.0, 2.0};
    const std::vector<double> varying{1.0, 2.0, 3.0};
    CHECK_FALSE(metrics(flat, varying).pcc.has_value());
    CHECK_FALSE(metrics(varying, flat).pcc.has_value());
    const std::vector<double> one_t{1.0}, one_p{2.0};
    CHECK_FALSE(metrics(one_t, one_p).pcc.has_value()); // n < 2
}

TEST_CASE("metrics input validation") {
    const std::vector<double> two{1.0, 2.0}, one{1.0}, none;
    const std::vector<double> with_nan{1.0, std::nan("")};
    CHECK_THROWS_AS(metrics(two, one), ShapeError);
    CHECK_THROWS_AS(metrics(none, none), ShapeError);
    CHECK_THROWS_AS(metrics(with_nan, two), DataError);
}

TEST_CASE("pcc is invariant under positive affine rescaling of the truth") {
    Rng eng(404);
    std::uniform_real_distribution<double> value(-10.0, 10.0);
    std::uniform_real_distribution<double> gain(0.1, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + eng() % 40;
        std::vector<double> truth(n), pred(n), scaled(n);
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = value(eng);
            pred[i] = value(eng);
        }
        const double a = gain(eng), b = value(eng);
        for (std::size_t i = 0; i < n; ++i)
            scaled[i] = a * truth[i] + b;
        const MetricReport base = metrics(truth, pred);
        const MetricReport moved = metrics(scaled, pred);
        if (base.pcc && moved.pcc)
            CHECK(*moved.pcc == doctest::Approx(*base.pcc).epsilon(1e-9));
    }
}

TEST_CASE("rmse dominates mae") {
    Rng eng(808);
    std::uniform_real_distribution<double> value(-50.0, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + eng() % 30;
        std::vector<double> truth(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = value(eng);
            pred[i] = value(eng);
        }
        const MetricReport r = metrics(truth, pred);
        CHECK(r.rmse >= r.mae - 1e-12);
    }
}

TEST_CASE("kfold_split partitions the cells evenly and deterministically") {
    std::vector<CellIndex> cells;
    for (int i = 1; i <= 12; ++i)
        cells.push_back({1, i});

    auto folds = kfold_split(cells, 6, 3);
    REQUIRE(folds.size() == 6);
    for (const auto& fold : folds)
        CHECK(fold.size() == 2);

    SUBCASE("union is the cell set, folds are disjoint") {
        std::set<std::pair<int, int>> seen;
        for (const auto& fold : folds)
            for (const CellIndex& c : fold)
                CHECK(seen.insert({c.layer, c.part}).second);
        CHECK(seen.size() == cells.size());
    }

    SUBCASE("leave-one-out") {
        std::vector<CellIndex> seven(cells.begin(), cells.begin() + 7);
        auto loo = kfold_split(seven, 7, 1);
        REQUIRE(loo.size() == 7);
        for (const auto& fold : loo)
            CHECK(fold.size() == 1);
    }

    SUBCASE("deterministic per seed") {
        auto again = kfold_split(cells, 6, 3);
        for (std::size_t i = 0; i < folds.size(); ++i)
            CHECK(folds[i] == again[i]);
        auto other = kfold_split(cells, 6, 4);
        bool same = true;
        for (std::size_t i = 0; i < folds.size() && same; ++i)
            same = folds[i] == other[i];
        CHECK_FALSE(same);
    }

    SUBCASE("k above the cell count is rejected") {
        CHECK_THROWS_AS(kfold_split(cells, 13, 0), ConfigError);
    }
}

TEST_CASE("grid_search on a single candidate returns it") {
    ObservationMatrix x(small_grid(2, 6));
    Rng eng(31);
    std::uniform_real_distribution<double> value(1.0, 8.0);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 6; ++j)
            if ((i + j) % 2 == 0)
                x.set({i, j}, value(eng));
    std::vector<double> q(5, 1.0);

    TrainConfig cfg;
    cfg.rank = 1;
    cfg.max_epochs = 150;
    cfg.patience = 0;

    const std::vector<double> g1{0.3}, g2{0.6};
    SearchResult result = grid_search(x, q, g1, g2, 2, cfg, 5);
    CHECK(result.best_lambda1 == 0.3);
    CHECK(result.best_lambda2 == 0.6);
    REQUIRE(result.cv_table.size() == 1);
    CHECK_FALSE(result.cv_table[0].failed);
    CHECK(result.folds == 2);
}

TEST_CASE("grid_search enumerates the full grid and ignores enumeration order") {
    ObservationMatrix x(small_grid(2, 6));
    Rng eng(77);
    std::uniform_real_distribution<double> value(1.0, 8.0);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 6; ++j)
            if (j != 3)
                x.set({i, j}, value(eng));
    std::vector<double> q(5, 1.0);

    TrainConfig cfg;
    cfg.rank = 1;
    cfg.max_epochs = 120;
    cfg.patience = 0;

    const std::vector<double> g1{0.1, 0.5, 0.9}, g2{0.2, 0.8};
    const std::vector<double> g1_rev{0.9, 0.1, 0.5}, g2_rev{0.8, 0.2};

    SearchResult a = grid_search(x, q, g1, g2, 2, cfg, 9);
    SearchResult b = grid_search(x, q, g1_rev, g2_rev, 2, cfg, 9);

    CHECK(a.cv_table.size() == 6);
    CHECK(a.best_lambda1 == b.best_lambda1);
    CHECK(a.best_lambda2 == b.best_lambda2);
    REQUIRE(b.cv_table.size() == 6);
    for (std::size_t i = 0; i < a.cv_table.size(); ++i) {
        CHECK(a.cv_table[i].lambda1 == b.cv_table[i].lambda1);
        CHECK(a.cv_table[i].lambda2 == b.cv_table[i].lambda2);
        CHECK(a.cv_table[i].mean_rmse == b.cv_table[i].mean_rmse);
    }
}

TEST_CASE("cross_test baseline equals the literal plain-SGD reference day by day") {
    Rng eng(606);
    std::uniform_real_distribution<double> value(1.0, 9.0);
    const CellIndex target{2, 3};

    std::vector<std::pair<std::string, ObservationMatrix>> days;
    for (int d = 0; d < 4; ++d) {
        ObservationMatrix obs(small_grid(2, 6));
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 6; ++j)
                if ((i + j + d) % 2 == 0 || (i == target.layer && j == target.part))
                    obs.set({i, j}, value(eng));
        days.emplace_back("2016-07-0" + std::to_string(d + 1), obs);
    }
    std::vector<double> q(5, 0.7);

    TrainConfig cfg;
    cfg.rank = 1;
    cfg.lambda1 = 0.4; // must be ignored by the baseline
    cfg.lambda2 = 0.4;
    cfg.max_epochs = 80;
    cfg.patience = 3;
    cfg.val_fraction = 0.3;
    cfg.seed = 12;

    CrossTestResult base = cross_test(days, q, target, cfg, false);
    REQUIRE(base.predicted.size() == days.size());

    for (std::size_t d = 0; d < days.size(); ++d) {
        ObservationMatrix train_obs = days[d].second;
        train_obs.clear(target);
        TrainConfig day_cfg = cfg;
        day_cfg.lambda1 = 0.0;
        day_cfg.lambda2 = 0.0;
        day_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(d));
        FactorPair ref = plain_sgd_reference(train_obs, day_cfg);
        double dot = 0.0;
        for (int k = 0; k < ref.rank; ++k)
            dot += ref.u(target.layer - 1, k) * ref.v(k, target.part - 1);
        CHECK(base.predicted[d] == dot);
    }
}

TEST_CASE("grid_search records failed candidates and ranks the survivors") {
    ObservationMatrix x(small_grid(2, 6));
    Rng eng(41);
    std::uniform_real_distribution<double> value(5.0, 9.0);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 6; ++j)
            x.set({i, j}, value(eng));
    std::vector<double> q(5, 1.0);

    TrainConfig cfg;
    cfg.rank = 1;
    cfg.max_epochs = 200;
    cfg.patience = 0;
    cfg.learning_rate = 0.02;

    // lambda large enough to blow up the regularizer step at this rate,
    // paired with a tame candidate that trains fine
    const std::vector<double> g1{0.05, 1e7}, g2{0.05};
    SearchResult result = grid_search(x, q, g1, g2, 2, cfg, 7);
    REQUIRE(result.cv_table.size() == 2);
    CHECK_FALSE(result.cv_table[0].failed); // (0.05, 0.05)
    CHECK(result.cv_table[1].failed);       // (1e7, 0.05)
    CHECK(std::isnan(result.cv_table[1].mean_rmse));
    CHECK(result.best_lambda1 == 0.05);

    SUBCASE("every candidate failing is a training error") {
        const std::vector<double> bad{1e7, 2e7};
        CHECK_THROWS_AS(grid_search(x, q, bad, g2, 2, cfg, 7), TrainingError);
    }
}

TEST_CASE("cross_test rejects a test cell missing from any day") {
    ObservationMatrix obs(small_grid(2, 4));
    obs.set({1, 1}, 1.0);
    obs.set({1, 2}, 2.0);
    std::vector<std::pair<std::string, ObservationMatrix>> days{{"2016-07-01", obs}};
    std::vector<double> q(3, 1.0);
    TrainConfig cfg;
    cfg.rank = 1;
    CHECK_THROWS_AS(cross_test(days, q, {2, 2}, cfg, true), ConfigError);
}

} // TEST_SUITE
