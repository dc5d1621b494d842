#include "lining/deduce.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "lining/rng.hpp"

namespace lining {

namespace {

void locate_max(const Matrix& dense, CellIndex& cell, double& value) {
    value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < dense.rows(); ++i)
        for (int j = 0; j < dense.cols(); ++j)
            if (dense(i, j) > value) {
                value = dense(i, j);
                cell = {i + 1, j + 1};
            }
}

DeductionResult deduce_one(const SectionConfig& cfg, const std::map<std::string, double>& day,
                           const std::string& date, std::span<const double> q,
                           const TrainConfig& train_cfg, Exec exec, const FactorPair* warm,
                           FactorPair* factors_out) {
    ObservationMatrix obs = assemble_observation(cfg.grid, cfg.layout, day);
    auto [factors, report] = factorize(obs, q, train_cfg, exec, warm);

    DeductionResult result;
    result.section_id = cfg.section_id;
    result.date = date;
    result.grid = cfg.grid;
    result.dense = reconstruct(factors, report.offset, exec);
    result.observed = obs.observed_cells();
    result.loss = report.final_loss;
    result.offset = report.offset;
    locate_max(result.dense, result.max_cell, result.max_value);
    if (factors_out)
        *factors_out = std::move(factors);
    return result;
}

} // namespace

DeductionResult deduce_current(const SectionConfig& cfg,
                               const std::map<std::string, double>& day_readings,
                               const std::string& date, Exec exec) {
    const LoadField load = compute_load_field(cfg.profile, cfg.grid);
    const std::vector<double> q = adjacency_weights(load, cfg.train.wrap);
    return deduce_one(cfg, day_readings, date, q, cfg.train, exec, nullptr, nullptr);
}

HistoryResult deduce_history(const SectionConfig& cfg, const ReadingsTable& readings,
                             const std::vector<CellIndex>& cells, bool warm_start, Exec exec) {
    if (readings.days.empty())
        throw DataError("deduce_history: no readings");
    for (const CellIndex& c : cells)
        if (c.layer < 1 || c.layer > cfg.grid.layers || c.part < 1 || c.part > cfg.grid.parts)
            throw ConfigError("deduce_history: requested cell (" + std::to_string(c.layer) + "," +
                              std::to_string(c.part) + ") outside the grid");

    const LoadField load = compute_load_field(cfg.profile, cfg.grid);
    const std::vector<double> q = adjacency_weights(load, cfg.train.wrap);

    std::vector<std::pair<std::string, const std::map<std::string, double>*>> days;
    days.reserve(readings.days.size());
    for (const auto& [date, day] : readings.days)
        days.emplace_back(date, &day);

    const std::ptrdiff_t n_days = static_cast<std::ptrdiff_t>(days.size());
    std::vector<std::optional<DeductionResult>> daily(days.size());

    if (warm_start) {
        FactorPair carry;
        bool have_carry = false;
        for (std::ptrdiff_t d = 0; d < n_days; ++d) {
            TrainConfig day_cfg = cfg.train;
            day_cfg.seed = mix_seed(cfg.train.seed, static_cast<std::uint64_t>(d));
            try {
                FactorPair trained;
                daily[d] = deduce_one(cfg, *days[d].second, days[d].first, q, day_cfg, exec,
                                      have_carry ? &carry : nullptr, &trained);
                carry = std::move(trained);
                have_carry = true;
            } catch (const Error&) {
                daily[d].reset();
            }
        }
    } else {
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
        for (std::ptrdiff_t d = 0; d < n_days; ++d) {
            TrainConfig day_cfg = cfg.train;
            day_cfg.seed = mix_seed(cfg.train.seed, static_cast<std::uint64_t>(d));
            try {
                daily[d] = deduce_one(cfg, *days[d].second, days[d].first, q, day_cfg, exec,
                                      nullptr, nullptr);
            } catch (const Error&) {
                daily[d].reset();
            }
        }
    }

    HistoryResult result;
    result.cells = cells;
    result.series.assign(cells.size(), {});
    HistoryExtrema& ex = result.extrema;
    ex.max_value = -std::numeric_limits<double>::infinity();
    ex.min_value = std::numeric_limits<double>::infinity();

    for (std::size_t d = 0; d < daily.size(); ++d) {
        if (!daily[d]) {
            result.failed_dates.push_back(days[d].first);
            continue;
        }
        const DeductionResult& day = *daily[d];
        result.dates.push_back(day.date);
        for (std::size_t c = 0; c < cells.size(); ++c)
            result.series[c].push_back(day.dense(cells[c].layer - 1, cells[c].part - 1));
        for (int i = 0; i < day.dense.rows(); ++i)
            for (int j = 0; j < day.dense.cols(); ++j) {
                const double v = day.dense(i, j);
                if (v > ex.max_value) {
                    ex.max_value = v;
                    ex.max_cell = {i + 1, j + 1};
                    ex.max_date = day.date;
                }
                if (v < ex.min_value) {
                    ex.min_value = v;
                    ex.min_cell = {i + 1, j + 1};
                    ex.min_date = day.date;
                }
            }
    }
    if (result.dates.empty())
        throw TrainingError("deduce_history: every day failed to train");

    ex.warning_threshold = cfg.warning_threshold;
    ex.exceeds_warning = cfg.warning_threshold && ex.max_value > *cfg.warning_threshold;
    return result;
}

void write_result(const DeductionResult& result, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["schema"] = "deduction-result/1";
    j["section_id"] = result.section_id;
    j["date"] = result.date;
    j["grid"] = {{"layers", result.grid.layers},
                 {"parts", result.grid.parts},
                 {"external_diameter", result.grid.external_diameter}};
    j["offset"] = result.offset;
    j["loss"] = {{"data", result.loss.data_term},
                 {"adjacency", result.loss.adjacency_term},
                 {"symmetry", result.loss.symmetry_term},
                 {"total", result.loss.total}};
    j["max"] = {{"layer", result.max_cell.layer},
                {"part", result.max_cell.part},
                {"value", result.max_value}};
    auto observed = nlohmann::ordered_json::array();
    for (const CellIndex& c : result.observed)
        observed.push_back({c.layer, c.part});
    j["observed"] = std::move(observed);
    auto dense = nlohmann::ordered_json::array();
    for (int i = 0; i < result.dense.rows(); ++i) {
        auto row = nlohmann::ordered_json::array();
        for (int jcol = 0; jcol < result.dense.cols(); ++jcol)
            row.push_back(result.dense(i, jcol));
        dense.push_back(std::move(row));
    }
    j["dense"] = std::move(dense);

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write result file '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out)
        throw IoError("failed while writing '" + path.string() + "'");
}

DeductionResult read_result(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open result file '" + path.string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("result parse error in '" + path.string() + "': " + e.what());
    }

    try {
        DeductionResult result;
        result.section_id = j.at("section_id").get<std::string>();
        result.date = j.at("date").get<std::string>();
        result.grid.layers = j.at("grid").at("layers").get<int>();
        result.grid.parts = j.at("grid").at("parts").get<int>();
        result.grid.external_diameter = j.at("grid").at("external_diameter").get<double>();
        result.grid.validate();
        result.offset = j.at("offset").get<double>();
        result.loss.data_term = j.at("loss").at("data").get<double>();
        result.loss.adjacency_term = j.at("loss").at("adjacency").get<double>();
        result.loss.symmetry_term = j.at("loss").at("symmetry").get<double>();
        result.loss.total = j.at("loss").at("total").get<double>();

        const auto& dense = j.at("dense");
        if (static_cast<int>(dense.size()) != result.grid.layers)
            throw DataError("result: dense row count does not match grid.layers");
        result.dense = Matrix(result.grid.layers, result.grid.parts);
        for (int i = 0; i < result.grid.layers; ++i) {
            const auto& row = dense.at(i);
            if (static_cast<int>(row.size()) != result.grid.parts)
                throw DataError("result: dense column count does not match grid.parts");
            for (int jcol = 0; jcol < result.grid.parts; ++jcol) {
                result.dense(i, jcol) = row.at(jcol).get<double>();
                if (!std::isfinite(result.dense(i, jcol)))
                    throw DataError("result: non-finite dense value");
            }
        }

        for (const auto& cell : j.at("observed")) {
            CellIndex c{cell.at(0).get<int>(), cell.at(1).get<int>()};
            if (c.layer < 1 || c.layer > result.grid.layers || c.part < 1 ||
                c.part > result.grid.parts)
                throw DataError("result: observed cell outside the grid");
            result.observed.push_back(c);
        }

        result.max_cell.layer = j.at("max").at("layer").get<int>();
        result.max_cell.part = j.at("max").at("part").get<int>();
        result.max_value = j.at("max").at("value").get<double>();
        CellIndex check_cell;
        double check_value;
        locate_max(result.dense, check_cell, check_value);
        if (check_value != result.max_value)
            throw DataError("result: stored max does not attain the dense maximum");
        return result;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("result file '" + path.string() + "' is malformed: " + e.what());
    }
}

void write_matrix_csv(const Matrix& dense, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write matrix file '" + path.string() + "'");
    char buf[32];
    for (int i = 0; i < dense.rows(); ++i) {
        for (int j = 0; j < dense.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.6f", dense(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
    if (!out)
        throw IoError("failed while writing '" + path.string() + "'");
}

} // namespace lining
