#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lining/config.hpp"
#include "lining/deduce.hpp"
#include "lining/evaluation.hpp"
#include "lining/heatmap.hpp"
#include "lining/readings.hpp"
#include "lining/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

/// Validation failures that should show the usage text.
struct UsageError : lining::ConfigError {
    using lining::ConfigError::ConfigError;
};

struct Globals {
    std::string config_path;
    std::string readings_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool serial = false;

    lining::Exec exec() const { return serial ? lining::Exec::serial : lining::Exec::parallel; }
};

lining::SectionConfig load_section(const Globals& g) {
    if (g.config_path.empty())
        throw UsageError("missing --config");
    lining::SectionConfig cfg = lining::load_config(g.config_path);
    if (g.seed_given)
        cfg.train.seed = g.seed;
    for (const std::string& w : cfg.warnings)
        std::cerr << "warning: " << w << "\n";
    return cfg;
}

lining::ReadingsTable load_readings(const Globals& g, const lining::SectionConfig& cfg) {
    fs::path path;
    if (!g.readings_path.empty())
        path = g.readings_path;
    else if (cfg.readings_path)
        path = *cfg.readings_path;
    else
        throw lining::ConfigError("no readings file: pass --readings or set \"readings\" in the "
                                  "config");
    lining::ReadingsTable table = lining::ingest_readings(path);
    for (const std::string& w : table.warnings)
        std::cerr << "warning: " << w << "\n";
    return table;
}

lining::CellIndex resolve_cell(const lining::SectionConfig& cfg, const std::string& spec) {
    const std::size_t comma = spec.find(',');
    if (comma != std::string::npos) {
        try {
            lining::CellIndex cell{std::stoi(spec.substr(0, comma)),
                                   std::stoi(spec.substr(comma + 1))};
            if (cell.layer < 1 || cell.layer > cfg.grid.layers || cell.part < 1 ||
                cell.part > cfg.grid.parts)
                throw lining::ConfigError("cell '" + spec + "' outside the grid");
            return cell;
        } catch (const std::logic_error&) {
            throw lining::ConfigError("bad cell spec '" + spec + "'; use layer,part or a sensor id");
        }
    }
    return cfg.layout.find(spec).cell;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

ordered_json loss_json(const lining::LossBreakdown& loss) {
    return {{"data", loss.data_term},
            {"adjacency", loss.adjacency_term},
            {"symmetry", loss.symmetry_term},
            {"total", loss.total}};
}

int cmd_mechanics(const Globals& g) {
    lining::SectionConfig cfg = load_section(g);
    const lining::LoadField field = lining::compute_load_field(cfg.profile, cfg.grid);
    std::cout << "n,phi_rad,radial,tangential\n";
    for (int n = 1; n <= cfg.grid.parts; ++n)
        std::cout << n << ',' << fmt6(lining::cell_angle(cfg.grid, n)) << ','
                  << fmt6(field.radial[n - 1]) << ',' << fmt6(field.tangential[n - 1]) << '\n';
    std::cout << "pair_a,pair_b,q\n";
    for (int n = 1; n < cfg.grid.parts; ++n)
        std::cout << n << ',' << n + 1 << ',' << fmt6(field.q_weights[n - 1]) << '\n';
    return 0;
}

int cmd_synth(const Globals& g, const lining::SynthConfig& synth_in, const std::string& out,
              const std::string& truth_out) {
    lining::SectionConfig cfg = load_section(g);
    lining::SynthConfig synth_cfg = synth_in;
    synth_cfg.seed = g.seed_given ? g.seed : cfg.train.seed;
    const lining::SynthField field = lining::synthesize_field(cfg.grid, synth_cfg);

    const fs::path out_path =
        out.empty() ? fs::path(g.out_dir) / "synthetic-readings.csv" : fs::path(out);
    lining::write_readings_csv(field, cfg.layout, out_path);
    if (!truth_out.empty())
        lining::write_truth_csv(field, truth_out);

    ordered_json summary{{"days", synth_cfg.days},
                         {"sensors", cfg.layout.entries.size()},
                         {"readings", out_path.string()}};
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_deduce(const Globals& g, const std::string& date) {
    lining::SectionConfig cfg = load_section(g);
    const lining::ReadingsTable table = load_readings(g, cfg);
    const auto day = table.days.find(date);
    if (day == table.days.end())
        throw lining::DataError("no readings for date '" + date + "'");

    const lining::DeductionResult result =
        lining::deduce_current(cfg, day->second, date, g.exec());

    fs::create_directories(g.out_dir);
    const fs::path base = fs::path(g.out_dir) / ("deduction-" + date);
    lining::write_result(result, base.string() + ".json");
    lining::write_matrix_csv(result.dense, base.string() + ".csv");
    lining::render_heatmap(result, base.string() + ".svg");

    ordered_json summary{{"section_id", result.section_id},
                         {"date", result.date},
                         {"max",
                          {{"layer", result.max_cell.layer},
                           {"part", result.max_cell.part},
                           {"value", result.max_value}}},
                         {"loss", loss_json(result.loss)},
                         {"offset", result.offset}};
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_history(const Globals& g, const std::vector<std::string>& cell_specs, bool warm_start) {
    lining::SectionConfig cfg = load_section(g);
    const lining::ReadingsTable table = load_readings(g, cfg);

    std::vector<lining::CellIndex> cells;
    if (cell_specs.empty())
        for (const lining::SensorEntry& e : cfg.layout.entries)
            cells.push_back(e.cell);
    else
        for (const std::string& spec : cell_specs)
            cells.push_back(resolve_cell(cfg, spec));

    const lining::HistoryResult history =
        lining::deduce_history(cfg, table, cells, warm_start, g.exec());

    fs::create_directories(g.out_dir);
    const fs::path series_path = fs::path(g.out_dir) / "history.csv";
    std::ofstream out(series_path, std::ios::binary);
    if (!out)
        throw lining::IoError("cannot write '" + series_path.string() + "'");
    out << "date,layer,part,value\n";
    for (std::size_t d = 0; d < history.dates.size(); ++d)
        for (std::size_t c = 0; c < cells.size(); ++c)
            out << history.dates[d] << ',' << cells[c].layer << ',' << cells[c].part << ','
                << fmt6(history.series[c][d]) << '\n';

    const lining::HistoryExtrema& ex = history.extrema;
    ordered_json summary{
        {"days", history.dates.size()},
        {"failed_days", history.failed_dates},
        {"max",
         {{"value", ex.max_value},
          {"layer", ex.max_cell.layer},
          {"part", ex.max_cell.part},
          {"date", ex.max_date}}},
        {"min",
         {{"value", ex.min_value},
          {"layer", ex.min_cell.layer},
          {"part", ex.min_cell.part},
          {"date", ex.min_date}}},
        {"warning_threshold", ex.warning_threshold ? ordered_json(*ex.warning_threshold)
                                                   : ordered_json(nullptr)},
        {"exceeds_warning", ex.exceeds_warning},
        {"series", series_path.string()}};
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_cross_test(const Globals& g, const std::string& cell_spec, bool baseline) {
    lining::SectionConfig cfg = load_section(g);
    const lining::ReadingsTable table = load_readings(g, cfg);
    const lining::CellIndex cell = resolve_cell(cfg, cell_spec);

    const lining::LoadField load = lining::compute_load_field(cfg.profile, cfg.grid);
    const std::vector<double> q = lining::adjacency_weights(load, cfg.train.wrap);

    std::vector<std::pair<std::string, lining::ObservationMatrix>> days;
    for (const auto& [date, values] : table.days)
        days.emplace_back(date, lining::assemble_observation(cfg.grid, cfg.layout, values));

    const lining::CrossTestResult result =
        lining::cross_test(days, q, cell, cfg.train, !baseline, g.exec());

    fs::create_directories(g.out_dir);
    const fs::path detail_path =
        fs::path(g.out_dir) / ("cross-test-" + std::to_string(cell.layer) + "-" +
                               std::to_string(cell.part) + (baseline ? "-baseline" : "") + ".csv");
    std::ofstream out(detail_path, std::ios::binary);
    if (!out)
        throw lining::IoError("cannot write '" + detail_path.string() + "'");
    out << "date,truth,predicted\n";
    for (std::size_t i = 0; i < result.dates.size(); ++i)
        out << result.dates[i] << ',' << fmt6(result.truth[i]) << ',' << fmt6(result.predicted[i])
            << '\n';

    ordered_json summary{
        {"cell", {{"layer", cell.layer}, {"part", cell.part}}},
        {"baseline", baseline},
        {"rmse", result.report.rmse},
        {"mae", result.report.mae},
        {"pcc", result.report.pcc ? ordered_json(*result.report.pcc) : ordered_json(nullptr)},
        {"n", result.report.n},
        {"failed_days", result.failed_dates},
        {"details", detail_path.string()}};
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_grid_search(const Globals& g, const std::string& date) {
    lining::SectionConfig cfg = load_section(g);
    const lining::ReadingsTable table = load_readings(g, cfg);
    const auto day = table.days.find(date);
    if (day == table.days.end())
        throw lining::DataError("no readings for date '" + date + "'");

    const lining::ObservationMatrix obs =
        lining::assemble_observation(cfg.grid, cfg.layout, day->second);
    const lining::LoadField load = lining::compute_load_field(cfg.profile, cfg.grid);
    const std::vector<double> q = lining::adjacency_weights(load, cfg.train.wrap);

    const lining::SearchResult result =
        lining::grid_search(obs, q, cfg.search.lambda1_grid, cfg.search.lambda2_grid,
                            cfg.search.folds, cfg.train, cfg.train.seed, g.exec());

    ordered_json rows = ordered_json::array();
    for (const lining::CvRow& row : result.cv_table)
        rows.push_back({{"lambda1", row.lambda1},
                        {"lambda2", row.lambda2},
                        {"mean_rmse", row.failed ? ordered_json(nullptr)
                                                 : ordered_json(row.mean_rmse)},
                        {"failed", row.failed}});
    ordered_json summary{{"best_lambda1", result.best_lambda1},
                         {"best_lambda2", result.best_lambda2},
                         {"folds", result.folds},
                         {"cv_table", std::move(rows)}};
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_render(const std::string& result_path, const std::string& out) {
    const lining::DeductionResult result = lining::read_result(result_path);
    fs::path out_path = out.empty() ? fs::path(result_path).replace_extension(".svg")
                                    : fs::path(out);
    lining::render_heatmap(result, out_path);
    std::cout << out_path.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Full-face lining stress deduction from sparse ring sensors"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config_path, "section config (JSON)");
    app.add_option("--readings", g.readings_path, "readings CSV (date,sensor_id,value)");
    app.add_option("--out-dir", g.out_dir, "directory for generated files");
    auto* seed_opt = app.add_option("--seed", g.seed, "override the training seed");
    app.add_flag("--serial", g.serial, "run the numeric kernels serially");

    auto* sc_mech = app.add_subcommand("mechanics", "dump per-column loads and Q weights");

    auto* sc_synth = app.add_subcommand("synth", "generate synthetic readings for the layout");
    lining::SynthConfig synth_cfg;
    std::string synth_out, synth_truth;
    sc_synth->add_option("--days", synth_cfg.days, "days to generate");
    sc_synth->add_option("--noise", synth_cfg.noise, "per-cell gaussian sigma (kN)");
    sc_synth->add_option("--amplitude", synth_cfg.seasonal_amplitude, "seasonal amplitude");
    sc_synth->add_option("--scale", synth_cfg.scale, "peak of the base field (kN)");
    sc_synth->add_option("--start-date", synth_cfg.start_date, "first date (ISO)");
    sc_synth->add_option("--out", synth_out, "readings output path");
    sc_synth->add_option("--truth", synth_truth, "also dump the dense truth (CSV)");

    auto* sc_deduce = app.add_subcommand("deduce", "deduce the full face for one day");
    std::string deduce_date;
    sc_deduce->add_option("--date", deduce_date, "day to deduce (ISO)")->required();

    auto* sc_history = app.add_subcommand("history", "per-day deduction over the whole horizon");
    std::vector<std::string> history_cells;
    bool warm_start = false;
    sc_history->add_option("--cells", history_cells,
                           "cells to extract (layer,part or sensor id)");
    sc_history->add_flag("--warm-start", warm_start, "chain days from the previous factors");

    auto* sc_cross = app.add_subcommand("cross-test", "leave-one-sensor-out evaluation");
    std::string cross_cell;
    bool baseline = false;
    sc_cross->add_option("--cell", cross_cell, "held-out cell (layer,part or sensor id)")
        ->required();
    sc_cross->add_flag("--baseline", baseline, "plain factorization without constraints");

    auto* sc_search = app.add_subcommand("grid-search", "cross-validated lambda search");
    std::string search_date;
    sc_search->add_option("--date", search_date, "day whose snapshot is searched (ISO)")
        ->required();

    auto* sc_render = app.add_subcommand("render", "re-render a saved deduction result");
    std::string render_result, render_out;
    sc_render->add_option("--result", render_result, "deduction result JSON")->required();
    sc_render->add_option("--out", render_out, "SVG output path");

    try {
        app.parse(argc, argv);
        g.seed_given = seed_opt->count() > 0;

        if (app.got_subcommand(sc_mech))
            return cmd_mechanics(g);
        if (app.got_subcommand(sc_synth))
            return cmd_synth(g, synth_cfg, synth_out, synth_truth);
        if (app.got_subcommand(sc_deduce))
            return cmd_deduce(g, deduce_date);
        if (app.got_subcommand(sc_history))
            return cmd_history(g, history_cells, warm_start);
        if (app.got_subcommand(sc_cross))
            return cmd_cross_test(g, cross_cell, baseline);
        if (app.got_subcommand(sc_search))
            return cmd_grid_search(g, search_date);
        if (app.got_subcommand(sc_render))
            return cmd_render(render_result, render_out);
        std::cerr << app.help();
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const lining::TrainingError& e) {
        std::cerr << "training error: " << e.what() << '\n';
        return 2;
    } catch (const lining::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 2;
    } catch (const lining::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 2;
    }
}
