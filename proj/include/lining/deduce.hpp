#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lining/config.hpp"
#include "lining/readings.hpp"

namespace lining {

/// One day's completed full-face state.
struct DeductionResult {
    std::string section_id;
    std::string date;
    TunnelGrid grid;
    Matrix dense;                    // M x N, de-shifted
    std::vector<CellIndex> observed; // cells that carried a reading
    LossBreakdown loss;
    CellIndex max_cell;
    double max_value = 0.0;
    double offset = 0.0;
};

/// Trains on every observed cell of one day and completes the matrix.
DeductionResult deduce_current(const SectionConfig& cfg,
                               const std::map<std::string, double>& day_readings,
                               const std::string& date, Exec exec = Exec::parallel);

struct HistoryExtrema {
    double max_value = 0.0;
    CellIndex max_cell;
    std::string max_date;
    double min_value = 0.0;
    CellIndex min_cell;
    std::string min_date;
    std::optional<double> warning_threshold;
    bool exceeds_warning = false;
};

struct HistoryResult {
    std::vector<std::string> dates;          // days that deduced, sorted
    std::vector<CellIndex> cells;            // requested cells
    std::vector<std::vector<double>> series; // series[cell][day]
    HistoryExtrema extrema;
    std::vector<std::string> failed_dates;
};

/// Per-day deduction over the whole horizon. A failed day is recorded and
/// skipped. Days run concurrently unless warm_start chains them, in which
/// case each day starts from the previous day's factors.
HistoryResult deduce_history(const SectionConfig& cfg, const ReadingsTable& readings,
                             const std::vector<CellIndex>& cells, bool warm_start = false,
                             Exec exec = Exec::parallel);

/// Result persistence (JSON with stable key order, byte-deterministic).
void write_result(const DeductionResult& result, const std::filesystem::path& path);
DeductionResult read_result(const std::filesystem::path& path);

/// Dense matrix as rectangular CSV, one row per layer.
void write_matrix_csv(const Matrix& dense, const std::filesystem::path& path);

} // namespace lining
