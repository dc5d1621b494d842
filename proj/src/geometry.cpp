#include "lining/geometry.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace lining {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
} // namespace

void TunnelGrid::validate() const {
    if (layers < 1)
        throw ConfigError("grid.layers must be >= 1, got " + std::to_string(layers));
    if (parts < 2)
        throw ConfigError("grid.parts must be >= 2, got " + std::to_string(parts));
    if (parts % 2 != 0)
        throw ConfigError("grid.parts must be even, got " + std::to_string(parts));
    if (!(external_diameter > 0.0))
        throw ConfigError("grid.external_diameter must be > 0");
}

void SensorLayout::validate(const TunnelGrid& grid) const {
    std::set<std::pair<int, int>> seen_cells;
    std::set<std::string> seen_ids;
    for (const auto& e : entries) {
        if (e.sensor_id.empty())
            throw ConfigError("layout: empty sensor id");
        if (!seen_ids.insert(e.sensor_id).second)
            throw ConfigError("layout: duplicate sensor id '" + e.sensor_id + "'");
        if (e.cell.layer < 1 || e.cell.layer > grid.layers || e.cell.part < 1 ||
            e.cell.part > grid.parts)
            throw ConfigError("layout: sensor '" + e.sensor_id + "' at (" +
                              std::to_string(e.cell.layer) + "," + std::to_string(e.cell.part) +
                              ") is outside the " + std::to_string(grid.layers) + "x" +
                              std::to_string(grid.parts) + " grid");
        if (!seen_cells.insert({e.cell.layer, e.cell.part}).second)
            throw ConfigError("layout: two sensors share cell (" + std::to_string(e.cell.layer) +
                              "," + std::to_string(e.cell.part) + ")");
    }
}

const SensorEntry& SensorLayout::find(const std::string& sensor_id) const {
    for (const auto& e : entries)
        if (e.sensor_id == sensor_id)
            return e;
    throw DataError("unknown sensor id '" + sensor_id + "' for section '" + section_id + "'");
}

bool SensorLayout::contains(const std::string& sensor_id) const {
    for (const auto& e : entries)
        if (e.sensor_id == sensor_id)
            return true;
    return false;
}

ObservationMatrix::ObservationMatrix(const TunnelGrid& grid)
    : grid_(grid), values_(grid.layers, grid.parts, kNan), mask_(grid.layers, grid.parts, 0.0) {
    grid.validate();
}

void ObservationMatrix::check_bounds(CellIndex cell) const {
    if (cell.layer < 1 || cell.layer > grid_.layers || cell.part < 1 || cell.part > grid_.parts)
        throw IndexError("cell (" + std::to_string(cell.layer) + "," + std::to_string(cell.part) +
                         ") outside the " + std::to_string(grid_.layers) + "x" +
                         std::to_string(grid_.parts) + " grid");
}

bool ObservationMatrix::is_observed(CellIndex cell) const {
    check_bounds(cell);
    return mask_(cell.layer - 1, cell.part - 1) != 0.0;
}

double ObservationMatrix::at(CellIndex cell) const {
    if (!is_observed(cell))
        throw DataError("cell (" + std::to_string(cell.layer) + "," + std::to_string(cell.part) +
                        ") carries no observation");
    return values_(cell.layer - 1, cell.part - 1);
}

void ObservationMatrix::set(CellIndex cell, double value) {
    check_bounds(cell);
    if (!std::isfinite(value))
        throw DataError("non-finite value for cell (" + std::to_string(cell.layer) + "," +
                        std::to_string(cell.part) + ")");
    values_(cell.layer - 1, cell.part - 1) = value;
    mask_(cell.layer - 1, cell.part - 1) = 1.0;
}

void ObservationMatrix::clear(CellIndex cell) {
    check_bounds(cell);
    values_(cell.layer - 1, cell.part - 1) = kNan;
    mask_(cell.layer - 1, cell.part - 1) = 0.0;
}

int ObservationMatrix::observed_count() const {
    int count = 0;
    for (int m = 0; m < mask_.rows(); ++m)
        for (int n = 0; n < mask_.cols(); ++n)
            if (mask_(m, n) != 0.0)
                ++count;
    return count;
}

std::vector<CellIndex> ObservationMatrix::observed_cells() const {
    std::vector<CellIndex> cells;
    for (int m = 0; m < mask_.rows(); ++m)
        for (int n = 0; n < mask_.cols(); ++n)
            if (mask_(m, n) != 0.0)
                cells.push_back({m + 1, n + 1});
    return cells;
}

double cell_angle(const TunnelGrid& grid, int part) {
    if (part < 1 || part > grid.parts)
        throw IndexError("part " + std::to_string(part) + " outside 1.." +
                         std::to_string(grid.parts));
    return 2.0 * kPi * (part - 0.5) / grid.parts;
}

int mirror(const TunnelGrid& grid, int part) {
    if (part < 1 || part > grid.parts)
        throw IndexError("part " + std::to_string(part) + " outside 1.." +
                         std::to_string(grid.parts));
    return grid.parts + 1 - part;
}

ObservationMatrix assemble_observation(const TunnelGrid& grid, const SensorLayout& layout,
                                       const std::map<std::string, double>& readings) {
    grid.validate();
    layout.validate(grid);

    ObservationMatrix obs(grid);
    for (const auto& [sensor_id, value] : readings) {
        const SensorEntry& entry = layout.find(sensor_id); // throws on unknown id
        if (!std::isfinite(value))
            throw DataError("non-finite reading for sensor '" + sensor_id + "'");
        obs.set(entry.cell, value);
    }
    if (obs.observed_count() < 1)
        throw DataError("no readings matched the layout; at least one observed cell is required");
    return obs;
}

} // namespace lining
