#pragma once

#include <map>
#include <string>
#include <vector>

#include "lining/errors.hpp"
#include "lining/matrix.hpp"

namespace lining {

/// Discretization of one ring section: M radial layers by N angular parts.
/// Layer 1 is the innermost layer; part 1 is the first part clockwise from
/// the crown. N must be even so that the mirror pairing n <-> N+1-n has no
/// fixed point.
struct TunnelGrid {
    int layers = 0;              // M
    int parts = 0;               // N, even
    double external_diameter = 0.0; // meters

    void validate() const;
    int cell_count() const { return layers * parts; }
};

/// 1-based grid coordinate: layer in 1..M, part in 1..N.
struct CellIndex {
    int layer = 0;
    int part = 0;

    friend bool operator==(const CellIndex&, const CellIndex&) = default;
    friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

struct SensorEntry {
    std::string sensor_id;
    CellIndex cell;
};

/// Where each sensor of one monitoring section sits on the grid.
struct SensorLayout {
    std::string section_id;
    std::vector<SensorEntry> entries;

    /// Checks bounds against the grid and rejects duplicate cells or ids.
    void validate(const TunnelGrid& grid) const;

    /// Entry lookup by sensor id; throws DataError on unknown id.
    const SensorEntry& find(const std::string& sensor_id) const;
    bool contains(const std::string& sensor_id) const;
};

/// Sparse M x N stress matrix: values are defined only on observed cells,
/// every other cell stays empty (NaN internally), never zero-filled.
class ObservationMatrix {
public:
    ObservationMatrix() = default;
    explicit ObservationMatrix(const TunnelGrid& grid);

    const TunnelGrid& grid() const { return grid_; }

    bool is_observed(CellIndex cell) const;
    double at(CellIndex cell) const;             // throws if cell is empty
    void set(CellIndex cell, double value);      // marks the cell observed
    void clear(CellIndex cell);                  // marks the cell empty again

    int observed_count() const;
    /// Observed cells in row-major (layer, part) order.
    std::vector<CellIndex> observed_cells() const;

    /// Raw storage for the numeric kernels: values matrix (NaN on empty
    /// cells) and 0/1 mask, both M x N.
    const Matrix& values() const { return values_; }
    const Matrix& mask() const { return mask_; }

private:
    void check_bounds(CellIndex cell) const;

    TunnelGrid grid_;
    Matrix values_;
    Matrix mask_;
};

/// Angular center of part n, measured clockwise from the arch crown:
/// phi_n = 2*pi*(n - 0.5)/N. Centers are offset by half a part so that
/// phi_{N+1-n} = 2*pi - phi_n, i.e. the pairing n <-> N+1-n is an exact
/// reflection about the vertical axis.
double cell_angle(const TunnelGrid& grid, int part);

/// Axisymmetric partner column: N + 1 - n.
int mirror(const TunnelGrid& grid, int part);

/// Places the readings present in the map onto the grid. Sensors listed in
/// the layout but absent from the readings leave their cell empty; readings
/// for unknown sensor ids are an error.
ObservationMatrix assemble_observation(const TunnelGrid& grid, const SensorLayout& layout,
                                       const std::map<std::string, double>& readings);

} // namespace lining
