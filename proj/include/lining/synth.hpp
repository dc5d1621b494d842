#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lining/geometry.hpp"

namespace lining {

/// Parameters for synthetic ground-truth generation. The base field is an
/// axisymmetric rank-2 surface (smooth in the column angle, symmetric about
/// the vertical axis); days modulate it with a seasonal factor plus optional
/// gaussian noise per cell.
struct SynthConfig {
    int days = 1;
    double noise = 0.0;             // per-cell sigma, kN
    double seasonal_amplitude = 0.25;
    double scale = 12.0;            // approximate peak of the base field, kN
    std::string start_date = "2016-07-01";
    std::uint64_t seed = 0;
};

struct SynthField {
    Matrix base;                    // M x N, rank 2, mirror-symmetric
    std::vector<std::string> dates; // consecutive, starting at start_date
    std::vector<Matrix> daily;      // truth per day
};

SynthField synthesize_field(const TunnelGrid& grid, const SynthConfig& cfg);

/// Readings rows (date,sensor_id,value) for the layout's cells, sampled from
/// the daily truth fields. Deterministic output bytes for a given field.
void write_readings_csv(const SynthField& field, const SensorLayout& layout,
                        const std::filesystem::path& path);

/// Long-form dump (date,layer,part,value) of the daily truth fields.
void write_truth_csv(const SynthField& field, const std::filesystem::path& path);

} // namespace lining
