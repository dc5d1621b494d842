#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace lining {

/// Long-form readings file parsed into daily maps. Dates are ISO strings, so
/// std::map keeps them chronologically sorted.
struct ReadingsTable {
    std::map<std::string, std::map<std::string, double>> days;
    std::vector<std::string> warnings; // duplicate (date, sensor) overwrites
};

/// Parses `date,sensor_id,value` rows. Duplicate (date, sensor) pairs: the
/// last row wins with a warning. Malformed rows fail with their row number.
ReadingsTable ingest_readings(const std::filesystem::path& path);

} // namespace lining
