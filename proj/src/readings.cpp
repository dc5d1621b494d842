#include "lining/readings.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "lining/dates.hpp"
#include "lining/errors.hpp"

namespace lining {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

double parse_value(const std::string& text, std::size_t row) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw DataError("readings row " + std::to_string(row) + ": bad value '" + text + "'");
    if (!std::isfinite(value))
        throw DataError("readings row " + std::to_string(row) + ": non-finite value");
    return value;
}

} // namespace

ReadingsTable ingest_readings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open readings file '" + path.string() + "'");

    std::string line;
    std::size_t row = 0;
    if (!std::getline(in, line))
        throw DataError("readings file '" + path.string() + "' is empty");
    ++row;
    if (split_fields(line) != std::vector<std::string>{"date", "sensor_id", "value"})
        throw DataError("readings row 1: expected header 'date,sensor_id,value'");

    ReadingsTable table;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty())
            continue;
        const auto fields = split_fields(line);
        if (fields.size() != 3)
            throw DataError("readings row " + std::to_string(row) + ": expected 3 fields, got " +
                            std::to_string(fields.size()));
        const std::string& date = fields[0];
        const std::string& sensor = fields[1];
        if (!is_valid_date(date))
            throw DataError("readings row " + std::to_string(row) + ": bad date '" + date + "'");
        if (sensor.empty())
            throw DataError("readings row " + std::to_string(row) + ": empty sensor id");
        const double value = parse_value(fields[2], row);

        auto& day = table.days[date];
        if (auto it = day.find(sensor); it != day.end()) {
            table.warnings.push_back("row " + std::to_string(row) + ": duplicate reading for (" +
                                     date + ", " + sensor + "); keeping the last value");
            it->second = value;
        } else {
            day.emplace(sensor, value);
        }
    }
    if (table.days.empty())
        throw DataError("readings file '" + path.string() + "' has no data rows");
    return table;
}

} // namespace lining
