#include "lining/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "lining/dates.hpp"
#include "lining/errors.hpp"
#include "lining/rng.hpp"

namespace lining {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}
} // namespace

SynthField synthesize_field(const TunnelGrid& grid, const SynthConfig& cfg) {
    grid.validate();
    if (cfg.days < 1)
        throw ConfigError("synth: days must be >= 1");
    if (cfg.noise < 0.0)
        throw ConfigError("synth: noise must be >= 0");
    if (!(cfg.scale > 0.0))
        throw ConfigError("synth: scale must be > 0");
    if (!is_valid_date(cfg.start_date))
        throw ConfigError("synth: bad start_date '" + cfg.start_date + "'");

    const int m = grid.layers, n = grid.parts;
    Rng eng(mix_seed(cfg.seed, 0x73796e74));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Two smooth mirror-symmetric column profiles: cos(phi) and cos(2*phi)
    // are both even about the vertical axis, so v(n) == v(N+1-n).
    Matrix v(2, n);
    for (int k = 0; k < 2; ++k) {
        const double a = 0.8 + 0.4 * unit(eng);
        const double b = (0.25 + 0.35 * unit(eng)) * (k == 0 ? 1.0 : -1.0);
        const double c = 0.15 + 0.25 * unit(eng);
        for (int j = 0; j < n; ++j) {
            const double phi = cell_angle(grid, j + 1);
            v(k, j) = a + b * std::cos(phi) + c * std::cos(2.0 * phi);
        }
    }

    // Per-layer loadings, kept positive; the inner layer carries the most.
    Matrix u(m, 2);
    for (int i = 0; i < m; ++i) {
        const double layer_drop = 1.0 - 0.15 * i / std::max(1, m - 1);
        u(i, 0) = (0.5 + 0.5 * unit(eng)) * layer_drop;
        u(i, 1) = (0.2 + 0.4 * unit(eng)) * layer_drop;
    }

    SynthField field;
    field.base = Matrix(m, n);
    double peak = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            field.base(i, j) = u(i, 0) * v(0, j) + u(i, 1) * v(1, j);
            peak = std::max(peak, field.base(i, j));
        }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            field.base(i, j) *= cfg.scale / peak;

    const double phase = 2.0 * kPi * unit(eng);
    std::normal_distribution<double> gauss(0.0, 1.0);
    field.dates.reserve(cfg.days);
    field.daily.reserve(cfg.days);
    for (int t = 0; t < cfg.days; ++t) {
        field.dates.push_back(add_days(cfg.start_date, t));
        const double season =
            1.0 + cfg.seasonal_amplitude * std::sin(2.0 * kPi * t / 365.25 + phase);
        Matrix day(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                double value = field.base(i, j) * season;
                if (cfg.noise > 0.0)
                    value += cfg.noise * gauss(eng);
                day(i, j) = value;
            }
        field.daily.push_back(std::move(day));
    }
    return field;
}

void write_readings_csv(const SynthField& field, const SensorLayout& layout,
                        const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write readings file '" + path.string() + "'");
    out << "date,sensor_id,value\n";
    for (std::size_t t = 0; t < field.daily.size(); ++t)
        for (const SensorEntry& e : layout.entries)
            out << field.dates[t] << ',' << e.sensor_id << ','
                << format_value(field.daily[t](e.cell.layer - 1, e.cell.part - 1)) << '\n';
    if (!out)
        throw IoError("failed while writing '" + path.string() + "'");
}

void write_truth_csv(const SynthField& field, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write truth file '" + path.string() + "'");
    out << "date,layer,part,value\n";
    for (std::size_t t = 0; t < field.daily.size(); ++t) {
        const Matrix& day = field.daily[t];
        for (int i = 0; i < day.rows(); ++i)
            for (int j = 0; j < day.cols(); ++j)
                out << field.dates[t] << ',' << (i + 1) << ',' << (j + 1) << ','
                    << format_value(day(i, j)) << '\n';
    }
    if (!out)
        throw IoError("failed while writing '" + path.string() + "'");
}

} // namespace lining
