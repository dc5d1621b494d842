#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "lining/geometry.hpp"
#include "lining/rng.hpp"

using namespace lining;

namespace {
constexpr double kPi = 3.14159265358979323846;

TunnelGrid grid_3x50() { return {3, 50, 14.5}; }

SensorLayout s2_layout() {
    // 13 sensors of the S2 section.
    SensorLayout layout;
    layout.section_id = "S2";
    const std::pair<int, int> cells[] = {{1, 2},  {1, 8},  {1, 14}, {1, 42}, {1, 48},
                                         {2, 2},  {2, 8},  {2, 42}, {2, 48}, {3, 2},
                                         {3, 8},  {3, 42}, {3, 48}};
    int i = 0;
    for (auto [m, n] : cells)
        layout.entries.push_back({"S2-" + std::to_string(++i), {m, n}});
    return layout;
}

} // namespace

TEST_SUITE("geometry") {

TEST_CASE("cell_angle places part centers half a step past the crown") {
    TunnelGrid g = grid_3x50();
    CHECK(cell_angle(g, 1) == doctest::Approx(kPi / 50.0).epsilon(1e-12));
    CHECK(cell_angle(g, 25) + cell_angle(g, 26) == doctest::Approx(2.0 * kPi).epsilon(1e-12));

    TunnelGrid two{1, 2, 6.0};
    CHECK(cell_angle(two, 1) == doctest::Approx(kPi / 2.0).epsilon(1e-12));

    CHECK_THROWS_AS(cell_angle(g, 0), IndexError);
    CHECK_THROWS_AS(cell_angle(g, 51), IndexError);
}

TEST_CASE("cell_angle is strictly increasing with uniform spacing") {
    TunnelGrid g{2, 36, 10.0};
    for (int n = 1; n < g.parts; ++n) {
        const double step = cell_angle(g, n + 1) - cell_angle(g, n);
        CHECK(step > 0.0);
        CHECK(step == doctest::Approx(2.0 * kPi / g.parts).epsilon(1e-12));
    }
    CHECK(cell_angle(g, 1) >= 0.0);
    CHECK(cell_angle(g, g.parts) < 2.0 * kPi);
}

TEST_CASE("mirror pairing") {
    TunnelGrid g = grid_3x50();
    CHECK(mirror(g, 1) == 50);
    CHECK(mirror(g, 25) == 26);
    for (int n = 1; n <= g.parts; ++n) {
        CHECK(mirror(g, mirror(g, n)) == n);
        CHECK(mirror(g, n) != n); // fixed-point-free for even N
    }
    CHECK_THROWS_AS(mirror(g, 0), IndexError);

    // mirrored centers reflect about the vertical axis
    for (int n = 1; n <= g.parts; ++n)
        CHECK(cell_angle(g, mirror(g, n)) ==
              doctest::Approx(2.0 * kPi - cell_angle(g, n)).epsilon(1e-12));
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS((TunnelGrid{0, 50, 14.5}.validate()), ConfigError);
    CHECK_THROWS_AS((TunnelGrid{3, 49, 14.5}.validate()), ConfigError);
    CHECK_THROWS_AS((TunnelGrid{3, 0, 14.5}.validate()), ConfigError);
    CHECK_THROWS_AS((TunnelGrid{3, 50, 0.0}.validate()), ConfigError);
    CHECK_NOTHROW(grid_3x50().validate());
}

TEST_CASE("assemble_observation covers exactly the sensors present") {
    TunnelGrid g = grid_3x50();
    SensorLayout layout = s2_layout();

    std::map<std::string, double> readings;
    for (const auto& e : layout.entries)
        readings[e.sensor_id] = 1.0;
    ObservationMatrix obs = assemble_observation(g, layout, readings);
    CHECK(obs.observed_count() == 13);

    SUBCASE("dropped sensors leave their cells empty") {
        readings.erase("S2-1");
        readings.erase("S2-7");
        ObservationMatrix partial = assemble_observation(g, layout, readings);
        CHECK(partial.observed_count() == 11);
        CHECK_FALSE(partial.is_observed(layout.find("S2-1").cell));
    }

    SUBCASE("unknown sensor id names the id") {
        readings["ghost"] = 2.0;
        CHECK_THROWS_WITH_AS(assemble_observation(g, layout, readings),
                             doctest::Contains("ghost"), DataError);
    }

    SUBCASE("non-finite reading is rejected") {
        readings["S2-3"] = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(assemble_observation(g, layout, readings), DataError);
    }

    SUBCASE("empty readings map is rejected") {
        CHECK_THROWS_AS(assemble_observation(g, layout, {}), DataError);
    }
}

TEST_CASE("assemble_observation never writes an unmatched cell") {
    Rng eng(20260808);
    std::uniform_int_distribution<int> layers(1, 4);
    std::uniform_int_distribution<int> parts_half(1, 10);
    std::uniform_real_distribution<double> value(-20.0, 20.0);

    for (int trial = 0; trial < 50; ++trial) {
        TunnelGrid g{layers(eng), 2 * parts_half(eng), 12.0};
        std::uniform_int_distribution<int> pick_layer(1, g.layers);
        std::uniform_int_distribution<int> pick_part(1, g.parts);

        SensorLayout layout;
        layout.section_id = "T";
        std::set<std::pair<int, int>> used;
        const int n_sensors = 1 + trial % 7;
        for (int s = 0; used.size() < static_cast<std::size_t>(n_sensors) && s < 100; ++s) {
            CellIndex cell{pick_layer(eng), pick_part(eng)};
            if (used.insert({cell.layer, cell.part}).second)
                layout.entries.push_back({"t" + std::to_string(used.size()), cell});
        }

        // random subset of sensors report a value
        std::map<std::string, double> readings;
        std::set<std::pair<int, int>> expected;
        for (const auto& e : layout.entries)
            if (eng() % 2 == 0) {
                readings[e.sensor_id] = value(eng);
                expected.insert({e.cell.layer, e.cell.part});
            }
        if (readings.empty()) {
            readings[layout.entries.front().sensor_id] = value(eng);
            expected.insert(
                {layout.entries.front().cell.layer, layout.entries.front().cell.part});
        }

        ObservationMatrix obs = assemble_observation(g, layout, readings);
        std::set<std::pair<int, int>> actual;
        for (const CellIndex& c : obs.observed_cells())
            actual.insert({c.layer, c.part});
        CHECK(actual == expected);
    }
}

TEST_CASE("layout validation rejects duplicates and out-of-bounds cells") {
    TunnelGrid g = grid_3x50();
    SensorLayout layout;
    layout.entries.push_back({"a", {1, 1}});
    layout.entries.push_back({"b", {1, 1}});
    CHECK_THROWS_AS(layout.validate(g), ConfigError);

    layout.entries.clear();
    layout.entries.push_back({"a", {4, 10}});
    CHECK_THROWS_AS(layout.validate(g), ConfigError);

    layout.entries.clear();
    layout.entries.push_back({"a", {1, 1}});
    layout.entries.push_back({"a", {1, 2}});
    CHECK_THROWS_AS(layout.validate(g), ConfigError);
}

TEST_CASE("observation matrix keeps empties empty") {
    ObservationMatrix obs(grid_3x50());
    CHECK(obs.observed_count() == 0);
    obs.set({2, 7}, 3.5);
    CHECK(obs.is_observed({2, 7}));
    CHECK(obs.at({2, 7}) == 3.5);
    CHECK_THROWS_AS(obs.at({1, 1}), DataError);
    CHECK(std::isnan(obs.values()(0, 0)));
    obs.clear({2, 7});
    CHECK(obs.observed_count() == 0);
    CHECK_THROWS_AS(obs.set({0, 1}, 1.0), IndexError);
}

} // TEST_SUITE
