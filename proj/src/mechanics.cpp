#include "lining/mechanics.hpp"

#include <algorithm>
#include <cmath>

namespace lining {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kZeroForce = 1e-12;
} // namespace

void GroundLayer::validate() const {
    if (!(thickness > 0.0))
        throw ConfigError("ground layer '" + name + "': thickness must be > 0");
    if (!(unit_weight > 0.0))
        throw ConfigError("ground layer '" + name + "': unit_weight must be > 0");
    if (lateral_coefficient < 0.0 || lateral_coefficient > 1.0)
        throw ConfigError("ground layer '" + name + "': lateral_coefficient must be in [0, 1]");
}

void SectionProfile::validate() const {
    if (water_head < 0.0)
        throw DomainError("profile: water_head must be >= 0");
    if (!(water_unit_weight > 0.0))
        throw DomainError("profile: water_unit_weight must be > 0");
    if (!(external_diameter > 0.0))
        throw ConfigError("profile: external_diameter must be > 0");
    if (ring_gravity < 0.0)
        throw ConfigError("profile: ring_gravity must be >= 0");
    if (ring_floatage < 0.0)
        throw ConfigError("profile: ring_floatage must be >= 0");
    if (overburden.empty())
        throw ConfigError("profile: overburden must list at least one ground layer");
    for (const auto& layer : overburden)
        layer.validate();
    host_layer.validate();
}

double water_pressure(const SectionProfile& profile) {
    if (profile.water_head < 0.0)
        throw DomainError("water_pressure: water_head must be >= 0");
    if (!(profile.water_unit_weight > 0.0))
        throw DomainError("water_pressure: water_unit_weight must be > 0");
    return profile.water_unit_weight * profile.water_head;
}

SoilPressures soil_pressures(const SectionProfile& profile, double y) {
    const double half = profile.external_diameter / 2.0;
    if (std::abs(y) > half)
        throw DomainError("soil_pressures: |y| exceeds the external radius");

    SoilPressures out;
    for (const auto& layer : profile.overburden) {
        out.overburden += layer.thickness * (layer.unit_weight - profile.water_unit_weight);
        if (layer.unit_weight <= profile.water_unit_weight)
            out.buoyant_layers.push_back(layer.name);
    }
    out.bottom = out.overburden +
                 (profile.ring_gravity - profile.ring_floatage) / profile.external_diameter;
    out.lateral = profile.host_layer.lateral_coefficient *
                  (out.overburden +
                   (half - y) * (profile.host_layer.unit_weight - profile.water_unit_weight));
    if (profile.host_layer.unit_weight <= profile.water_unit_weight)
        out.buoyant_layers.push_back(profile.host_layer.name);
    return out;
}

void resultants_at(const SectionProfile& profile, double psi, double& radial,
                   double& tangential) {
    if (psi < 0.0 || psi > kPi)
        throw DomainError("resultants_at: psi must lie in [0, pi]");

    const double half = profile.external_diameter / 2.0;
    const double y = half * std::cos(psi);
    const SoilPressures soil = soil_pressures(profile, y);
    const double pw = water_pressure(profile);
    const double g = profile.ring_gravity;

    if (psi <= kPi / 2.0) {
        const double theta = kPi / 2.0 - psi;
        radial = pw + (g + soil.overburden) * std::sin(theta) + soil.lateral * std::cos(theta);
        tangential = soil.lateral * std::sin(theta) - (g + soil.overburden) * std::cos(theta);
    } else {
        const double theta = psi - kPi / 2.0;
        radial = pw + (soil.bottom - g) * std::sin(theta) + soil.lateral * std::cos(theta);
        tangential = soil.lateral * std::sin(theta) - (g - soil.bottom) * std::cos(theta);
    }
}

LoadField resultants(const SectionProfile& profile, const TunnelGrid& grid) {
    profile.validate();
    grid.validate();

    LoadField field;
    field.radial.resize(grid.parts);
    field.tangential.resize(grid.parts);
    for (int n = 1; n <= grid.parts; ++n) {
        // Angular distance from the crown, psi = min(phi, 2*pi - phi), computed
        // from the integer half-step count so that mirror partners get the
        // bit-identical psi (and the same semicircle branch), and a column
        // sitting exactly on the springline lands exactly on pi/2.
        const double half_steps =
            std::min(2.0 * n - 1.0, 2.0 * (grid.parts - n) + 1.0);
        const double psi = kPi * (half_steps / grid.parts);
        resultants_at(profile, psi, field.radial[n - 1], field.tangential[n - 1]);
    }
    return field;
}

std::vector<double> adjacency_weights(const LoadField& load, bool wrap) {
    const auto& tau = load.tangential;
    const int n = static_cast<int>(tau.size());
    if (n < 2)
        throw ShapeError("adjacency_weights: need at least two columns");

    auto pair_weight = [](double a, double b) {
        const double lo = std::min(std::abs(a), std::abs(b));
        const double hi = std::max(std::abs(a), std::abs(b));
        if (hi < kZeroForce)
            return 1.0; // both forces vanish: maximally similar pair
        return 1.0 - (hi - lo) / hi;
    };

    std::vector<double> q;
    q.reserve(wrap ? n : n - 1);
    for (int i = 0; i + 1 < n; ++i)
        q.push_back(pair_weight(tau[i], tau[i + 1]));
    if (wrap)
        q.push_back(pair_weight(tau[n - 1], tau[0]));
    return q;
}

LoadField compute_load_field(const SectionProfile& profile, const TunnelGrid& grid) {
    LoadField field = resultants(profile, grid);
    field.q_weights = adjacency_weights(field);
    return field;
}

void estimate_ring_forces(double external_diameter, double lining_thickness, double ring_width,
                          double concrete_unit_weight, double water_unit_weight, double& gravity,
                          double& floatage) {
    if (!(external_diameter > 0.0) || !(lining_thickness > 0.0) || !(ring_width > 0.0) ||
        !(concrete_unit_weight > 0.0) || !(water_unit_weight > 0.0))
        throw ConfigError("estimate_ring_forces: all arguments must be > 0");
    if (lining_thickness >= external_diameter / 2.0)
        throw ConfigError("estimate_ring_forces: lining thickness exceeds the radius");

    const double outer = external_diameter / 2.0;
    const double inner = outer - lining_thickness;
    gravity = concrete_unit_weight * kPi * (outer * outer - inner * inner) * ring_width;
    floatage = water_unit_weight * kPi * outer * outer * ring_width;
}

} // namespace lining
