#pragma once

#include <string>
#include <vector>

#include "lining/geometry.hpp"

namespace lining {

/// One stratum of the overburden column.
struct GroundLayer {
    std::string name;
    double thickness = 0.0;           // h_j, meters
    double unit_weight = 0.0;         // gamma_j, kN/m^3
    double lateral_coefficient = 0.0; // lambda_j, dimensionless

    void validate() const;
};

/// Everything the external-load model needs for one monitoring section.
struct SectionProfile {
    double water_head = 0.0;        // h, meters of water above the crown
    double water_unit_weight = 9.81; // gamma_w, kN/m^3
    double external_diameter = 0.0; // d, meters
    double ring_gravity = 0.0;      // G, kN
    double ring_floatage = 0.0;     // F, kN
    std::vector<GroundLayer> overburden; // ordered surface -> tunnel
    GroundLayer host_layer;         // stratum containing the tunnel

    void validate() const;
};

/// Effective soil pressures at one height on the ring.
struct SoilPressures {
    double overburden = 0.0; // F_u, kN/m^2, independent of y
    double bottom = 0.0;     // F_b, kN/m^2, independent of y
    double lateral = 0.0;    // F_s, kN/m^2, depends on y
    /// Names of layers whose unit weight does not exceed the water's.
    std::vector<std::string> buoyant_layers;
};

/// External-load resultants per grid column plus the adjacency weights
/// derived from the tangential magnitudes.
struct LoadField {
    std::vector<double> radial;     // F_r per column, length N
    std::vector<double> tangential; // F_tau per column, length N
    std::vector<double> q_weights;  // Q per adjacent pair (n, n+1), length N-1
};

/// Hydrostatic pressure at the crown: gamma_w * h.
double water_pressure(const SectionProfile& profile);

/// Overburden, bottom and lateral soil pressures at signed height y above
/// the section center (|y| <= d/2, positive towards the crown).
SoilPressures soil_pressures(const SectionProfile& profile, double y);

/// Radial and tangential resultants at angular distance psi from the crown,
/// psi in [0, pi]. The upper-semicircle formulas apply for psi <= pi/2
/// (theta = pi/2 - psi), the lower-semicircle ones otherwise
/// (theta = psi - pi/2); psi == pi/2 exactly takes the upper branch.
void resultants_at(const SectionProfile& profile, double psi, double& radial, double& tangential);

/// Resultants for every column of the grid. q_weights is left empty;
/// call adjacency_weights to fill it.
LoadField resultants(const SectionProfile& profile, const TunnelGrid& grid);

/// Similarity weight of adjacent tangential magnitudes:
/// Q = 1 - (max - min)/max over |F_tau| of the pair, in [0, 1].
/// When both magnitudes are below 1e-12 the pair counts as maximally
/// similar and Q = 1.
std::vector<double> adjacency_weights(const LoadField& load, bool wrap = false);

/// Convenience: resultants plus adjacency weights in one LoadField.
LoadField compute_load_field(const SectionProfile& profile, const TunnelGrid& grid);

/// Ring gravity and floatage from lining geometry, for configs that give
/// thickness/width instead of forces:
///   G = gamma_concrete * pi * ((d/2)^2 - (d/2 - t)^2) * w
///   F = gamma_w * pi * (d/2)^2 * w
void estimate_ring_forces(double external_diameter, double lining_thickness, double ring_width,
                          double concrete_unit_weight, double water_unit_weight, double& gravity,
                          double& floatage);

} // namespace lining
