#pragma once

#include <filesystem>
#include <string>

#include "lining/deduce.hpp"

namespace lining {

/// Renders an annular heatmap of the deduced face: M concentric bands by N
/// angular cells with the crown at the top and parts running clockwise, the
/// way cell_angle lays them out. Observed cells get a heavy outline. A
/// flattened rectangular view and a color legend sit below the ring.
/// Output bytes are a pure function of the result.
void render_heatmap(const DeductionResult& result, const std::filesystem::path& path);

/// The SVG document as a string (what render_heatmap writes).
std::string heatmap_svg(const DeductionResult& result);

} // namespace lining
