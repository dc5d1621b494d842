#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lining/factorization.hpp"
#include "lining/mechanics.hpp"

namespace lining {

struct SearchConfig {
    std::vector<double> lambda1_grid;
    std::vector<double> lambda2_grid;
    int folds = 5;
};

/// Everything one monitoring section needs: geometry, load model inputs,
/// sensor layout, training and search settings.
struct SectionConfig {
    std::string section_id;
    TunnelGrid grid;
    SectionProfile profile;
    SensorLayout layout;
    TrainConfig train;
    SearchConfig search;
    std::optional<double> warning_threshold;
    std::optional<std::filesystem::path> readings_path; // resolved against the config dir
    std::vector<std::string> warnings; // defaults applied while loading
};

/// Parses and eagerly validates a section config. Error messages name the
/// offending field and the expected range.
SectionConfig load_config(const std::filesystem::path& path);

} // namespace lining
