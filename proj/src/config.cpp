#include "lining/config.hpp"

#include <fstream>

#include <json.hpp>

namespace lining {

namespace {

using nlohmann::json;

const json& require(const json& node, const char* key, const std::string& where) {
    if (!node.contains(key))
        throw ConfigError("config: missing field '" + where + key + "'");
    return node.at(key);
}

double require_number(const json& node, const char* key, const std::string& where) {
    const json& v = require(node, key, where);
    if (!v.is_number())
        throw ConfigError("config: '" + where + key + "' must be a number");
    return v.get<double>();
}

int require_int(const json& node, const char* key, const std::string& where) {
    const json& v = require(node, key, where);
    if (!v.is_number_integer())
        throw ConfigError("config: '" + where + key + "' must be an integer");
    return v.get<int>();
}

std::string require_string(const json& node, const char* key, const std::string& where) {
    const json& v = require(node, key, where);
    if (!v.is_string())
        throw ConfigError("config: '" + where + key + "' must be a string");
    return v.get<std::string>();
}

GroundLayer parse_ground_layer(const json& node, const std::string& where) {
    GroundLayer layer;
    layer.name = require_string(node, "name", where);
    layer.thickness = require_number(node, "thickness", where);
    layer.unit_weight = require_number(node, "unit_weight", where);
    layer.lateral_coefficient = require_number(node, "lateral_coefficient", where);
    return layer;
}

void parse_train(const json& node, TrainConfig& train, std::vector<std::string>& warnings) {
    if (node.contains("rank"))
        train.rank = require_int(node, "rank", "train.");
    if (node.contains("lambda1"))
        train.lambda1 = require_number(node, "lambda1", "train.");
    if (node.contains("lambda2"))
        train.lambda2 = require_number(node, "lambda2", "train.");
    if (node.contains("learning_rate"))
        train.learning_rate = require_number(node, "learning_rate", "train.");
    if (node.contains("max_epochs"))
        train.max_epochs = require_int(node, "max_epochs", "train.");
    if (node.contains("patience"))
        train.patience = require_int(node, "patience", "train.");
    if (node.contains("val_fraction"))
        train.val_fraction = require_number(node, "val_fraction", "train.");
    if (node.contains("seed"))
        train.seed = node.at("seed").get<std::uint64_t>();
    if (node.contains("wrap"))
        train.wrap = node.at("wrap").get<bool>();
    if (node.contains("shift")) {
        const json& shift = node.at("shift");
        if (shift.is_string()) {
            const std::string s = shift.get<std::string>();
            if (s == "auto")
                train.shift_policy = ShiftPolicy::automatic;
            else if (s == "off")
                train.shift_policy = ShiftPolicy::off;
            else
                throw ConfigError("config: 'train.shift' must be \"auto\", \"off\" or "
                                  "{\"fixed\": offset}");
        } else if (shift.is_object() && shift.contains("fixed")) {
            train.shift_policy = ShiftPolicy::fixed;
            train.shift_offset = shift.at("fixed").get<double>();
        } else {
            throw ConfigError("config: 'train.shift' must be \"auto\", \"off\" or "
                              "{\"fixed\": offset}");
        }
    }
    (void)warnings;
    train.validate();
}

} // namespace

SectionConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");

    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in '" + path.string() + "': " + e.what());
    }

    SectionConfig cfg;
    cfg.section_id = require_string(root, "section_id", "");

    // profile (carries the diameter shared with the grid)
    const json& jp = require(root, "profile", "");
    cfg.profile.external_diameter = require_number(jp, "external_diameter", "profile.");
    cfg.profile.water_head = require_number(jp, "water_head", "profile.");
    if (jp.contains("water_unit_weight")) {
        cfg.profile.water_unit_weight = require_number(jp, "water_unit_weight", "profile.");
    } else {
        cfg.profile.water_unit_weight = 9.81;
        cfg.warnings.push_back("profile.water_unit_weight not given; defaulting to 9.81 kN/m^3");
    }

    const json& jr = require(jp, "ring", "profile.");
    if (jr.contains("gravity") || jr.contains("floatage")) {
        cfg.profile.ring_gravity = require_number(jr, "gravity", "profile.ring.");
        cfg.profile.ring_floatage = require_number(jr, "floatage", "profile.ring.");
    } else {
        const double t = require_number(jr, "thickness", "profile.ring.");
        const double w = require_number(jr, "width", "profile.ring.");
        const double gamma_c = require_number(jr, "concrete_unit_weight", "profile.ring.");
        estimate_ring_forces(cfg.profile.external_diameter, t, w, gamma_c,
                             cfg.profile.water_unit_weight, cfg.profile.ring_gravity,
                             cfg.profile.ring_floatage);
        cfg.warnings.push_back("profile.ring gravity/floatage derived from lining geometry");
    }

    const json& jo = require(jp, "overburden", "profile.");
    if (!jo.is_array() || jo.empty())
        throw ConfigError("config: 'profile.overburden' must be a non-empty array");
    for (std::size_t i = 0; i < jo.size(); ++i)
        cfg.profile.overburden.push_back(
            parse_ground_layer(jo.at(i), "profile.overburden[" + std::to_string(i) + "]."));
    cfg.profile.host_layer = parse_ground_layer(require(jp, "host_layer", "profile."),
                                                "profile.host_layer.");
    cfg.profile.validate();

    // grid
    const json& jg = require(root, "grid", "");
    cfg.grid.layers = require_int(jg, "layers", "grid.");
    cfg.grid.parts = require_int(jg, "parts", "grid.");
    cfg.grid.external_diameter = cfg.profile.external_diameter;
    cfg.grid.validate();

    // layout
    const json& jl = require(root, "layout", "");
    if (!jl.is_array() || jl.empty())
        throw ConfigError("config: 'layout' must be a non-empty array");
    cfg.layout.section_id = cfg.section_id;
    for (std::size_t i = 0; i < jl.size(); ++i) {
        const std::string where = "layout[" + std::to_string(i) + "].";
        const json& je = jl.at(i);
        SensorEntry entry;
        entry.sensor_id = require_string(je, "sensor", where);
        entry.cell.layer = require_int(je, "layer", where);
        entry.cell.part = require_int(je, "part", where);
        cfg.layout.entries.push_back(entry);
    }
    cfg.layout.validate(cfg.grid);

    // train
    if (root.contains("train"))
        parse_train(root.at("train"), cfg.train, cfg.warnings);
    else
        cfg.train.validate();
    if (cfg.train.rank > std::min(cfg.grid.layers, cfg.grid.parts))
        throw ConfigError("config: 'train.rank' exceeds min(grid.layers, grid.parts)");

    // search
    if (root.contains("search")) {
        const json& js = root.at("search");
        if (js.contains("lambda1_grid"))
            cfg.search.lambda1_grid = js.at("lambda1_grid").get<std::vector<double>>();
        if (js.contains("lambda2_grid"))
            cfg.search.lambda2_grid = js.at("lambda2_grid").get<std::vector<double>>();
        if (js.contains("folds"))
            cfg.search.folds = require_int(js, "folds", "search.");
        if (cfg.search.folds < 1)
            throw ConfigError("config: 'search.folds' must be >= 1");
    }
    if (cfg.search.lambda1_grid.empty())
        for (int i = 1; i <= 10; ++i)
            cfg.search.lambda1_grid.push_back(i / 10.0);
    if (cfg.search.lambda2_grid.empty())
        for (int i = 1; i <= 10; ++i)
            cfg.search.lambda2_grid.push_back(i / 10.0);

    if (root.contains("warning_threshold")) {
        cfg.warning_threshold = root.at("warning_threshold").get<double>();
        if (!(*cfg.warning_threshold > 0.0))
            throw ConfigError("config: 'warning_threshold' must be > 0");
    }

    if (root.contains("readings")) {
        const std::filesystem::path rel = require_string(root, "readings", "");
        std::filesystem::path resolved = rel.is_absolute() ? rel : path.parent_path() / rel;
        if (!std::filesystem::exists(resolved))
            throw ConfigError("config: readings file '" + resolved.string() + "' does not exist");
        cfg.readings_path = resolved;
    }

    return cfg;
}

} // namespace lining
