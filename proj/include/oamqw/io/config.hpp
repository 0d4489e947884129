#pragma once

#include "oamqw/two_photon.hpp"
#include "oamqw/walk.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace oamqw::io {

inline constexpr int schema_version = 1;

enum class Mode { single, two_photon };
enum class OutputFormat { csv, json };

std::string to_string(Mode m);

// A config field carrying more than one value (the sweep axis).
struct RangeSpec {
    std::string parameter;  // dotted JSON path, e.g. "walk.delta"
    std::vector<double> values;
};

struct ExperimentConfig {
    Mode mode = Mode::single;
    WalkConfig walk;
    std::array<Label, 2> inputs = default_two_photon_inputs;
    PolBasis basis = PolBasis::circular;
    std::vector<JointModel> models{JointModel::bosonic, JointModel::distinguishable,
                                   JointModel::classical};
    double gouy_d_over_zR = 0.0;
    bool radial_damping = false;
    bool correct_bias = false;
    double sigma_over_w0 = 1.0;
    std::string output_path = "results";
    OutputFormat format = OutputFormat::csv;

    std::optional<RangeSpec> range;
    nlohmann::json source;  // the validated document, for hashing and metadata
};

// Schema-validates and converts; every problem is reported as ConfigError.
// Unknown keys are rejected at every level.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

// One fully scalar config per value of the ranged parameter (or the config
// itself when nothing is ranged).
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& cfg);

// Accepts plain numbers and the strings "pi", "pi/2", "3*pi/4", "0.25*pi", ...
double parse_angle(const nlohmann::json& v, const std::string& where);

// FNV-1a 64 of the canonical (sorted-key, compact) JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& doc);

WalkHooks make_hooks(const ExperimentConfig& cfg);

}  // namespace oamqw::io
