#pragma once

#include "oamqw/analysis.hpp"
#include "oamqw/io/config.hpp"
#include "oamqw/two_photon.hpp"
#include "oamqw/walk.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oamqw::io {

inline constexpr const char* version = "0.1.0";

struct ModelResult {
    JointModel model = JointModel::bosonic;
    JointDistribution pre;
    JointDistribution post;
    OamJoint oam;
    ViolationReport classical;
    ViolationReport distinguishable;
};

struct ModelComparison {
    JointModel a = JointModel::bosonic;
    JointModel b = JointModel::bosonic;
    double similarity = 0.0;
    double total_variation = 0.0;
};

struct ResultBundle {
    ExperimentConfig config;

    // Single-photon runs.
    std::optional<OamDistribution> distribution;
    std::vector<OamDistribution> intermediate;
    std::map<int, double> efficiency;             // filled when correct_bias is on
    std::optional<OamDistribution> detected_raw;  // as seen through the biased detector
    std::optional<OamDistribution> detected_corrected;

    // Two-photon runs.
    std::vector<ModelResult> models;
    std::vector<ModelComparison> comparisons;
};

// Computes everything the config asks for. A config with a multi-valued range
// is rejected (use sweep).
ResultBundle compute(const ExperimentConfig& cfg);

// Numeric payload files by name; content depends only on the config.
std::map<std::string, std::string> render_payloads(const ResultBundle& b);

// metadata.json: config, hash, version and generation time.
std::string render_metadata(const ResultBundle& b);

// Writes payloads and metadata into `dir`.
void write_bundle(const ResultBundle& b, const std::filesystem::path& dir);

// Load, validate, compute and write. `out_dir` and `format` override the config.
ResultBundle run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct SweepResult {
    std::vector<ResultBundle> points;
    std::string summary_csv;
};

// One bundle per grid point in `out_dir/point_NNN`, plus `out_dir/summary.csv`.
// Points are computed concurrently.
SweepResult sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

std::string sweep_summary_csv(const std::vector<ResultBundle>& points);

}  // namespace oamqw::io
