// Copyright 2026 The Curvsig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CURVSIG_PIPELINE_HPP
#define CURVSIG_PIPELINE_HPP

#include "curvsig/curve.hpp"
#include "curvsig/features.hpp"
#include "curvsig/forest.hpp"
#include "curvsig/frenet.hpp"
#include "curvsig/ingest.hpp"

#include "json.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace curvsig::pipeline {

enum class BackgroundMode {
    Auto,   // median for image data (H > 1), none for series (H = 1)
    None,
    Median,
};

/// Every knob of the video -> signature -> features -> forest chain. The
/// key/value form (entries()/set()) is what the CLI flags, the C API and the
/// model file all use.
struct PipelineConfig {
    int resize = ingest::kDefaultResize; // 0 keeps the native size
    BackgroundMode background = BackgroundMode::Auto;
    double threshold = ingest::kDefaultThreshold;
    bool binarize = false;
    std::size_t grid_size = kDefaultGridSize;
    double smoothing = 0.0;
    features::ChannelMode channels = features::ChannelMode::K1K2;
    bool exclude_boundary = false;
    forest::Params forest;

    void validate() const;
    /// Sets one key from its string form; throws on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    std::vector<std::pair<std::string, std::string>> entries() const;
    static PipelineConfig from_entries(const std::vector<std::pair<std::string, std::string>>& entries);
    nlohmann::json to_json() const;

    features::Options feature_options() const { return {channels, exclude_boundary}; }
};

struct ManifestEntry {
    std::filesystem::path video;
    std::string label;
    std::optional<std::filesystem::path> mask;
    std::optional<std::filesystem::path> background;
    std::optional<std::string> group;
};

/// CSV with a header naming its columns: video_path and label are required;
/// mask_path, background_path and group are optional. Relative paths resolve
/// against the manifest's directory. Blank lines and '#' lines are skipped.
struct Manifest {
    std::vector<ManifestEntry> entries;

    static Manifest parse(const std::string& text, const std::filesystem::path& base_dir);
    static Manifest load(const std::filesystem::path& path);
};

/// Frames -> background -> masks -> curve.
Curve video_curve(const std::filesystem::path& video, const std::optional<std::filesystem::path>& mask,
                  const std::optional<std::filesystem::path>& background, const PipelineConfig& config);

/// Curve -> reparameterization -> (smoothing) -> curvatures.
frenet::CurvatureSignature curve_signature(const Curve& curve, const PipelineConfig& config);

frenet::CurvatureSignature video_signature(const std::filesystem::path& video,
                                           const std::optional<std::filesystem::path>& mask,
                                           const std::optional<std::filesystem::path>& background,
                                           const PipelineConfig& config);

inline constexpr double kFailureBudget = 0.10;

struct Failure {
    std::string path;
    std::string message;
};

struct LabeledDataset {
    forest::Dataset data;
    std::vector<std::string> paths;
    std::vector<std::string> groups;
    std::vector<Failure> failures;
};

/// Runs every manifest entry through the pipeline in parallel. Classes are
/// the sorted distinct labels. Rows keep manifest order; failed rows are
/// dropped and reported. Throws when more than 10% of the entries fail.
LabeledDataset build_dataset(const Manifest& manifest, const PipelineConfig& config);

/// Group of an entry: its group column, else the video file name up to the
/// first '_' (Weizmann naming: "daria_bend").
std::string entry_group(const ManifestEntry& entry);

nlohmann::json metrics_json(const forest::Metrics& metrics, const std::vector<std::string>& class_names);
nlohmann::json cv_json(const forest::CrossValidation& cv, const std::vector<std::string>& class_names);
nlohmann::json dataset_summary_json(const LabeledDataset& data);

/// Model metadata carries the config as "config.<key>" entries.
forest::ForestModel train_model(const forest::Dataset& data, const PipelineConfig& config);
PipelineConfig model_config(const forest::ForestModel& model);

} // namespace curvsig::pipeline

#endif // CURVSIG_PIPELINE_HPP
