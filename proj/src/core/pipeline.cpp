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

#include "curvsig/pipeline.hpp"

#include "curvsig/error.hpp"
#include "format.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace curvsig::pipeline {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ','))
        cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value)
{
    fail(ErrorCode::InvalidArgument, "invalid value '" + value + "' for config key '" + key + "'");
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    bad_value(key, v);
}

template <class T>
T parse_number(const std::string& key, const std::string& v)
{
    T out{};
    bool ok;
    if constexpr (std::is_floating_point_v<T>)
        ok = parse_double(v, out);
    else
        ok = parse_int(v, out);
    if (!ok)
        bad_value(key, v);
    return out;
}

const char* to_string(BackgroundMode m)
{
    switch (m) {
    case BackgroundMode::Auto: return "auto";
    case BackgroundMode::None: return "none";
    case BackgroundMode::Median: return "median";
    }
    return "auto";
}

constexpr const char* kConfigPrefix = "config.";

} // namespace

void PipelineConfig::validate() const
{
    if (resize != 0 && resize < 2)
        fail(ErrorCode::InvalidArgument, "resize must be 0 (native) or at least 2");
    if (!(threshold >= 0.0 && threshold <= 1.0))
        fail(ErrorCode::InvalidArgument, "threshold must lie in [0,1]");
    if (grid_size < frenet::kMinGridSize)
        fail(ErrorCode::InvalidArgument, "grid_size must be at least " + std::to_string(frenet::kMinGridSize));
    if (!(smoothing >= 0.0))
        fail(ErrorCode::InvalidArgument, "smoothing must be nonnegative");
    if (forest.n_trees < 1)
        fail(ErrorCode::InvalidArgument, "n_trees must be at least 1");
    if (forest.min_leaf < 1)
        fail(ErrorCode::InvalidArgument, "min_leaf must be at least 1");
}

void PipelineConfig::set(const std::string& key, const std::string& raw)
{
    const std::string v = trim(raw);
    if (key == "resize")
        resize = parse_number<int>(key, v);
    else if (key == "background") {
        if (v == "auto")
            background = BackgroundMode::Auto;
        else if (v == "none")
            background = BackgroundMode::None;
        else if (v == "median")
            background = BackgroundMode::Median;
        else
            bad_value(key, v);
    } else if (key == "threshold")
        threshold = parse_number<double>(key, v);
    else if (key == "binarize")
        binarize = parse_bool(key, v);
    else if (key == "grid_size")
        grid_size = parse_number<std::size_t>(key, v);
    else if (key == "smoothing")
        smoothing = parse_number<double>(key, v);
    else if (key == "channels") {
        if (v == "k1")
            channels = features::ChannelMode::K1;
        else if (v == "k1k2" || v == "k1+k2")
            channels = features::ChannelMode::K1K2;
        else
            bad_value(key, v);
    } else if (key == "exclude_boundary")
        exclude_boundary = parse_bool(key, v);
    else if (key == "n_trees")
        forest.n_trees = parse_number<std::size_t>(key, v);
    else if (key == "m_features")
        forest.m_features = parse_number<std::size_t>(key, v);
    else if (key == "min_leaf")
        forest.min_leaf = parse_number<std::size_t>(key, v);
    else if (key == "seed")
        forest.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "threads")
        forest.threads = parse_number<unsigned>(key, v);
    else
        fail(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
}

// Thread count is left out: it never changes results.
std::vector<std::pair<std::string, std::string>> PipelineConfig::entries() const
{
    return {
        {"resize", std::to_string(resize)},
        {"background", to_string(background)},
        {"threshold", format_double(threshold)},
        {"binarize", binarize ? "true" : "false"},
        {"grid_size", std::to_string(grid_size)},
        {"smoothing", format_double(smoothing)},
        {"channels", channels == features::ChannelMode::K1 ? "k1" : "k1k2"},
        {"exclude_boundary", exclude_boundary ? "true" : "false"},
        {"n_trees", std::to_string(forest.n_trees)},
        {"m_features", std::to_string(forest.m_features)},
        {"min_leaf", std::to_string(forest.min_leaf)},
        {"seed", std::to_string(forest.seed)},
    };
}

PipelineConfig PipelineConfig::from_entries(const std::vector<std::pair<std::string, std::string>>& entries)
{
    PipelineConfig c;
    for (const auto& [k, v] : entries)
        c.set(k, v);
    c.validate();
    return c;
}

nlohmann::json PipelineConfig::to_json() const
{
    nlohmann::json j = nlohmann::json::object();
    j["resize"] = resize;
    j["background"] = to_string(background);
    j["threshold"] = threshold;
    j["binarize"] = binarize;
    j["grid_size"] = grid_size;
    j["smoothing"] = smoothing;
    j["channels"] = channels == features::ChannelMode::K1 ? "k1" : "k1k2";
    j["exclude_boundary"] = exclude_boundary;
    j["n_trees"] = forest.n_trees;
    j["m_features"] = forest.m_features;
    j["min_leaf"] = forest.min_leaf;
    j["seed"] = forest.seed;
    return j;
}

Manifest Manifest::parse(const std::string& text, const fs::path& base_dir)
{
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> columns;

    auto resolve = [&](const std::string& p) {
        fs::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };

    Manifest m;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto cells = split_csv(t);
        if (columns.empty()) {
            for (std::size_t i = 0; i < cells.size(); ++i)
                columns[cells[i]] = i;
            if (!columns.count("video_path") || !columns.count("label"))
                fail(ErrorCode::Format, "manifest header must name video_path and label columns");
            continue;
        }
        auto cell = [&](const char* name) -> std::optional<std::string> {
            const auto it = columns.find(name);
            if (it == columns.end() || it->second >= cells.size() || cells[it->second].empty())
                return std::nullopt;
            return cells[it->second];
        };
        const auto video = cell("video_path");
        const auto label = cell("label");
        if (!video || !label)
            fail(ErrorCode::Format, "manifest line " + std::to_string(line_no) + ": video_path and label are required");
        ManifestEntry e;
        e.video = resolve(*video);
        e.label = *label;
        if (auto v = cell("mask_path"))
            e.mask = resolve(*v);
        if (auto v = cell("background_path"))
            e.background = resolve(*v);
        e.group = cell("group");
        m.entries.push_back(std::move(e));
    }
    if (columns.empty())
        fail(ErrorCode::Format, "manifest is empty");
    return m;
}

Manifest Manifest::load(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::Io, "cannot open manifest " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.parent_path());
}

Curve video_curve(const fs::path& video, const std::optional<fs::path>& mask, const std::optional<fs::path>& background,
                  const PipelineConfig& config)
{
    config.validate();
    const std::optional<int> resize = config.resize > 0 ? std::optional<int>(config.resize) : std::nullopt;
    auto frames = ingest::load_frames(video, resize);

    if (background) {
        frames = ingest::subtract_background(frames, ingest::load_grid(*background, resize), config.threshold,
                                             config.binarize);
    } else if (config.background == BackgroundMode::Median ||
               (config.background == BackgroundMode::Auto && frames.height() > 1)) {
        frames = ingest::subtract_background(frames, ingest::median_background(frames), config.threshold,
                                             config.binarize);
    }
    if (mask)
        frames = ingest::apply_masks(frames, ingest::load_masks(*mask, resize));
    return ingest::flatten(frames);
}

frenet::CurvatureSignature curve_signature(const Curve& curve, const PipelineConfig& config)
{
    config.validate();
    frenet::Options opts;
    opts.smoothing_sigma = config.smoothing;
    return frenet::frenet_curvatures(reparameterize(curve, config.grid_size), opts);
}

frenet::CurvatureSignature video_signature(const fs::path& video, const std::optional<fs::path>& mask,
                                           const std::optional<fs::path>& background, const PipelineConfig& config)
{
    return curve_signature(video_curve(video, mask, background, config), config);
}

std::string entry_group(const ManifestEntry& entry)
{
    if (entry.group)
        return *entry.group;
    const std::string stem = entry.video.filename().string();
    return stem.substr(0, stem.find('_'));
}

LabeledDataset build_dataset(const Manifest& manifest, const PipelineConfig& config)
{
    config.validate();
    if (manifest.entries.empty())
        fail(ErrorCode::InvalidArgument, "manifest has no entries");

    std::set<std::string> labels;
    for (const auto& e : manifest.entries)
        labels.insert(e.label);
    std::vector<std::string> class_names(labels.begin(), labels.end());

    const std::size_t n = manifest.entries.size();
    const std::size_t width = features::kStatsPerChannel * features::channel_count(config.channels);
    std::vector<std::optional<std::vector<double>>> rows(n);
    std::vector<std::string> errors(n);

    parallel_for(n, config.forest.threads, [&](std::size_t i) {
        const auto& e = manifest.entries[i];
        try {
            const auto sig = video_signature(e.video, e.mask, e.background, config);
            rows[i] = features::extract_features(sig, config.feature_options()).values;
        } catch (const std::exception& ex) {
            errors[i] = ex.what();
        }
    });

    LabeledDataset out;
    out.data.class_names = class_names;
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i])
            ok.push_back(i);
        else
            out.failures.push_back({manifest.entries[i].video.string(), errors[i]});
    }
    if (static_cast<double>(out.failures.size()) > kFailureBudget * static_cast<double>(n)) {
        std::string msg = std::to_string(out.failures.size()) + " of " + std::to_string(n) +
                          " videos failed (budget 10%):";
        for (const auto& f : out.failures)
            msg += "\n  " + f.path + ": " + f.message;
        fail(ErrorCode::InvalidArgument, msg);
    }

    out.data.features.resize(static_cast<Eigen::Index>(ok.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < ok.size(); ++r) {
        const auto& e = manifest.entries[ok[r]];
        out.data.features.row(static_cast<Eigen::Index>(r)) =
            Eigen::Map<const Eigen::RowVectorXd>(rows[ok[r]]->data(), static_cast<Eigen::Index>(width));
        out.data.labels.push_back(static_cast<int>(
            std::lower_bound(class_names.begin(), class_names.end(), e.label) - class_names.begin()));
        out.paths.push_back(e.video.string());
        out.groups.push_back(entry_group(e));
    }
    return out;
}

nlohmann::json metrics_json(const forest::Metrics& metrics, const std::vector<std::string>& class_names)
{
    nlohmann::json j;
    j["accuracy"] = metrics.accuracy;
    nlohmann::json recall = nlohmann::json::object();
    for (std::size_t c = 0; c < class_names.size(); ++c)
        recall[class_names[c]] = metrics.recall[c] ? nlohmann::json(*metrics.recall[c]) : nlohmann::json(nullptr);
    j["per_class_recall"] = recall;
    j["confusion_matrix"] = {{"classes", class_names}, {"rows_true_cols_predicted", metrics.confusion}};
    return j;
}

nlohmann::json cv_json(const forest::CrossValidation& cv, const std::vector<std::string>& class_names)
{
    nlohmann::json j;
    j["folds"] = cv.folds.size();
    j["mean_accuracy"] = cv.mean_accuracy;
    j["std_accuracy"] = cv.stddev_accuracy;
    std::vector<double> acc;
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < cv.folds.size(); ++i) {
        acc.push_back(cv.folds[i].accuracy);
        sizes.push_back(cv.test_rows[i].size());
    }
    j["fold_accuracies"] = acc;
    j["fold_sizes"] = sizes;
    j["confusion_matrix"] = {{"classes", class_names}, {"rows_true_cols_predicted", cv.confusion}};
    return j;
}

nlohmann::json dataset_summary_json(const LabeledDataset& data)
{
    nlohmann::json j;
    j["rows"] = data.data.rows();
    j["features"] = data.data.cols();
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& name : data.data.class_names)
        counts[name] = 0;
    for (int l : data.data.labels)
        counts[data.data.class_names[static_cast<std::size_t>(l)]] = counts[data.data.class_names[static_cast<std::size_t>(l)]].get<int>() + 1;
    j["class_counts"] = counts;
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : data.failures)
        failures.push_back({{"path", f.path}, {"error", f.message}});
    j["failures"] = failures;
    return j;
}

forest::ForestModel train_model(const forest::Dataset& data, const PipelineConfig& config)
{
    config.validate();
    auto model = forest::train(data, config.forest);
    for (const auto& [k, v] : config.entries())
        model.metadata.emplace_back(kConfigPrefix + k, v);
    return model;
}

PipelineConfig model_config(const forest::ForestModel& model)
{
    std::vector<std::pair<std::string, std::string>> entries;
    const std::string prefix = kConfigPrefix;
    for (const auto& [k, v] : model.metadata)
        if (k.compare(0, prefix.size(), prefix) == 0)
            entries.emplace_back(k.substr(prefix.size()), v);
    return PipelineConfig::from_entries(entries);
}

} // namespace curvsig::pipeline
