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

// curvsig command-line front end. Talks to the library only through the C API.

#include "curvsig/curvsig.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;

// Exit codes: 0 success, 1 input error, 2 internal error.
constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

struct CommandError {
    cs_status status;
    std::string message;
};

void check(cs_status status, const std::string& context)
{
    if (status != CS_OK)
        throw CommandError{status, context + ": " + cs_last_error()};
}

int exit_code(cs_status status)
{
    return status == CS_ERR_INTERNAL ? kExitInternal : kExitInput;
}

template <class T, void (*Destroy)(T*)>
struct Deleter {
    void operator()(T* p) const { Destroy(p); }
};
using Config = std::unique_ptr<cs_config, Deleter<cs_config, cs_config_destroy>>;
using Signature = std::unique_ptr<cs_signature, Deleter<cs_signature, cs_signature_destroy>>;
using Dataset = std::unique_ptr<cs_dataset, Deleter<cs_dataset, cs_dataset_destroy>>;
using Model = std::unique_ptr<cs_model, Deleter<cs_model, cs_model_destroy>>;
using Report = std::unique_ptr<cs_report, Deleter<cs_report, cs_report_destroy>>;

// Pipeline flags shared by the commands; unset flags keep library defaults.
struct ConfigFlags {
    std::optional<int> resize;
    std::optional<std::string> background;
    std::optional<double> threshold;
    bool binarize = false;
    std::optional<std::size_t> grid_size;
    std::optional<double> smoothing;
    std::optional<std::string> channels;
    bool exclude_boundary = false;
    std::optional<std::size_t> n_trees;
    std::optional<std::size_t> m_features;
    std::optional<std::size_t> min_leaf;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::vector<std::string> extra;

    void add_to(CLI::App* cmd, bool with_forest)
    {
        cmd->add_option("--resize", resize, "Resize frames to d x d (0 keeps native size; default 64)");
        cmd->add_option("--background", background, "Background model: auto, none or median")
            ->check(CLI::IsMember({"auto", "none", "median"}));
        cmd->add_option("--threshold", threshold, "Background difference threshold in [0,1] (default 0.1)");
        cmd->add_flag("--binarize", binarize, "Binarize foreground instead of keeping grayscale");
        cmd->add_option("--grid-size", grid_size, "Arclength grid size N (default 128)");
        cmd->add_option("--smoothing", smoothing, "Gaussian pre-smoothing sigma in samples (default 0)");
        cmd->add_option("--channels", channels, "Feature channels: k1 or k1k2 (default k1k2)")
            ->check(CLI::IsMember({"k1", "k1k2"}));
        cmd->add_flag("--exclude-boundary", exclude_boundary, "Drop two samples at each end from statistics");
        if (with_forest) {
            cmd->add_option("--trees", n_trees, "Number of trees (default 100)");
            cmd->add_option("--m-features", m_features, "Features tried per node (0 = round(sqrt F))");
            cmd->add_option("--min-leaf", min_leaf, "Minimum samples per leaf (default 1)");
            cmd->add_option("--seed", seed, "Random seed (default 42)");
        }
        cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
        cmd->add_option("--set", extra, "Raw config override key=value (repeatable)");
    }

    void apply(cs_config* cfg) const
    {
        auto set = [&](const char* key, const std::string& value) {
            check(cs_config_set(cfg, key, value.c_str()), std::string("--") + key);
        };
        if (resize) set("resize", std::to_string(*resize));
        if (background) set("background", *background);
        if (threshold) set("threshold", std::to_string(*threshold));
        if (binarize) set("binarize", "true");
        if (grid_size) set("grid_size", std::to_string(*grid_size));
        if (smoothing) set("smoothing", std::to_string(*smoothing));
        if (channels) set("channels", *channels);
        if (exclude_boundary) set("exclude_boundary", "true");
        if (n_trees) set("n_trees", std::to_string(*n_trees));
        if (m_features) set("m_features", std::to_string(*m_features));
        if (min_leaf) set("min_leaf", std::to_string(*min_leaf));
        if (seed) set("seed", std::to_string(*seed));
        if (threads) set("threads", std::to_string(*threads));
        for (const auto& kv : extra) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw CommandError{CS_ERR_INVALID_ARGUMENT, "--set expects key=value, got '" + kv + "'"};
            set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
        }
    }

    Config make() const
    {
        cs_config* raw = nullptr;
        check(cs_config_create(&raw), "config");
        Config cfg(raw);
        apply(cfg.get());
        return cfg;
    }
};

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw CommandError{CS_ERR_IO, "cannot write " + path};
}

void emit_json(const json& j, const std::string& path)
{
    const std::string text = j.dump(2) + "\n";
    if (path.empty())
        std::cout << text;
    else
        write_file(path, text);
}

const char* nullable(const std::string& s)
{
    return s.empty() ? nullptr : s.c_str();
}

Dataset load_dataset(const cs_config* cfg, const std::string& manifest)
{
    cs_dataset* raw = nullptr;
    check(cs_dataset_from_manifest(cfg, manifest.c_str(), &raw), manifest);
    Dataset data(raw);
    for (std::size_t i = 0; i < cs_dataset_failure_count(data.get()); ++i)
        std::cerr << "warning: " << cs_dataset_failure_path(data.get(), i) << ": "
                  << cs_dataset_failure_message(data.get(), i) << '\n';
    return data;
}

json cross_validation(const cs_dataset* data, const cs_config* cfg, std::size_t folds, bool loso)
{
    json out = json::object();
    if (folds > 0) {
        cs_report* raw = nullptr;
        check(cs_cross_validate(data, cfg, folds, &raw), "cross-validation");
        out["kfold"] = json::parse(cs_report_json(Report(raw).get()));
    }
    if (loso) {
        cs_report* raw = nullptr;
        check(cs_cross_validate_groups(data, cfg, &raw), "leave-one-group-out");
        out["leave_one_group_out"] = json::parse(cs_report_json(Report(raw).get()));
    }
    return out;
}

// ---- commands ----------------------------------------------------------------

struct SignatureArgs {
    ConfigFlags flags;
    std::string video, mask, background, output, crv_output;
};

int run_signature(const SignatureArgs& a)
{
    const Config cfg = a.flags.make();
    cs_signature* raw = nullptr;
    check(cs_signature_from_video(cfg.get(), a.video.c_str(), nullable(a.mask), nullable(a.background), &raw),
          a.video);
    const Signature sig(raw);
    if (a.output.empty() || a.output == "-") {
        std::cout << cs_signature_csv(sig.get());
    } else {
        check(cs_signature_write_csv(sig.get(), a.output.c_str()), a.output);
        json meta = {
            {"command", "signature"},
            {"video", a.video},
            {"mask", a.mask.empty() ? json(nullptr) : json(a.mask)},
            {"background", a.background.empty() ? json(nullptr) : json(a.background)},
            {"config", json::parse(cs_config_json(cfg.get()))},
            {"grid_size", cs_signature_size(sig.get())},
            {"total_length", cs_signature_total_length(sig.get())},
            {"arc_step", cs_signature_arc_step(sig.get())},
        };
        write_file(a.output + ".meta.json", meta.dump(2) + "\n");
    }
    if (!a.crv_output.empty())
        check(cs_signature_write_crv(sig.get(), a.crv_output.c_str()), a.crv_output);
    return 0;
}

struct TrainArgs {
    ConfigFlags flags;
    std::string manifest, model_out, report, features_out;
    std::size_t folds = 0;
    bool loso = false;
};

int run_train(const TrainArgs& a)
{
    const Config cfg = a.flags.make();
    const Dataset data = load_dataset(cfg.get(), a.manifest);
    if (cs_dataset_class_count(data.get()) < 2)
        throw CommandError{CS_ERR_INVALID_ARGUMENT, a.manifest + ": training needs at least 2 classes"};
    if (!a.features_out.empty())
        check(cs_dataset_write_features_csv(data.get(), a.features_out.c_str()), a.features_out);

    cs_model* raw = nullptr;
    check(cs_model_train(data.get(), cfg.get(), &raw), "training");
    const Model model(raw);
    check(cs_model_save(model.get(), a.model_out.c_str()), a.model_out);

    json report = {
        {"command", "train"},
        {"manifest", a.manifest},
        {"model", a.model_out},
        {"config", json::parse(cs_config_json(cfg.get()))},
        {"dataset", json::parse(cs_dataset_summary_json(data.get()))},
    };
    const json cv = cross_validation(data.get(), cfg.get(), a.folds, a.loso);
    if (!cv.empty())
        report["cross_validation"] = cv;
    emit_json(report, a.report);
    return 0;
}

struct PredictArgs {
    std::string model_path, output, mask, background;
    std::vector<std::string> videos;
    bool votes = false;
};

int run_predict(const PredictArgs& a)
{
    cs_model* raw = nullptr;
    check(cs_model_load(a.model_path.c_str(), &raw), a.model_path);
    const Model model(raw);
    const std::size_t k = cs_model_class_count(model.get());

    std::string out = "video,status,label";
    if (a.votes)
        for (std::size_t c = 0; c < k; ++c)
            out += std::string(",vote_") + cs_model_class_name(model.get(), c);
    out += '\n';

    bool any_failed = false;
    std::vector<double> votes(k);
    for (const auto& video : a.videos) {
        std::size_t label = 0;
        const cs_status st = cs_model_predict_video(model.get(), video.c_str(), nullable(a.mask),
                                                    nullable(a.background), &label, votes.data());
        if (st != CS_OK) {
            any_failed = true;
            std::cerr << "error: " << video << ": " << cs_last_error() << '\n';
            out += video + ",error,";
            if (a.votes)
                out += std::string(k, ',');
            out += '\n';
            continue;
        }
        out += video + ",ok," + cs_model_class_name(model.get(), label);
        if (a.votes)
            for (double v : votes) {
                char buf[32];
                const auto r = std::to_chars(buf, buf + sizeof buf, v);
                out += ',';
                out.append(buf, r.ptr);
            }
        out += '\n';
    }
    if (a.output.empty() || a.output == "-")
        std::cout << out;
    else
        write_file(a.output, out);
    return any_failed ? kExitInput : 0;
}

struct EvalArgs {
    ConfigFlags flags;
    std::string model_path, manifest, report;
    std::size_t folds = 0;
    bool loso = false;
};

int run_eval(const EvalArgs& a)
{
    cs_model* raw_model = nullptr;
    check(cs_model_load(a.model_path.c_str(), &raw_model), a.model_path);
    const Model model(raw_model);
    cs_config* raw_cfg = nullptr;
    check(cs_model_config(model.get(), &raw_cfg), a.model_path);
    const Config cfg(raw_cfg);
    // Only execution flags (threads, --set) are meaningful on top of the model's config.
    a.flags.apply(cfg.get());

    const Dataset data = load_dataset(cfg.get(), a.manifest);
    json report = {
        {"command", "eval"},
        {"manifest", a.manifest},
        {"model", a.model_path},
        {"config", json::parse(cs_config_json(cfg.get()))},
        {"dataset", json::parse(cs_dataset_summary_json(data.get()))},
    };
    if (a.folds == 0 && !a.loso) {
        cs_report* raw = nullptr;
        check(cs_model_evaluate(model.get(), data.get(), &raw), "evaluation");
        report["evaluation"] = json::parse(cs_report_json(Report(raw).get()));
    } else {
        report["cross_validation"] = cross_validation(data.get(), cfg.get(), a.folds, a.loso);
    }
    emit_json(report, a.report);
    return 0;
}

struct SynthArgs {
    std::string kind, output;
    std::size_t per_class = 20;
    std::uint64_t seed = 7;
    double noise = 0.01;
};

int run_synth(const SynthArgs& a)
{
    check(cs_synth_write(a.kind.c_str(), a.output.c_str(), a.per_class, a.seed, a.noise), a.output);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"curvsig: curvature signatures of frame sequences and action classification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cs_version());

    SignatureArgs sig;
    auto* sig_cmd = app.add_subcommand("signature", "Compute the k1/k2 curvature signature of one video");
    sig_cmd->add_option("video", sig.video, "Image directory or CRV file")->required();
    sig_cmd->add_option("--mask", sig.mask, "Mask directory or CRV file");
    sig_cmd->add_option("--background-image", sig.background, "Explicit background image or single-frame CRV");
    sig_cmd->add_option("-o,--output", sig.output, "CSV output (default stdout)");
    sig_cmd->add_option("--crv", sig.crv_output, "Also write the signature as CRV (H=1, W=2)");
    sig.flags.add_to(sig_cmd, false);

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train a random forest from a manifest");
    train_cmd->add_option("manifest", train.manifest, "Manifest CSV")->required();
    train_cmd->add_option("-o,--model", train.model_out, "Model output path")->required();
    train_cmd->add_option("--report", train.report, "Report JSON path (default stdout)");
    train_cmd->add_option("--features-out", train.features_out, "Write the feature table as CSV");
    train_cmd->add_option("--folds", train.folds, "Also report stratified k-fold CV accuracy");
    train_cmd->add_flag("--loso", train.loso, "Also report leave-one-subject-out CV accuracy");
    train.flags.add_to(train_cmd, true);

    PredictArgs predict;
    auto* predict_cmd = app.add_subcommand("predict", "Classify videos with a trained model");
    predict_cmd->add_option("model", predict.model_path, "Model file")->required();
    predict_cmd->add_option("videos", predict.videos, "Videos to classify")->required();
    predict_cmd->add_flag("--votes", predict.votes, "Emit the per-class vote distribution");
    predict_cmd->add_option("--mask", predict.mask, "Mask applied to every video");
    predict_cmd->add_option("--background-image", predict.background, "Background applied to every video");
    predict_cmd->add_option("-o,--output", predict.output, "CSV output (default stdout)");

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a manifest, or cross-validate its config");
    eval_cmd->add_option("model", eval.model_path, "Model file")->required();
    eval_cmd->add_option("manifest", eval.manifest, "Manifest CSV")->required();
    eval_cmd->add_option("--folds", eval.folds, "Retrain with stratified k-fold CV instead");
    eval_cmd->add_flag("--loso", eval.loso, "Retrain with leave-one-subject-out CV instead");
    eval_cmd->add_option("--report", eval.report, "Report JSON path (default stdout)");
    eval_cmd->add_option("--threads", eval.flags.threads, "Worker threads (0 = all cores)");

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write built-in synthetic data");
    synth_cmd->add_option("kind", synth.kind, "classes, helix, circle, blob or blob_flipped")
        ->required()
        ->check(CLI::IsMember({"classes", "helix", "circle", "blob", "blob_flipped"}));
    synth_cmd->add_option("output", synth.output, "Output directory (classes) or CRV file")->required();
    synth_cmd->add_option("--per-class", synth.per_class, "Samples per class (classes only)");
    synth_cmd->add_option("--seed", synth.seed, "Random seed");
    synth_cmd->add_option("--noise", synth.noise, "Relative noise level (classes only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*sig_cmd)
            return run_signature(sig);
        if (*train_cmd)
            return run_train(train);
        if (*predict_cmd)
            return run_predict(predict);
        if (*eval_cmd)
            return run_eval(eval);
        if (*synth_cmd)
            return run_synth(synth);
    } catch (const CommandError& e) {
        std::cerr << "error: " << e.message << '\n';
        return exit_code(e.status);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInternal;
    }
    return 0;
}
