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

#include "curvsig/curvsig.h"

#include "curvsig/crv.hpp"
#include "curvsig/error.hpp"
#include "curvsig/pipeline.hpp"
#include "curvsig/synth.hpp"

#include <fstream>
#include <new>
#include <sstream>
#include <string>

using namespace curvsig;

struct cs_config {
    pipeline::PipelineConfig config;
    std::string json;
    std::string value;
};

struct cs_signature {
    frenet::CurvatureSignature sig;
    std::string csv;
};

struct cs_dataset {
    pipeline::LabeledDataset data;
    std::string summary;
};

struct cs_model {
    forest::ForestModel model;
    std::string text;
};

struct cs_report {
    double accuracy = 0.0;
    std::string json;
};

namespace {

thread_local std::string g_last_error;

cs_status to_status(ErrorCode code)
{
    return static_cast<cs_status>(static_cast<int>(code));
}

cs_status set_error(cs_status status, std::string message)
{
    g_last_error = std::move(message);
    return status;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
cs_status guarded(Fn&& fn) noexcept
{
    try {
        fn();
        return CS_OK;
    } catch (const Error& e) {
        return set_error(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(CS_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(CS_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(CS_ERR_INTERNAL, "unknown exception");
    }
}

void require(bool ok, const char* what)
{
    if (!ok)
        fail(ErrorCode::InvalidArgument, what);
}

std::optional<std::filesystem::path> opt_path(const char* p)
{
    if (!p || !*p)
        return std::nullopt;
    return std::filesystem::path(p);
}

void write_text(const char* path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorCode::Io, std::string("cannot open ") + path + " for writing");
    out << text;
    if (!out)
        fail(ErrorCode::Io, std::string("failed writing ") + path);
}

void copy_votes(const forest::Prediction& p, size_t* label, double* votes)
{
    if (label)
        *label = static_cast<size_t>(p.label);
    if (votes)
        std::copy(p.votes.begin(), p.votes.end(), votes);
}

crv::Tensor series_tensor(const Matrix& m, std::uint32_t height, std::uint32_t width)
{
    crv::Tensor t;
    t.frames = static_cast<std::uint32_t>(m.rows());
    t.height = height;
    t.width = width;
    for (Eigen::Index i = 0; i < m.size(); ++i)
        t.values.push_back(static_cast<float>(m.data()[i]));
    return t;
}

crv::Tensor video_tensor(const ingest::FrameSequence& seq)
{
    const auto curve = ingest::flatten(seq);
    return series_tensor(curve.samples(), static_cast<std::uint32_t>(seq.height()),
                         static_cast<std::uint32_t>(seq.width()));
}

} // namespace

extern "C" {

const char* cs_version(void)
{
    return "0.1.0";
}

const char* cs_last_error(void)
{
    return g_last_error.c_str();
}

const char* cs_status_name(cs_status status)
{
    if (status == CS_OK)
        return "ok";
    if (status >= CS_ERR_INVALID_ARGUMENT && status <= CS_ERR_INTERNAL)
        return to_string(static_cast<ErrorCode>(status));
    return "unknown status";
}

// ---- configuration ---------------------------------------------------------

cs_status cs_config_create(cs_config** out)
{
    return guarded([&] {
        require(out, "out is null");
        *out = new cs_config();
    });
}

void cs_config_destroy(cs_config* config)
{
    delete config;
}

cs_status cs_config_set(cs_config* config, const char* key, const char* value)
{
    return guarded([&] {
        require(config && key && value, "config, key and value are required");
        pipeline::PipelineConfig next = config->config;
        next.set(key, value);
        next.validate();
        config->config = next;
    });
}

cs_status cs_config_get(const cs_config* config, const char* key, const char** value)
{
    return guarded([&] {
        require(config && key && value, "config, key and value are required");
        auto* self = const_cast<cs_config*>(config);
        const std::string k = key;
        if (k == "threads") {
            self->value = std::to_string(config->config.forest.threads);
            *value = self->value.c_str();
            return;
        }
        for (const auto& [name, v] : config->config.entries())
            if (name == k) {
                self->value = v;
                *value = self->value.c_str();
                return;
            }
        fail(ErrorCode::InvalidArgument, "unknown config key '" + k + "'");
    });
}

const char* cs_config_json(const cs_config* config)
{
    if (!config)
        return "";
    auto* self = const_cast<cs_config*>(config);
    self->json = config->config.to_json().dump();
    return self->json.c_str();
}

// ---- signatures ------------------------------------------------------------

cs_status cs_signature_from_video(const cs_config* config, const char* video, const char* mask,
                                  const char* background, cs_signature** out)
{
    return guarded([&] {
        require(config && video && out, "config, video and out are required");
        auto sig = pipeline::video_signature(video, opt_path(mask), opt_path(background), config->config);
        *out = new cs_signature{std::move(sig), {}};
    });
}

cs_status cs_signature_from_series(const cs_config* config, const double* samples, size_t rows, size_t cols,
                                   cs_signature** out)
{
    return guarded([&] {
        require(config && samples && out, "config, samples and out are required");
        require(cols > 0, "series needs at least one column");
        Matrix m = Eigen::Map<const Matrix>(samples, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        auto sig = pipeline::curve_signature(Curve(std::move(m)), config->config);
        *out = new cs_signature{std::move(sig), {}};
    });
}

void cs_signature_destroy(cs_signature* sig)
{
    delete sig;
}

size_t cs_signature_size(const cs_signature* sig)
{
    return sig ? sig->sig.grid_size() : 0;
}

double cs_signature_arc_step(const cs_signature* sig)
{
    return sig ? sig->sig.arc_step : 0.0;
}

double cs_signature_total_length(const cs_signature* sig)
{
    return sig ? sig->sig.total_length : 0.0;
}

cs_status cs_signature_copy(const cs_signature* sig, double* s, double* k1, double* k2, unsigned char* valid)
{
    return guarded([&] {
        require(sig, "signature is null");
        const auto& g = sig->sig;
        if (s) {
            const auto arc = g.arclength();
            std::copy(arc.begin(), arc.end(), s);
        }
        if (k1)
            std::copy(g.k1.begin(), g.k1.end(), k1);
        if (k2)
            std::copy(g.k2.begin(), g.k2.end(), k2);
        if (valid)
            std::copy(g.valid.begin(), g.valid.end(), valid);
    });
}

const char* cs_signature_csv(const cs_signature* sig)
{
    if (!sig)
        return "";
    auto* self = const_cast<cs_signature*>(sig);
    std::ostringstream out;
    frenet::write_csv(out, sig->sig);
    self->csv = out.str();
    return self->csv.c_str();
}

cs_status cs_signature_write_csv(const cs_signature* sig, const char* path)
{
    return guarded([&] {
        require(sig && path, "signature and path are required");
        frenet::write_csv(std::filesystem::path(path), sig->sig);
    });
}

cs_status cs_signature_write_crv(const cs_signature* sig, const char* path)
{
    return guarded([&] {
        require(sig && path, "signature and path are required");
        frenet::write_crv(path, sig->sig);
    });
}

cs_status cs_signature_features(const cs_signature* sig, const cs_config* config, double* out, size_t capacity,
                                size_t* count)
{
    return guarded([&] {
        require(sig && config && out, "signature, config and out are required");
        const auto fv = features::extract_features(sig->sig, config->config.feature_options());
        if (capacity < fv.values.size())
            fail(ErrorCode::InvalidArgument, "output buffer holds " + std::to_string(capacity) + " values, need " +
                                                 std::to_string(fv.values.size()));
        std::copy(fv.values.begin(), fv.values.end(), out);
        if (count)
            *count = fv.values.size();
    });
}

// ---- datasets --------------------------------------------------------------

cs_status cs_dataset_create(const char* const* class_names, size_t n_classes, size_t n_features, cs_dataset** out)
{
    return guarded([&] {
        require(class_names && out, "class_names and out are required");
        require(n_classes > 0 && n_features > 0, "need at least one class and one feature");
        auto ds = std::make_unique<cs_dataset>();
        for (size_t i = 0; i < n_classes; ++i) {
            require(class_names[i], "class name is null");
            ds->data.data.class_names.emplace_back(class_names[i]);
        }
        ds->data.data.features.resize(0, static_cast<Eigen::Index>(n_features));
        *out = ds.release();
    });
}

cs_status cs_dataset_add_row(cs_dataset* data, const double* row, size_t n_features, size_t label)
{
    return guarded([&] {
        require(data && row, "dataset and row are required");
        auto& d = data->data.data;
        if (n_features != d.cols())
            fail(ErrorCode::DimensionMismatch, "row has " + std::to_string(n_features) + " values, dataset has " +
                                                   std::to_string(d.cols()) + " columns");
        require(label < d.classes(), "label out of range");
        const Eigen::Index r = d.features.rows();
        d.features.conservativeResize(r + 1, Eigen::NoChange);
        d.features.row(r) = Eigen::Map<const Eigen::RowVectorXd>(row, static_cast<Eigen::Index>(n_features));
        d.labels.push_back(static_cast<int>(label));
        data->data.paths.emplace_back();
        data->data.groups.emplace_back();
    });
}

cs_status cs_dataset_from_manifest(const cs_config* config, const char* manifest, cs_dataset** out)
{
    return guarded([&] {
        require(config && manifest && out, "config, manifest and out are required");
        auto ds = std::make_unique<cs_dataset>();
        ds->data = pipeline::build_dataset(pipeline::Manifest::load(manifest), config->config);
        *out = ds.release();
    });
}

void cs_dataset_destroy(cs_dataset* data)
{
    delete data;
}

size_t cs_dataset_rows(const cs_dataset* data)
{
    return data ? data->data.data.rows() : 0;
}

size_t cs_dataset_feature_count(const cs_dataset* data)
{
    return data ? data->data.data.cols() : 0;
}

size_t cs_dataset_class_count(const cs_dataset* data)
{
    return data ? data->data.data.classes() : 0;
}

const char* cs_dataset_class_name(const cs_dataset* data, size_t index)
{
    if (!data || index >= data->data.data.classes())
        return nullptr;
    return data->data.data.class_names[index].c_str();
}

size_t cs_dataset_failure_count(const cs_dataset* data)
{
    return data ? data->data.failures.size() : 0;
}

const char* cs_dataset_failure_path(const cs_dataset* data, size_t index)
{
    if (!data || index >= data->data.failures.size())
        return nullptr;
    return data->data.failures[index].path.c_str();
}

const char* cs_dataset_failure_message(const cs_dataset* data, size_t index)
{
    if (!data || index >= data->data.failures.size())
        return nullptr;
    return data->data.failures[index].message.c_str();
}

const char* cs_dataset_summary_json(const cs_dataset* data)
{
    if (!data)
        return "";
    auto* self = const_cast<cs_dataset*>(data);
    self->summary = pipeline::dataset_summary_json(data->data).dump();
    return self->summary.c_str();
}

cs_status cs_dataset_write_features_csv(const cs_dataset* data, const char* path)
{
    return guarded([&] {
        require(data && path, "dataset and path are required");
        const auto& d = data->data.data;
        std::vector<std::string> names;
        if (d.cols() == features::kStatsPerChannel)
            names = features::feature_names(features::ChannelMode::K1);
        else if (d.cols() == 2 * features::kStatsPerChannel)
            names = features::feature_names(features::ChannelMode::K1K2);
        else
            for (size_t j = 0; j < d.cols(); ++j)
                names.push_back("f" + std::to_string(j));
        std::vector<std::string> labels;
        for (int l : d.labels)
            labels.push_back(d.class_names[static_cast<size_t>(l)]);
        std::ostringstream out;
        features::write_csv(out, names, d.features, labels);
        write_text(path, out.str());
    });
}

// ---- models ----------------------------------------------------------------

cs_status cs_model_train(const cs_dataset* data, const cs_config* config, cs_model** out)
{
    return guarded([&] {
        require(data && config && out, "dataset, config and out are required");
        *out = new cs_model{pipeline::train_model(data->data.data, config->config), {}};
    });
}

cs_status cs_model_parse(const char* text, cs_model** out)
{
    return guarded([&] {
        require(text && out, "text and out are required");
        auto model = forest::ForestModel::parse(text);
        pipeline::model_config(model); // reject models whose config echo is unusable
        *out = new cs_model{std::move(model), {}};
    });
}

cs_status cs_model_load(const char* path, cs_model** out)
{
    return guarded([&] {
        require(path && out, "path and out are required");
        std::ifstream in(path, std::ios::binary);
        if (!in)
            fail(ErrorCode::Io, std::string("cannot open model ") + path);
        std::stringstream buf;
        buf << in.rdbuf();
        auto model = forest::ForestModel::parse(buf.str());
        pipeline::model_config(model);
        *out = new cs_model{std::move(model), {}};
    });
}

cs_status cs_model_save(const cs_model* model, const char* path)
{
    return guarded([&] {
        require(model && path, "model and path are required");
        write_text(path, model->model.serialize());
    });
}

const char* cs_model_text(const cs_model* model)
{
    if (!model)
        return "";
    auto* self = const_cast<cs_model*>(model);
    self->text = model->model.serialize();
    return self->text.c_str();
}

void cs_model_destroy(cs_model* model)
{
    delete model;
}

size_t cs_model_class_count(const cs_model* model)
{
    return model ? model->model.class_names.size() : 0;
}

const char* cs_model_class_name(const cs_model* model, size_t index)
{
    if (!model || index >= model->model.class_names.size())
        return nullptr;
    return model->model.class_names[index].c_str();
}

size_t cs_model_feature_count(const cs_model* model)
{
    return model ? model->model.n_features : 0;
}

cs_status cs_model_config(const cs_model* model, cs_config** out)
{
    return guarded([&] {
        require(model && out, "model and out are required");
        *out = new cs_config{pipeline::model_config(model->model), {}, {}};
    });
}

cs_status cs_model_predict(const cs_model* model, const double* row, size_t n_features, size_t* label, double* votes)
{
    return guarded([&] {
        require(model && row, "model and row are required");
        copy_votes(model->model.predict(std::span<const double>(row, n_features)), label, votes);
    });
}

cs_status cs_model_predict_video(const cs_model* model, const char* video, const char* mask, const char* background,
                                 size_t* label, double* votes)
{
    return guarded([&] {
        require(model && video, "model and video are required");
        const auto config = pipeline::model_config(model->model);
        const auto sig = pipeline::video_signature(video, opt_path(mask), opt_path(background), config);
        const auto fv = features::extract_features(sig, config.feature_options());
        copy_votes(model->model.predict(fv.values), label, votes);
    });
}

// ---- evaluation ------------------------------------------------------------

cs_status cs_model_evaluate(const cs_model* model, const cs_dataset* data, cs_report** out)
{
    return guarded([&] {
        require(model && data && out, "model, dataset and out are required");
        const auto& d = data->data.data;
        if (d.class_names != model->model.class_names)
            fail(ErrorCode::DimensionMismatch, "dataset classes differ from the model's classes");
        const auto m = forest::evaluate(model->model, d);
        auto j = pipeline::metrics_json(m, d.class_names);
        j["rows"] = d.rows();
        *out = new cs_report{m.accuracy, j.dump()};
    });
}

cs_status cs_cross_validate(const cs_dataset* data, const cs_config* config, size_t folds, cs_report** out)
{
    return guarded([&] {
        require(data && config && out, "dataset, config and out are required");
        const auto cv = forest::cross_validate(data->data.data, folds, config->config.forest);
        auto j = pipeline::cv_json(cv, data->data.data.class_names);
        j["protocol"] = "stratified_kfold";
        *out = new cs_report{cv.mean_accuracy, j.dump()};
    });
}

cs_status cs_cross_validate_groups(const cs_dataset* data, const cs_config* config, cs_report** out)
{
    return guarded([&] {
        require(data && config && out, "dataset, config and out are required");
        const auto cv = forest::cross_validate_groups(data->data.data, data->data.groups, config->config.forest);
        auto j = pipeline::cv_json(cv, data->data.data.class_names);
        j["protocol"] = "leave_one_group_out";
        *out = new cs_report{cv.mean_accuracy, j.dump()};
    });
}

void cs_report_destroy(cs_report* report)
{
    delete report;
}

double cs_report_accuracy(const cs_report* report)
{
    return report ? report->accuracy : 0.0;
}

const char* cs_report_json(const cs_report* report)
{
    return report ? report->json.c_str() : "";
}

// ---- misc ------------------------------------------------------------------

cs_status cs_gini(const double* probabilities, size_t n_classes, double* out)
{
    return guarded([&] {
        require(probabilities && out, "probabilities and out are required");
        *out = forest::gini(std::span<const double>(probabilities, n_classes));
    });
}

cs_status cs_synth_write(const char* kind, const char* out_path, size_t per_class, uint64_t seed, double noise)
{
    return guarded([&] {
        require(kind && out_path, "kind and out_path are required");
        const std::string k = kind;
        if (k == "classes") {
            synth::ClassDatasetOptions o;
            o.per_class = per_class;
            o.seed = seed;
            o.noise = noise;
            synth::write_class_dataset(out_path, o);
        } else if (k == "helix") {
            crv::write(out_path, series_tensor(synth::helix(1.0, 0.5, 2.0, 512), 1, 3));
        } else if (k == "circle") {
            crv::write(out_path, series_tensor(synth::circle(2.0, 512, 3), 1, 3));
        } else if (k == "blob") {
            crv::write(out_path, video_tensor(synth::moving_blob_video(48, 24, seed)));
        } else if (k == "blob_flipped") {
            crv::write(out_path, video_tensor(ingest::flip_horizontal(synth::moving_blob_video(48, 24, seed))));
        } else {
            fail(ErrorCode::InvalidArgument, "unknown synthetic kind '" + k + "'");
        }
    });
}

} // extern "C"
