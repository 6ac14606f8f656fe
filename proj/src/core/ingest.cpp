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

#include "curvsig/ingest.hpp"

#include "curvsig/crv.hpp"
#include "curvsig/error.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cctype>
#include <string>

namespace curvsig::ingest {

namespace fs = std::filesystem;

namespace {

bool is_image_file(const fs::path& p)
{
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".pgm" || ext == ".bmp";
}

Grid resize_grid(const Grid& g, int side)
{
    cv::Mat src(static_cast<int>(g.rows()), static_cast<int>(g.cols()), CV_64F, const_cast<double*>(g.data()));
    cv::Mat dst;
    cv::resize(src, dst, cv::Size(side, side), 0, 0, cv::INTER_LINEAR);
    Grid out(side, side);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
            out(y, x) = std::clamp(dst.at<double>(y, x), 0.0, 1.0);
    return out;
}

Grid decode_image(const fs::path& path)
{
    const cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (img.empty())
        fail(ErrorCode::Decode, "cannot decode image " + path.string());

    double scale;
    switch (img.depth()) {
    case CV_8U: scale = 255.0; break;
    case CV_16U: scale = 65535.0; break;
    default: fail(ErrorCode::Decode, "unsupported pixel depth in " + path.string());
    }

    cv::Mat f;
    img.convertTo(f, CV_64F, 1.0 / scale);
    Grid out(f.rows, f.cols);
    const int channels = f.channels();
    for (int y = 0; y < f.rows; ++y) {
        const double* row = f.ptr<double>(y);
        for (int x = 0; x < f.cols; ++x) {
            const double* px = row + static_cast<std::ptrdiff_t>(x) * channels;
            if (channels >= 3) // OpenCV stores BGR(A)
                out(y, x) = 0.299 * px[2] + 0.587 * px[1] + 0.114 * px[0];
            else
                out(y, x) = px[0];
        }
    }
    return out;
}

std::vector<Grid> grids_from_crv(const crv::Tensor& t)
{
    std::vector<Grid> frames;
    frames.reserve(t.frames);
    for (std::size_t i = 0; i < t.frames; ++i) {
        Grid g(t.height, t.width);
        for (std::size_t y = 0; y < t.height; ++y)
            for (std::size_t x = 0; x < t.width; ++x)
                g(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = t.at(i, y, x);
        frames.push_back(std::move(g));
    }
    return frames;
}

std::vector<fs::path> image_files(const fs::path& dir)
{
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && is_image_file(entry.path()))
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return files;
}

// Raw grids from a directory or CRV file, resized when requested. Series
// (H = 1) are left alone.
std::vector<Grid> load_grids(const fs::path& path, std::optional<int> resize_to)
{
    if (resize_to && *resize_to < 2)
        fail(ErrorCode::InvalidArgument, "resize side must be at least 2");
    if (!fs::exists(path))
        fail(ErrorCode::Io, "no such file or directory: " + path.string());

    std::vector<Grid> grids;
    bool series = false;
    if (fs::is_directory(path)) {
        const auto files = image_files(path);
        grids.reserve(files.size());
        for (const auto& f : files)
            grids.push_back(decode_image(f));
    } else if (crv::sniff(path)) {
        const auto t = crv::read(path);
        series = t.height == 1;
        grids = grids_from_crv(t);
    } else if (is_image_file(path)) {
        grids.push_back(decode_image(path));
    } else {
        fail(ErrorCode::Decode, "unrecognized input " + path.string() + " (expected image directory or CRV file)");
    }

    if (resize_to && !series)
        for (auto& g : grids)
            g = resize_grid(g, *resize_to);
    return grids;
}

void check_same_shape(const std::vector<Grid>& grids, const fs::path& origin)
{
    for (std::size_t i = 1; i < grids.size(); ++i)
        if (grids[i].rows() != grids[0].rows() || grids[i].cols() != grids[0].cols())
            fail(ErrorCode::DimensionMismatch,
                 origin.string() + ": frame " + std::to_string(i) + " is " + std::to_string(grids[i].rows()) + "x" +
                     std::to_string(grids[i].cols()) + ", frame 0 is " + std::to_string(grids[0].rows()) + "x" +
                     std::to_string(grids[0].cols()));
}

void check_pair(const FrameSequence& seq, std::size_t count, Eigen::Index rows, Eigen::Index cols, const char* what)
{
    if (count != seq.size() || static_cast<std::size_t>(rows) != seq.height() ||
        static_cast<std::size_t>(cols) != seq.width())
        fail(ErrorCode::DimensionMismatch, std::string(what) + " is " + std::to_string(count) + "x" +
                                               std::to_string(rows) + "x" + std::to_string(cols) + ", frames are " +
                                               std::to_string(seq.size()) + "x" + std::to_string(seq.height()) +
                                               "x" + std::to_string(seq.width()));
}

} // namespace

FrameSequence::FrameSequence(std::vector<Grid> frames) : frames_(std::move(frames))
{
    if (frames_.size() < kMinFrames)
        fail(ErrorCode::TooShort, "sequence has " + std::to_string(frames_.size()) + " frames, need at least " +
                                      std::to_string(kMinFrames));
    if (frames_.front().size() == 0)
        fail(ErrorCode::InvalidArgument, "frames must not be empty");
    check_same_shape(frames_, "sequence");
}

bool operator==(const FrameSequence& a, const FrameSequence& b)
{
    if (a.size() != b.size() || a.height() != b.height() || a.width() != b.width())
        return false;
    for (std::size_t t = 0; t < a.size(); ++t)
        if (a[t] != b[t])
            return false;
    return true;
}

MaskSequence::MaskSequence(std::vector<Grid> masks) : masks_(std::move(masks))
{
    if (masks_.empty())
        fail(ErrorCode::InvalidArgument, "mask sequence is empty");
    check_same_shape(masks_, "mask sequence");
    for (const auto& m : masks_)
        if (!((m.array() == 0.0) || (m.array() == 1.0)).all())
            fail(ErrorCode::InvalidArgument, "mask values must be exactly 0 or 1");
}

FrameSequence load_frames(const fs::path& path, std::optional<int> resize_to)
{
    auto grids = load_grids(path, resize_to);
    if (grids.size() < kMinFrames)
        fail(ErrorCode::TooShort, path.string() + ": " + std::to_string(grids.size()) +
                                      " frames, need at least " + std::to_string(kMinFrames));
    check_same_shape(grids, path);
    return FrameSequence(std::move(grids));
}

MaskSequence load_masks(const fs::path& path, std::optional<int> resize_to)
{
    auto grids = load_grids(path, resize_to);
    check_same_shape(grids, path);
    for (auto& g : grids)
        g = (g.array() >= 0.5).cast<double>().matrix();
    return MaskSequence(std::move(grids));
}

Grid load_grid(const fs::path& path, std::optional<int> resize_to)
{
    auto grids = load_grids(path, resize_to);
    if (grids.size() != 1)
        fail(ErrorCode::InvalidArgument, path.string() + ": expected a single frame, found " +
                                             std::to_string(grids.size()));
    return std::move(grids.front());
}

Grid median_background(const FrameSequence& seq)
{
    Grid bg(seq.height(), seq.width());
    std::vector<double> column(seq.size());
    for (Eigen::Index y = 0; y < bg.rows(); ++y)
        for (Eigen::Index x = 0; x < bg.cols(); ++x) {
            for (std::size_t t = 0; t < seq.size(); ++t)
                column[t] = seq[t](y, x);
            std::sort(column.begin(), column.end());
            const std::size_t n = column.size();
            bg(y, x) = n % 2 ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
        }
    return bg;
}

FrameSequence subtract_background(const FrameSequence& seq, const Grid& background, double threshold,
                                  bool binarize)
{
    check_pair(seq, seq.size(), background.rows(), background.cols(), "background");
    if (!(threshold >= 0.0 && threshold <= 1.0))
        fail(ErrorCode::InvalidArgument, "background threshold must lie in [0,1]");
    std::vector<Grid> out;
    out.reserve(seq.size());
    for (const auto& f : seq.frames()) {
        const auto keep = ((f - background).array().abs() > threshold);
        if (binarize)
            out.push_back(keep.cast<double>().matrix());
        else
            out.push_back(keep.select(f, 0.0));
    }
    return FrameSequence(std::move(out));
}

FrameSequence apply_masks(const FrameSequence& seq, const MaskSequence& masks)
{
    check_pair(seq, masks.size(), masks[0].rows(), masks[0].cols(), "mask sequence");
    std::vector<Grid> out;
    out.reserve(seq.size());
    for (std::size_t t = 0; t < seq.size(); ++t)
        out.push_back(seq[t].cwiseProduct(masks[t]));
    return FrameSequence(std::move(out));
}

FrameSequence flip_horizontal(const FrameSequence& seq)
{
    std::vector<Grid> out;
    out.reserve(seq.size());
    for (const auto& f : seq.frames())
        out.push_back(f.rowwise().reverse());
    return FrameSequence(std::move(out));
}

Curve flatten(const FrameSequence& seq)
{
    const auto d = static_cast<Eigen::Index>(seq.height() * seq.width());
    Matrix samples(static_cast<Eigen::Index>(seq.size()), d);
    for (std::size_t t = 0; t < seq.size(); ++t)
        samples.row(static_cast<Eigen::Index>(t)) = Eigen::Map<const Eigen::RowVectorXd>(seq[t].data(), d);
    return Curve(std::move(samples));
}

FrameSequence unflatten(const Curve& curve, std::size_t height, std::size_t width)
{
    if (height * width != curve.dim())
        fail(ErrorCode::DimensionMismatch, "curve dimension " + std::to_string(curve.dim()) + " is not " +
                                               std::to_string(height) + "x" + std::to_string(width));
    std::vector<Grid> frames;
    frames.reserve(curve.size());
    for (Eigen::Index t = 0; t < curve.samples().rows(); ++t)
        frames.push_back(Eigen::Map<const Grid>(curve.samples().row(t).data(), static_cast<Eigen::Index>(height),
                                                static_cast<Eigen::Index>(width)));
    return FrameSequence(std::move(frames));
}

void write_frames_crv(const fs::path& path, const FrameSequence& seq)
{
    crv::Tensor t;
    t.frames = static_cast<std::uint32_t>(seq.size());
    t.height = static_cast<std::uint32_t>(seq.height());
    t.width = static_cast<std::uint32_t>(seq.width());
    t.values.reserve(seq.size() * t.frame_size());
    for (const auto& f : seq.frames())
        for (Eigen::Index i = 0; i < f.size(); ++i)
            t.values.push_back(static_cast<float>(f.data()[i]));
    crv::write(path, t);
}

} // namespace curvsig::ingest
