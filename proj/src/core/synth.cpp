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

#include "curvsig/synth.hpp"

#include "curvsig/crv.hpp"
#include "curvsig/error.hpp"

#include <Eigen/QR>

#include <cmath>
#include <fstream>
#include <numbers>

namespace curvsig::synth {

using std::numbers::pi;

Matrix sample(const std::function<Vector(double)>& f, std::size_t count)
{
    const Vector first = f(0.0);
    Matrix out(static_cast<Eigen::Index>(count), first.size());
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        out.row(static_cast<Eigen::Index>(i)) = f(t).transpose();
    }
    return out;
}

Matrix circle(double radius, std::size_t count, std::size_t dim)
{
    if (dim < 2)
        fail(ErrorCode::InvalidArgument, "a circle needs at least 2 dimensions");
    return sample(
        [&](double t) {
            Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
            v(0) = radius * std::cos(2 * pi * t);
            v(1) = radius * std::sin(2 * pi * t);
            return v;
        },
        count);
}

Matrix helix(double a, double b, double turns, std::size_t count)
{
    return sample(
        [&](double t) {
            const double u = 2 * pi * turns * t;
            Vector v(3);
            v << a * std::cos(u), a * std::sin(u), b * u;
            return v;
        },
        count);
}

Matrix random_orthogonal(std::size_t dim, Rng& rng)
{
    const auto n = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < g.size(); ++i)
        g.data()[i] = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd r = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j)
        if (r(j, j) < 0)
            q.col(j) = -q.col(j);
    return q;
}

Warp Warp::random(Rng& rng, std::size_t terms, double strength)
{
    Warp w;
    std::vector<double> raw(terms);
    double total = 0.0;
    for (auto& a : raw) {
        a = rng.uniform(-1.0, 1.0);
        total += std::abs(a);
    }
    // Scale so that sum |a_j| = strength < 1, keeping w' >= 1 - strength > 0.
    for (auto& a : raw)
        w.coefficients_.push_back(total > 0 ? a * strength / total : 0.0);
    return w;
}

double Warp::operator()(double t) const
{
    double v = t;
    for (std::size_t j = 0; j < coefficients_.size(); ++j) {
        const double k = static_cast<double>(j + 1) * pi;
        v += coefficients_[j] * std::sin(k * t) / k;
    }
    return std::clamp(v, 0.0, 1.0);
}

namespace {

// Shapes with coordinate amplitude of order 1, parameterized over [0, 1].
Vector shape(int label, double t)
{
    Vector v(3);
    switch (label) {
    case 0: // circle
        v << std::cos(2 * pi * t), std::sin(2 * pi * t), 0.0;
        break;
    case 1: { // helix, 1.5 turns
        const double u = 3 * pi * t;
        v << std::cos(u), std::sin(u), 0.45 * u - 0.45 * 1.5 * pi;
        break;
    }
    case 2: // figure eight
        v << std::sin(2 * pi * t), 0.6 * std::sin(4 * pi * t), 0.0;
        break;
    default: { // trefoil knot
        const double u = 2 * pi * t;
        v << (std::sin(u) + 2 * std::sin(2 * u)) / 3.0, (std::cos(u) - 2 * std::cos(2 * u)) / 3.0,
            -std::sin(3 * u) / 3.0;
        break;
    }
    }
    return v;
}

} // namespace

std::vector<std::string> class_names()
{
    return {"circle", "helix", "figure_eight", "trefoil"};
}

std::vector<Sample> class_dataset(const ClassDatasetOptions& o)
{
    if (o.dim < 3)
        fail(ErrorCode::InvalidArgument, "synthetic curves need at least 3 dimensions");
    if (o.frames < kMinCurveSamples)
        fail(ErrorCode::InvalidArgument, "synthetic curves need at least 4 frames");
    std::vector<Sample> out;
    const auto d = static_cast<Eigen::Index>(o.dim);
    for (int label = 0; label < 4; ++label) {
        for (std::size_t i = 0; i < o.per_class; ++i) {
            Rng rng(stream_seed(o.seed, static_cast<std::uint64_t>(label) * 1000003u + i));
            const Warp warp = Warp::random(rng);
            const Matrix q = random_orthogonal(o.dim, rng);
            const double scale = rng.uniform(0.85, 1.15);
            Vector shift(d);
            for (Eigen::Index k = 0; k < d; ++k)
                shift(k) = rng.uniform(-1.0, 1.0);

            Matrix base = sample([&](double t) { return shape(label, warp(t)); }, o.frames);
            Matrix embedded = Matrix::Zero(base.rows(), d);
            embedded.leftCols(3) = base;
            Matrix curve = (scale * embedded * q.transpose()).rowwise() + shift.transpose();
            const double amplitude = scale * base.cwiseAbs().maxCoeff();
            for (Eigen::Index k = 0; k < curve.size(); ++k)
                curve.data()[k] += o.noise * amplitude * rng.normal();
            out.push_back({std::move(curve), label});
        }
    }
    return out;
}

ingest::FrameSequence moving_blob_video(std::size_t frames, std::size_t side, std::uint64_t seed)
{
    Rng rng(seed);
    const auto n = static_cast<Eigen::Index>(side);
    Grid texture(n, n);
    for (Eigen::Index i = 0; i < texture.size(); ++i)
        texture.data()[i] = 0.2 * rng.uniform();
    const double phase = rng.uniform(0.0, 2 * pi);
    const double sigma = 0.12 * static_cast<double>(side);

    std::vector<Grid> out;
    for (std::size_t t = 0; t < frames; ++t) {
        const double u = static_cast<double>(t) / static_cast<double>(frames - 1);
        // Off-centre path so that mirroring is not a symmetry of the video.
        const double cx = (0.3 + 0.45 * u + 0.1 * std::sin(2 * pi * u + phase)) * static_cast<double>(side - 1);
        const double cy = (0.5 + 0.25 * std::cos(3 * pi * u + phase)) * static_cast<double>(side - 1);
        Grid g = texture;
        for (Eigen::Index y = 0; y < n; ++y)
            for (Eigen::Index x = 0; x < n; ++x) {
                const double r2 = (double(x) - cx) * (double(x) - cx) + (double(y) - cy) * (double(y) - cy);
                g(y, x) = std::min(1.0, g(y, x) + 0.8 * std::exp(-0.5 * r2 / (sigma * sigma)));
            }
        out.push_back(std::move(g));
    }
    return ingest::FrameSequence(std::move(out));
}

void write_class_dataset(const std::filesystem::path& dir, const ClassDatasetOptions& options)
{
    std::filesystem::create_directories(dir);
    const auto names = class_names();
    const auto samples = class_dataset(options);
    std::ofstream manifest(dir / "manifest.csv");
    if (!manifest)
        fail(ErrorCode::Io, "cannot write " + (dir / "manifest.csv").string());
    manifest << "video_path,label\n";
    std::vector<std::size_t> counter(names.size(), 0);
    for (const auto& s : samples) {
        const auto& name = names[static_cast<std::size_t>(s.label)];
        char file[96];
        std::snprintf(file, sizeof file, "%s_%03zu.crv", name.c_str(), counter[static_cast<std::size_t>(s.label)]++);
        crv::Tensor t;
        t.frames = static_cast<std::uint32_t>(s.curve.rows());
        t.height = 1;
        t.width = static_cast<std::uint32_t>(s.curve.cols());
        for (Eigen::Index k = 0; k < s.curve.size(); ++k)
            t.values.push_back(static_cast<float>(s.curve.data()[k]));
        crv::write(dir / file, t);
        manifest << file << ',' << name << '\n';
    }
}

} // namespace curvsig::synth
