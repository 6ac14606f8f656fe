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

#include "curvsig/curve.hpp"

#include "curvsig/crv.hpp"
#include "curvsig/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace curvsig {

namespace {

std::vector<double> uniform_times(std::size_t n)
{
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    t.back() = 1.0;
    return t;
}

} // namespace

Curve::Curve(Matrix samples) : Curve(samples, uniform_times(std::max<std::size_t>(samples.rows(), 2))) {}

Curve::Curve(Matrix samples, std::vector<double> times) : samples_(std::move(samples)), times_(std::move(times))
{
    if (size() < kMinCurveSamples)
        fail(ErrorCode::TooShort,
             "curve has " + std::to_string(size()) + " samples, need at least " + std::to_string(kMinCurveSamples));
    if (dim() < 1)
        fail(ErrorCode::InvalidArgument, "curve dimension must be at least 1");
    if (times_.size() != size())
        fail(ErrorCode::DimensionMismatch, "curve has " + std::to_string(size()) + " samples but " +
                                               std::to_string(times_.size()) + " times");
    if (times_.front() != 0.0 || times_.back() != 1.0)
        fail(ErrorCode::InvalidArgument, "curve times must start at 0 and end at 1");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            fail(ErrorCode::InvalidArgument, "curve times must be strictly increasing");
    if (!samples_.allFinite())
        fail(ErrorCode::InvalidArgument, "curve samples contain NaN or Inf");
}

double polygonal_length(const Matrix& samples)
{
    double total = 0.0;
    for (Eigen::Index i = 1; i < samples.rows(); ++i)
        total += (samples.row(i) - samples.row(i - 1)).norm();
    return total;
}

ArclengthProfile arclength_profile(const Curve& curve, double degenerate_eps)
{
    const Matrix& x = curve.samples();
    const std::size_t n = curve.size();
    std::vector<double> partial(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const auto a = static_cast<Eigen::Index>(i);
        partial[i] = partial[i - 1] + (x.row(a) - x.row(a - 1)).norm();
    }
    const double c = partial.back();
    if (!(c >= degenerate_eps))
        fail(ErrorCode::Degenerate, "curve has total length " + std::to_string(c) + " (static sequence)");

    ArclengthProfile profile;
    profile.total_length = c;
    profile.cumulative.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        profile.cumulative[i] = partial[i] / c;
    profile.cumulative.back() = 1.0;
    return profile;
}

ReparamCurve reparameterize(const Curve& curve, const ArclengthProfile& profile, std::size_t grid_size)
{
    if (grid_size < kMinCurveSamples)
        fail(ErrorCode::InvalidArgument, "grid size must be at least " + std::to_string(kMinCurveSamples));
    if (profile.cumulative.size() != curve.size())
        fail(ErrorCode::DimensionMismatch, "arclength profile does not belong to this curve");
    if (!(profile.total_length >= kDegenerateLength))
        fail(ErrorCode::Degenerate, "degenerate arclength profile");

    const Matrix& x = curve.samples();
    const auto& cum = profile.cumulative;
    const auto& times = curve.times();

    ReparamCurve out;
    out.total_length = profile.total_length;
    out.samples.resize(static_cast<Eigen::Index>(grid_size), x.cols());
    out.source_times.resize(grid_size);

    for (std::size_t k = 0; k < grid_size; ++k) {
        const double target = static_cast<double>(k) / static_cast<double>(grid_size - 1);
        // First index reaching the target: the earliest parameter on plateaus.
        const auto it = std::lower_bound(cum.begin(), cum.end(), target);
        const auto j = static_cast<std::size_t>(it - cum.begin());
        const auto row = static_cast<Eigen::Index>(k);
        if (j == 0) {
            out.samples.row(row) = x.row(0);
            out.source_times[k] = times[0];
            continue;
        }
        const std::size_t jj = std::min(j, curve.size() - 1);
        const double span = cum[jj] - cum[jj - 1];
        const double w = span > 0.0 ? std::clamp((target - cum[jj - 1]) / span, 0.0, 1.0) : 1.0;
        const auto a = static_cast<Eigen::Index>(jj - 1);
        out.samples.row(row) = x.row(a) + w * (x.row(a + 1) - x.row(a));
        out.source_times[k] = times[jj - 1] + w * (times[jj] - times[jj - 1]);
    }
    return out;
}

ReparamCurve reparameterize(const Curve& curve, std::size_t grid_size)
{
    return reparameterize(curve, arclength_profile(curve), grid_size);
}

ReparamCurve gaussian_smooth(const ReparamCurve& curve, double sigma)
{
    if (!(sigma > 0.0))
        return curve;
    const auto n = static_cast<Eigen::Index>(curve.grid_size());
    const auto radius = static_cast<Eigen::Index>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    for (Eigen::Index d = -radius; d <= radius; ++d)
        kernel[static_cast<std::size_t>(d + radius)] = std::exp(-0.5 * double(d * d) / (sigma * sigma));

    ReparamCurve out = curve;
    for (Eigen::Index i = 0; i < n; ++i) {
        double weight = 0.0;
        out.samples.row(i).setZero();
        for (Eigen::Index d = -radius; d <= radius; ++d) {
            const Eigen::Index j = i + d;
            if (j < 0 || j >= n)
                continue;
            const double w = kernel[static_cast<std::size_t>(d + radius)];
            out.samples.row(i) += w * curve.samples.row(j);
            weight += w;
        }
        out.samples.row(i) /= weight;
    }
    return out;
}

void write_crv(const std::filesystem::path& path, const ReparamCurve& curve)
{
    crv::Tensor t;
    t.frames = static_cast<std::uint32_t>(curve.samples.rows());
    t.height = 1;
    t.width = static_cast<std::uint32_t>(curve.samples.cols());
    t.values.resize(static_cast<std::size_t>(curve.samples.size()));
    for (Eigen::Index i = 0; i < curve.samples.size(); ++i)
        t.values[static_cast<std::size_t>(i)] = static_cast<float>(curve.samples.data()[i]);
    crv::write(path, t);
}

} // namespace curvsig
