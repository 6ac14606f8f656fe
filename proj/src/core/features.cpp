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

#include "curvsig/features.hpp"

#include "curvsig/error.hpp"
#include "format.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace curvsig::features {

namespace {

constexpr const char* kStatNames[kStatsPerChannel] = {
    "mean", "median", "range", "std", "wave_rate", "skewness", "kurtosis", "beta",
};

} // namespace

std::size_t channel_count(ChannelMode mode)
{
    return mode == ChannelMode::K1 ? 1 : 2;
}

std::vector<std::string> feature_names(ChannelMode mode)
{
    std::vector<std::string> names;
    const char* channels[] = {"k1", "k2"};
    for (std::size_t c = 0; c < channel_count(mode); ++c)
        for (const char* stat : kStatNames)
            names.push_back(std::string(channels[c]) + "_" + stat);
    return names;
}

std::vector<double> ChannelStats::as_vector() const
{
    return {mean, median, range, stddev, wave_rate, skewness, kurtosis, beta};
}

double quantile_sorted(std::span<const double> sorted, double q)
{
    if (sorted.empty())
        fail(ErrorCode::InvalidArgument, "quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size())
        return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

ChannelStats channel_statistics(std::span<const double> values)
{
    if (values.empty())
        fail(ErrorCode::InvalidArgument, "statistics of an empty channel");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());

    ChannelStats s;
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    s.median = quantile_sorted(sorted, 0.5);
    s.range = sorted.back() - sorted.front();
    s.wave_rate = quantile_sorted(sorted, 0.9) - quantile_sorted(sorted, 0.1);

    double m2 = 0.0;
    for (double v : sorted)
        m2 += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(m2 / n);
    if (s.stddev < kDegenerateStddev)
        return s;

    double m3 = 0.0, m4 = 0.0;
    for (double v : sorted) {
        const double z = (v - s.mean) / s.stddev;
        m3 += z * z * z;
        m4 += z * z * z * z;
    }
    s.skewness = m3 / n;
    s.kurtosis = m4 / n;
    s.beta = (s.skewness * s.skewness + 1.0) / s.kurtosis;
    return s;
}

FeatureVector extract_features(const frenet::CurvatureSignature& sig, const Options& options)
{
    const std::size_t n = sig.grid_size();
    const std::size_t skip = options.exclude_boundary ? 2 : 0;
    std::vector<double> k1, k2;
    for (std::size_t i = skip; i + skip < n; ++i) {
        if (!sig.valid[i])
            continue;
        k1.push_back(sig.k1[i]);
        k2.push_back(sig.k2[i]);
    }
    if (k1.empty())
        fail(ErrorCode::Degenerate, "signature has no valid samples");

    FeatureVector fv;
    fv.labels = feature_names(options.mode);
    fv.values = channel_statistics(k1).as_vector();
    if (options.mode == ChannelMode::K1K2) {
        const auto second = channel_statistics(k2).as_vector();
        fv.values.insert(fv.values.end(), second.begin(), second.end());
    }
    for (double v : fv.values)
        if (!std::isfinite(v))
            fail(ErrorCode::Internal, "non-finite feature value");
    return fv;
}

Matrix feature_matrix(std::span<const frenet::CurvatureSignature> sigs, const Options& options)
{
    const auto width = static_cast<Eigen::Index>(kStatsPerChannel * channel_count(options.mode));
    Matrix rows(static_cast<Eigen::Index>(sigs.size()), width);
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        try {
            const auto fv = extract_features(sigs[i], options);
            rows.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(fv.values.data(), width);
        } catch (const Error& e) {
            fail(e.code(), "signature " + std::to_string(i) + ": " + e.what());
        }
    }
    return rows;
}

void write_csv(std::ostream& out, const std::vector<std::string>& names, const Matrix& rows,
               const std::vector<std::string>& labels)
{
    if (static_cast<std::size_t>(rows.cols()) != names.size() || static_cast<std::size_t>(rows.rows()) != labels.size())
        fail(ErrorCode::DimensionMismatch, "feature table shape does not match its names or labels");
    for (const auto& name : names)
        out << name << ',';
    out << "label\n";
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows.cols(); ++j)
            out << format_double(rows(i, j)) << ',';
        out << labels[static_cast<std::size_t>(i)] << '\n';
    }
}

} // namespace curvsig::features
