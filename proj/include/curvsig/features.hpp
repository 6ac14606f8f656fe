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

#ifndef CURVSIG_FEATURES_HPP
#define CURVSIG_FEATURES_HPP

#include "curvsig/frenet.hpp"
#include "curvsig/types.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace curvsig::features {

inline constexpr std::size_t kStatsPerChannel = 8;
inline constexpr double kDegenerateStddev = 1e-12;

enum class ChannelMode {
    K1,   // 8 features
    K1K2, // 16 features
};

std::size_t channel_count(ChannelMode mode);
std::vector<std::string> feature_names(ChannelMode mode);

struct ChannelStats {
    double mean = 0.0;
    double median = 0.0;
    double range = 0.0;
    double stddev = 0.0;
    double wave_rate = 0.0; // Q(0.9) - Q(0.1)
    double skewness = 0.0;
    double kurtosis = 0.0;  // non-excess
    double beta = 0.0;      // (skew^2 + 1) / kurt

    std::vector<double> as_vector() const;
};

/// Linearly interpolated quantile ("type 7") of ascending-sorted values.
double quantile_sorted(std::span<const double> sorted, double q);

/// Population moments. When stddev < 1e-12, skewness, kurtosis and beta are 0.
ChannelStats channel_statistics(std::span<const double> values);

struct FeatureVector {
    std::vector<double> values;
    std::vector<std::string> labels;
};

struct Options {
    ChannelMode mode = ChannelMode::K1K2;
    /// Drop the first and last two samples (one-sided stencils).
    bool exclude_boundary = false;
};

/// Statistics over the valid samples of each channel.
FeatureVector extract_features(const frenet::CurvatureSignature& sig, const Options& options = {});

/// Row i = extract_features(sigs[i]).
Matrix feature_matrix(std::span<const frenet::CurvatureSignature> sigs, const Options& options = {});

/// Header of feature names plus "label"; one row per sample.
void write_csv(std::ostream& out, const std::vector<std::string>& names, const Matrix& rows,
               const std::vector<std::string>& labels);

} // namespace curvsig::features

#endif // CURVSIG_FEATURES_HPP
