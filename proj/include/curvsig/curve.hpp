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

#ifndef CURVSIG_CURVE_HPP
#define CURVSIG_CURVE_HPP

#include "curvsig/types.hpp"

#include <cstddef>
#include <filesystem>
#include <vector>

namespace curvsig {

inline constexpr std::size_t kMinCurveSamples = 4;
inline constexpr double kDegenerateLength = 1e-12;
inline constexpr std::size_t kDefaultGridSize = 128;

/// A sequence viewed as a path X(t_i) in R^D: row i of samples() is the
/// point at times()[i]. Times are strictly increasing from 0 to 1.
class Curve {
public:
    /// Uniform times i/(T-1).
    explicit Curve(Matrix samples);
    Curve(Matrix samples, std::vector<double> times);

    std::size_t size() const { return static_cast<std::size_t>(samples_.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(samples_.cols()); }
    const Matrix& samples() const { return samples_; }
    const std::vector<double>& times() const { return times_; }

private:
    Matrix samples_;
    std::vector<double> times_;
};

/// Normalized cumulative chord length F(t_i) and the total length c.
struct ArclengthProfile {
    std::vector<double> cumulative;
    double total_length = 0.0;
};

/// A curve resampled at N points equally spaced in arclength.
struct ReparamCurve {
    Matrix samples;
    double total_length = 0.0;
    /// Source-curve time at which each output sample was taken.
    std::vector<double> source_times;

    std::size_t grid_size() const { return static_cast<std::size_t>(samples.rows()); }
    double arc_step() const { return total_length / static_cast<double>(grid_size() - 1); }
};

/// Chord-length discretization of the arclength integral. Throws
/// ErrorCode::Degenerate when the total length is below `degenerate_eps`.
ArclengthProfile arclength_profile(const Curve& curve, double degenerate_eps = kDegenerateLength);

/// Samples the curve where the cumulative profile hits k/(N-1), k = 0..N-1,
/// by linear interpolation between neighbouring rows. Zero-motion plateaus
/// resolve to the earliest parameter.
ReparamCurve reparameterize(const Curve& curve, const ArclengthProfile& profile,
                            std::size_t grid_size = kDefaultGridSize);

/// Convenience: profile + reparameterize.
ReparamCurve reparameterize(const Curve& curve, std::size_t grid_size = kDefaultGridSize);

/// Sum of Euclidean distances between consecutive rows.
double polygonal_length(const Matrix& samples);

/// Gaussian smoothing along the sample axis (sigma in samples, kernel cut at
/// 3 sigma and renormalized at the ends). sigma <= 0 returns the input.
ReparamCurve gaussian_smooth(const ReparamCurve& curve, double sigma);

/// Exports the samples as CRV with H = 1, W = D.
void write_crv(const std::filesystem::path& path, const ReparamCurve& curve);

} // namespace curvsig

#endif // CURVSIG_CURVE_HPP
