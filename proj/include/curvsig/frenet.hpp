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

#ifndef CURVSIG_FRENET_HPP
#define CURVSIG_FRENET_HPP

#include "curvsig/curve.hpp"
#include "curvsig/types.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace curvsig::frenet {

inline constexpr std::size_t kMinGridSize = 7;
inline constexpr double kGramSchmidtTolerance = 1e-10;

/// Finite-difference derivative of order 1, 2 or 3 along the rows of
/// `samples` with uniform spacing `step`. Interior rows use second-order
/// central stencils, the outer rows second-order one-sided ones.
Matrix derivative(const Matrix& samples, double step, int order);

/// Derivatives of orders 1..max_order; requires N >= 7.
std::vector<Matrix> derivatives(const ReparamCurve& curve, int max_order = 3);

/// Gram-Schmidt frame (e1, e2, e3) per sample. rank[i] counts how many of
/// the three vectors are defined at sample i; undefined rows are zero.
struct Frames {
    Matrix e1, e2, e3;
    std::vector<std::uint8_t> rank;
};

Frames gram_schmidt_frames(const Matrix& d1, const Matrix& d2, const Matrix& d3, double step,
                           double tolerance = kGramSchmidtTolerance);

struct CurvatureSignature {
    std::vector<double> k1;
    std::vector<double> k2;
    /// 1 where the tangent is defined; zero-filled curvature elsewhere.
    std::vector<std::uint8_t> valid;
    /// Frame rank per sample (0..3), kept for diagnostics.
    std::vector<std::uint8_t> rank;
    double arc_step = 0.0;
    double total_length = 0.0;

    std::size_t grid_size() const { return k1.size(); }
    /// Arclength s_i = i * arc_step.
    std::vector<double> arclength() const;
};

struct Options {
    double tolerance = kGramSchmidtTolerance;
    /// Gaussian pre-smoothing sigma in samples; 0 disables.
    double smoothing_sigma = 0.0;
};

/// First and second curvature of a uniformly arclength-sampled curve.
///
/// k1 = |X'' - <X'',e1> e1| / |X'|^2 and k2 = <de2/ds, e3> / |X'|, with de2/ds
/// differenced across the e2 field after aligning neighbour signs with the
/// centre sample. Dividing by |X'| keeps both exact when the discrete curve is
/// only approximately unit speed. Throws ErrorCode::Degenerate when no sample
/// has a tangent.
CurvatureSignature frenet_curvatures(const ReparamCurve& curve, const Options& options = {});

/// CSV with header "s,k1,k2,valid" and round-trip decimal values.
void write_csv(std::ostream& out, const CurvatureSignature& sig);
void write_csv(const std::filesystem::path& path, const CurvatureSignature& sig);

/// CRV with T = N, H = 1, W = 2 (k1, k2).
void write_crv(const std::filesystem::path& path, const CurvatureSignature& sig);

} // namespace curvsig::frenet

#endif // CURVSIG_FRENET_HPP
