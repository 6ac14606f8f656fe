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

#ifndef CURVSIG_SYNTH_HPP
#define CURVSIG_SYNTH_HPP

#include "curvsig/curve.hpp"
#include "curvsig/ingest.hpp"
#include "curvsig/rng.hpp"
#include "curvsig/types.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace curvsig::synth {

/// Samples f on a uniform parameter grid of `count` points over [0, 1].
Matrix sample(const std::function<Vector(double)>& f, std::size_t count);

/// Circle of radius r in the first two axes of R^dim, one full turn.
Matrix circle(double radius, std::size_t count, std::size_t dim = 2);

/// Helix (a cos u, a sin u, b u) for u in [0, turns * 2 pi].
Matrix helix(double a, double b, double turns, std::size_t count);

/// Random orthogonal D x D matrix (QR of a Gaussian matrix, signs fixed).
Matrix random_orthogonal(std::size_t dim, Rng& rng);

/// Strictly increasing smooth w: [0,1] -> [0,1], w(0)=0, w(1)=1, built as
/// t + sum a_j sin(j pi t) / (j pi) with sum |a_j| < 1.
class Warp {
public:
    static Warp random(Rng& rng, std::size_t terms = 3, double strength = 0.8);
    double operator()(double t) const;

private:
    std::vector<double> coefficients_;
};

struct Sample {
    Matrix curve; // rows over time
    int label = 0;
};

struct ClassDatasetOptions {
    std::size_t per_class = 20;
    std::size_t frames = 240;
    std::size_t dim = 8;
    double noise = 0.01; // relative to the curve's coordinate amplitude
    std::uint64_t seed = 7;
};

/// Four classes with distinct curvature patterns: circle (constant k1, k2=0),
/// helix (constant k1, k2), figure-eight (oscillating k1, k2=0) and trefoil
/// knot (varying k1, k2). Each sample gets a random warp, rotation into
/// R^dim, translation, scale jitter and additive Gaussian noise.
std::vector<Sample> class_dataset(const ClassDatasetOptions& options);
std::vector<std::string> class_names();

/// A bright Gaussian blob moving along a curved path over a static textured
/// background; H = W = side.
ingest::FrameSequence moving_blob_video(std::size_t frames, std::size_t side, std::uint64_t seed);

/// Writes class_dataset() as CRV files plus manifest.csv into `dir`.
void write_class_dataset(const std::filesystem::path& dir, const ClassDatasetOptions& options);

} // namespace curvsig::synth

#endif // CURVSIG_SYNTH_HPP
