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

#ifndef CURVSIG_INGEST_HPP
#define CURVSIG_INGEST_HPP

#include "curvsig/curve.hpp"
#include "curvsig/types.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

namespace curvsig::ingest {

inline constexpr std::size_t kMinFrames = 4;
inline constexpr int kDefaultResize = 64;
inline constexpr double kDefaultThreshold = 0.1;

/// Ordered frames sharing one H x W shape, T >= 4.
///
/// Frames decoded from images hold intensities in [0,1]. CRV payloads are
/// taken verbatim, so a CRV with H = 1 can carry an arbitrary multivariate
/// series.
class FrameSequence {
public:
    explicit FrameSequence(std::vector<Grid> frames);

    std::size_t size() const { return frames_.size(); }
    std::size_t height() const { return static_cast<std::size_t>(frames_.front().rows()); }
    std::size_t width() const { return static_cast<std::size_t>(frames_.front().cols()); }
    const Grid& operator[](std::size_t t) const { return frames_[t]; }
    const std::vector<Grid>& frames() const { return frames_; }

    friend bool operator==(const FrameSequence& a, const FrameSequence& b);

private:
    std::vector<Grid> frames_;
};

/// Binary masks paired with a FrameSequence; every value is exactly 0 or 1.
class MaskSequence {
public:
    explicit MaskSequence(std::vector<Grid> masks);

    std::size_t size() const { return masks_.size(); }
    const Grid& operator[](std::size_t t) const { return masks_[t]; }

private:
    std::vector<Grid> masks_;
};

/// Loads a directory of .png/.pgm/.bmp images (lexicographic order) or a CRV
/// file. Color images are reduced with 0.299 R + 0.587 G + 0.114 B. When
/// resize_to is set, frames are bilinearly resized to d x d; CRV series with
/// H = 1 are never resized.
FrameSequence load_frames(const std::filesystem::path& path, std::optional<int> resize_to = std::nullopt);

/// Loads masks with the same conventions and thresholds them at 0.5.
MaskSequence load_masks(const std::filesystem::path& path, std::optional<int> resize_to = std::nullopt);

/// Loads one grayscale grid: an image file or a CRV file holding one frame.
Grid load_grid(const std::filesystem::path& path, std::optional<int> resize_to = std::nullopt);

/// Per-pixel median over all frames.
Grid median_background(const FrameSequence& seq);

/// Keeps a pixel where |pixel - background| > threshold and zeroes it
/// otherwise. With binarize, kept pixels become 1.
FrameSequence subtract_background(const FrameSequence& seq, const Grid& background, double threshold,
                                  bool binarize = false);

/// Per-pixel product of frame and mask.
FrameSequence apply_masks(const FrameSequence& seq, const MaskSequence& masks);

/// Mirrors every frame left to right.
FrameSequence flip_horizontal(const FrameSequence& seq);

/// Row t of the curve is frame t in row-major order (D = H * W).
Curve flatten(const FrameSequence& seq);
FrameSequence unflatten(const Curve& curve, std::size_t height, std::size_t width);

/// Writes the frames as a CRV tensor (float32).
void write_frames_crv(const std::filesystem::path& path, const FrameSequence& seq);

} // namespace curvsig::ingest

#endif // CURVSIG_INGEST_HPP
