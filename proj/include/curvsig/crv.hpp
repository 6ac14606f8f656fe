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

#ifndef CURVSIG_CRV_HPP
#define CURVSIG_CRV_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace curvsig::crv {

/// In-memory image of a CRV file: "CRV1", then T, H, W as little-endian
/// uint32, then T*H*W little-endian float32 values (frame-major, row-major).
struct Tensor {
    std::uint32_t frames = 0;
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::vector<float> values;

    std::size_t frame_size() const { return std::size_t(height) * width; }
    float at(std::size_t t, std::size_t y, std::size_t x) const
    {
        return values[t * frame_size() + y * width + x];
    }
};

inline constexpr char kMagic[4] = {'C', 'R', 'V', '1'};
inline constexpr std::size_t kHeaderSize = 16;

std::vector<unsigned char> encode(const Tensor& tensor);
Tensor decode(const std::vector<unsigned char>& bytes, const std::string& origin = "<memory>");

void write(const std::filesystem::path& path, const Tensor& tensor);
Tensor read(const std::filesystem::path& path);

/// True if the file starts with the CRV magic.
bool sniff(const std::filesystem::path& path);

} // namespace curvsig::crv

#endif // CURVSIG_CRV_HPP
