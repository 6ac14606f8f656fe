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

#include "curvsig/crv.hpp"

#include "curvsig/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace curvsig::crv {

namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p)
{
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

} // namespace

std::vector<unsigned char> encode(const Tensor& tensor)
{
    const std::size_t count = std::size_t(tensor.frames) * tensor.frame_size();
    if (tensor.values.size() != count)
        fail(ErrorCode::InvalidArgument, "CRV tensor holds " + std::to_string(tensor.values.size()) +
                                             " values, header implies " + std::to_string(count));
    std::vector<unsigned char> out;
    out.reserve(kHeaderSize + 4 * count);
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_u32(out, tensor.frames);
    put_u32(out, tensor.height);
    put_u32(out, tensor.width);
    for (float f : tensor.values)
        put_u32(out, std::bit_cast<std::uint32_t>(f));
    return out;
}

Tensor decode(const std::vector<unsigned char>& bytes, const std::string& origin)
{
    if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, 4) != 0)
        fail(ErrorCode::Decode, origin + ": not a CRV1 file");
    Tensor t;
    t.frames = get_u32(bytes.data() + 4);
    t.height = get_u32(bytes.data() + 8);
    t.width = get_u32(bytes.data() + 12);
    const std::size_t count = std::size_t(t.frames) * t.frame_size();
    if (bytes.size() != kHeaderSize + 4 * count)
        fail(ErrorCode::Decode, origin + ": CRV payload has " + std::to_string(bytes.size() - kHeaderSize) +
                                    " bytes, expected " + std::to_string(4 * count));
    t.values.resize(count);
    const unsigned char* p = bytes.data() + kHeaderSize;
    for (std::size_t i = 0; i < count; ++i, p += 4)
        t.values[i] = std::bit_cast<float>(get_u32(p));
    return t;
}

void write(const std::filesystem::path& path, const Tensor& tensor)
{
    const auto bytes = encode(tensor);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        fail(ErrorCode::Io, "failed writing " + path.string());
}

Tensor read(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::Io, "cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode(bytes, path.string());
}

bool sniff(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    char head[4] = {};
    if (!in.read(head, 4))
        return false;
    return std::memcmp(head, kMagic, 4) == 0;
}

} // namespace curvsig::crv
