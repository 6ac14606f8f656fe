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
#include "support.hpp"

#include <doctest.h>

#include <cstring>
#include <fstream>

using namespace curvsig;
using testing::error_code_of;

namespace {

crv::Tensor small_tensor()
{
    crv::Tensor t{3, 2, 2, {}};
    for (int i = 0; i < 12; ++i)
        t.values.push_back(0.25f * float(i) - 1.0f);
    return t;
}

} // namespace

TEST_SUITE("crv") {

TEST_CASE("header is magic then little-endian T, H, W")
{
    const auto bytes = crv::encode(small_tensor());
    REQUIRE(bytes.size() == crv::kHeaderSize + 12 * 4);
    CHECK(std::memcmp(bytes.data(), "CRV1", 4) == 0);
    const unsigned char header[12] = {3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0};
    CHECK(std::memcmp(bytes.data() + 4, header, 12) == 0);
    // 1.0f = 0x3f800000 stored little-endian; value index 8 is 0.25*8-1 = 1.
    const unsigned char one[4] = {0x00, 0x00, 0x80, 0x3f};
    CHECK(std::memcmp(bytes.data() + crv::kHeaderSize + 8 * 4, one, 4) == 0);
}

TEST_CASE("encode/decode round trip is bit exact")
{
    crv::Tensor t{4, 3, 5, {}};
    Rng rng(3);
    for (int i = 0; i < 60; ++i)
        t.values.push_back(float(rng.normal()));
    const auto back = crv::decode(crv::encode(t));
    CHECK(back.frames == 4);
    CHECK(back.height == 3);
    CHECK(back.width == 5);
    REQUIRE(back.values.size() == t.values.size());
    CHECK(std::memcmp(back.values.data(), t.values.data(), t.values.size() * 4) == 0);
    CHECK(back.at(2, 1, 4) == t.values[2 * 15 + 1 * 5 + 4]);
}

TEST_CASE("file round trip and sniff")
{
    testing::TempDir dir("crv");
    const auto path = dir / "a.crv";
    crv::write(path, small_tensor());
    CHECK(crv::sniff(path));
    CHECK(crv::read(path).values == small_tensor().values);

    std::ofstream(dir / "b.crv") << "not a tensor";
    CHECK_FALSE(crv::sniff(dir / "b.crv"));
    CHECK_FALSE(crv::sniff(dir / "missing.crv"));
}

TEST_CASE("malformed payloads are decode errors")
{
    auto bytes = crv::encode(small_tensor());
    SUBCASE("bad magic")
    {
        bytes[3] = '2';
        CHECK(error_code_of([&] { crv::decode(bytes); }) == ErrorCode::Decode);
    }
    SUBCASE("truncated payload")
    {
        bytes.pop_back();
        CHECK(error_code_of([&] { crv::decode(bytes); }) == ErrorCode::Decode);
    }
    SUBCASE("trailing bytes")
    {
        bytes.push_back(0);
        CHECK(error_code_of([&] { crv::decode(bytes); }) == ErrorCode::Decode);
    }
    SUBCASE("short header")
    {
        bytes.resize(10);
        CHECK(error_code_of([&] { crv::decode(bytes); }) == ErrorCode::Decode);
    }
}

TEST_CASE("missing file is an io error")
{
    CHECK(error_code_of([] { crv::read("/nonexistent/x.crv"); }) == ErrorCode::Io);
}

}
