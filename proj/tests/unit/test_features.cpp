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
#include "oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace curvsig;
using namespace curvsig::features;
using testing::error_code_of;

namespace {

frenet::CurvatureSignature make_signature(std::vector<double> k1, std::vector<double> k2)
{
    frenet::CurvatureSignature sig;
    sig.valid.assign(k1.size(), 1);
    sig.rank.assign(k1.size(), 3);
    sig.k1 = std::move(k1);
    sig.k2 = std::move(k2);
    sig.arc_step = 0.1;
    sig.total_length = 0.1 * double(sig.k1.size() - 1);
    return sig;
}

std::vector<double> random_channel(Rng& rng, std::size_t n)
{
    std::vector<double> v(n);
    const double scale = std::exp(rng.uniform(-3.0, 3.0));
    const double shift = rng.uniform(-2.0, 2.0);
    for (auto& x : v)
        x = shift + scale * (rng.below(3) == 0 ? std::pow(rng.uniform(), 3.0) : rng.normal());
    return v;
}

} // namespace

TEST_SUITE("features") {

TEST_CASE("names")
{
    const auto names = feature_names(ChannelMode::K1K2);
    REQUIRE(names.size() == 16);
    CHECK(names[0] == "k1_mean");
    CHECK(names[4] == "k1_wave_rate");
    CHECK(names[7] == "k1_beta");
    CHECK(names[15] == "k2_beta");
    CHECK(feature_names(ChannelMode::K1).size() == 8);
}

TEST_CASE("one to five")
{
    const std::vector<double> v{4, 1, 5, 3, 2};
    const auto s = channel_statistics(v);
    CHECK(s.mean == doctest::Approx(3.0));
    CHECK(s.median == doctest::Approx(3.0));
    CHECK(s.range == doctest::Approx(4.0));
    CHECK(s.stddev == doctest::Approx(std::sqrt(2.0)));
    CHECK(s.wave_rate == doctest::Approx(4.6 - 1.4));
    CHECK(std::abs(s.skewness) < 1e-15);
    CHECK(s.kurtosis == doctest::Approx(1.7));
    CHECK(s.beta == doctest::Approx(1.0 / 1.7));
}

TEST_CASE("constant channel")
{
    const std::vector<double> v(9, 0.3);
    const auto s = channel_statistics(v);
    CHECK(s.mean == doctest::Approx(0.3));
    CHECK(s.median == doctest::Approx(0.3));
    CHECK(s.range == 0.0);
    CHECK(s.stddev < 1e-12);
    CHECK(s.wave_rate == doctest::Approx(0.0));
    CHECK(s.skewness == 0.0);
    CHECK(s.kurtosis == 0.0);
    CHECK(s.beta == 0.0);
}

TEST_CASE("even count median and quantile edges")
{
    const std::vector<double> v{1, 2, 10, 20};
    CHECK(channel_statistics(v).median == doctest::Approx(6.0));
    CHECK(quantile_sorted(v, 0.0) == 1.0);
    CHECK(quantile_sorted(v, 1.0) == 20.0);
    CHECK(quantile_sorted(v, 0.5) == 6.0);
    CHECK(error_code_of([] { quantile_sorted({}, 0.5); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([] { channel_statistics({}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("matches the brute-force oracle")
{
    Rng rng(53);
    for (int trial = 0; trial < 200; ++trial) {
        const auto v = random_channel(rng, 2 + rng.below(300));
        const auto got = channel_statistics(v).as_vector();
        const auto want = oracle::statistics(v);
        const auto scale = oracle::reference_scale(v);
        for (std::size_t k = 0; k < 8; ++k)
            CHECK(std::abs(got[k] - want[k]) <= 1e-10 * std::max(std::abs(want[k]), scale[k]));
    }
}

TEST_CASE("extract uses valid samples only")
{
    auto sig = make_signature({1, 2, 3, 4, 5, 100}, {0, 0, 0, 0, 0, 7});
    sig.valid[5] = 0;
    const auto f = extract_features(sig);
    REQUIRE(f.values.size() == 16);
    CHECK(f.labels == feature_names(ChannelMode::K1K2));
    CHECK(f.values[0] == doctest::Approx(3.0));
    CHECK(f.values[8] == 0.0);
    CHECK(f.values[11] == 0.0);

    const auto k1 = extract_features(sig, {ChannelMode::K1, false});
    CHECK(k1.values.size() == 8);
    CHECK(std::equal(k1.values.begin(), k1.values.end(), f.values.begin()));

    sig.valid.assign(6, 0);
    CHECK(error_code_of([&] { extract_features(sig); }) == ErrorCode::Degenerate);
}

TEST_CASE("boundary exclusion drops two samples per end")
{
    const auto sig = make_signature({50, 50, 1, 2, 3, 50, 50}, std::vector<double>(7, 0.0));
    CHECK(extract_features(sig, {ChannelMode::K1, true}).values[2] == doctest::Approx(2.0));
    CHECK(extract_features(sig, {ChannelMode::K1, false}).values[2] == doctest::Approx(49.0));
}

TEST_CASE("feature matrix")
{
    const auto a = make_signature({1, 3, 2, 5}, {0, 1, 0, 1});
    const std::vector<frenet::CurvatureSignature> none;
    CHECK(feature_matrix(none).rows() == 0);
    CHECK(feature_matrix(none).cols() == 16);

    const std::vector<frenet::CurvatureSignature> two{a, a};
    const Matrix m = feature_matrix(two);
    REQUIRE(m.rows() == 2);
    CHECK(m.row(0) == m.row(1));
    const auto f = extract_features(a).values;
    for (std::size_t k = 0; k < 16; ++k)
        CHECK(m(0, Eigen::Index(k)) == f[k]);

    auto bad = a;
    bad.valid.assign(4, 0);
    const std::vector<frenet::CurvatureSignature> mixed{a, bad};
    try {
        feature_matrix(mixed);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Degenerate);
        CHECK(std::string(e.what()).find("signature 1") != std::string::npos);
    }
}

TEST_CASE("feature csv")
{
    Matrix rows(1, 2);
    rows << 0.5, -2.0;
    std::ostringstream out;
    write_csv(out, {"a", "b"}, rows, {"walk"});
    CHECK(out.str() == "a,b,label\n0.5,-2,walk\n");
}

// ---- properties -----------------------------------------------------------

TEST_CASE("permutation invariance")
{
    Rng rng(59);
    for (int trial = 0; trial < 50; ++trial) {
        auto v = random_channel(rng, 3 + rng.below(100));
        const auto a = channel_statistics(v).as_vector();
        std::shuffle(v.begin(), v.end(), std::mt19937_64(rng.next()));
        CHECK(channel_statistics(v).as_vector() == a);
    }
}

TEST_CASE("translation and positive scaling")
{
    Rng rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        const auto v = random_channel(rng, 5 + rng.below(100));
        const double shift = rng.uniform(-5.0, 5.0);
        const double lambda = std::exp(rng.uniform(-2.0, 2.0));
        std::vector<double> moved(v), scaled(v);
        for (auto& x : moved)
            x += shift;
        for (auto& x : scaled)
            x *= lambda;
        const auto s = channel_statistics(v);
        const auto m = channel_statistics(moved);
        const auto l = channel_statistics(scaled);
        const double tol = 1e-9 * (1.0 + std::abs(shift)) * (s.range + 1.0);

        CHECK(m.mean == doctest::Approx(s.mean + shift).epsilon(1e-10));
        CHECK(std::abs(m.median - (s.median + shift)) < tol);
        CHECK(std::abs(m.range - s.range) < tol);
        CHECK(std::abs(m.stddev - s.stddev) < tol);
        CHECK(std::abs(m.wave_rate - s.wave_rate) < tol);
        CHECK(m.skewness == doctest::Approx(s.skewness).epsilon(1e-6));
        CHECK(m.kurtosis == doctest::Approx(s.kurtosis).epsilon(1e-8));
        CHECK(m.beta == doctest::Approx(s.beta).epsilon(1e-8));

        CHECK(l.mean == doctest::Approx(lambda * s.mean).epsilon(1e-12));
        CHECK(l.median == doctest::Approx(lambda * s.median).epsilon(1e-12));
        CHECK(l.range == doctest::Approx(lambda * s.range).epsilon(1e-12));
        CHECK(l.stddev == doctest::Approx(lambda * s.stddev).epsilon(1e-12));
        CHECK(l.wave_rate == doctest::Approx(lambda * s.wave_rate).epsilon(1e-12));
        CHECK(l.skewness == doctest::Approx(s.skewness).epsilon(1e-9));
        CHECK(l.kurtosis == doctest::Approx(s.kurtosis).epsilon(1e-9));
        CHECK(l.beta == doctest::Approx(s.beta).epsilon(1e-9));
    }
}

TEST_CASE("beta identity and quantile ordering")
{
    Rng rng(67);
    for (int trial = 0; trial < 100; ++trial) {
        const auto v = random_channel(rng, 1 + rng.below(200));
        const auto s = channel_statistics(v);
        if (s.kurtosis > 0.0)
            CHECK(s.beta == doctest::Approx((s.skewness * s.skewness + 1.0) / s.kurtosis).epsilon(1e-15));
        std::vector<double> sorted(v);
        std::sort(sorted.begin(), sorted.end());
        const double q1 = quantile_sorted(sorted, 0.1), q9 = quantile_sorted(sorted, 0.9);
        CHECK(q1 <= s.median);
        CHECK(s.median <= q9);
        CHECK(s.wave_rate <= s.range);
        CHECK(s.range >= 0.0);
        CHECK(s.stddev >= 0.0);
        CHECK(s.kurtosis >= 0.0);
    }
}

}
