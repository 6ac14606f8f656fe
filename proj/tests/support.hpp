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

// Helpers shared by the unit and acceptance tests.

#ifndef CURVSIG_TESTS_SUPPORT_HPP
#define CURVSIG_TESTS_SUPPORT_HPP

#include "curvsig/curve.hpp"
#include "curvsig/error.hpp"
#include "curvsig/rng.hpp"
#include "curvsig/synth.hpp"
#include "curvsig/types.hpp"
#include "tempdir.hpp"

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace testing {

namespace fs = std::filesystem;
using curvsig::Matrix;
using curvsig::Rng;
using curvsig::Vector;

// Smooth closed-form curve: a few low sine/cosine modes along random directions.
inline Matrix random_smooth_curve(Rng& rng, std::size_t count, std::size_t dim, std::size_t modes = 4)
{
    std::vector<Vector> dirs_a, dirs_b;
    std::vector<double> freq;
    for (std::size_t m = 0; m < modes; ++m) {
        Vector a(dim), b(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            a[d] = rng.normal();
            b[d] = rng.normal();
        }
        dirs_a.push_back(a / std::sqrt(double(dim)));
        dirs_b.push_back(b / std::sqrt(double(dim)));
        freq.push_back(rng.uniform(0.5, 2.5));
    }
    return curvsig::synth::sample(
        [&](double t) {
            Vector x = Vector::Zero(dim);
            for (std::size_t m = 0; m < modes; ++m) {
                const double w = 2.0 * std::numbers::pi * freq[m] * t;
                x += dirs_a[m] * std::cos(w) + dirs_b[m] * std::sin(w);
            }
            return x;
        },
        count);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Code of the curvsig::Error thrown by f, or nullopt when nothing is thrown.
template <class F>
std::optional<curvsig::ErrorCode> error_code_of(F&& f)
{
    try {
        f();
    } catch (const curvsig::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

} // namespace testing

#endif // CURVSIG_TESTS_SUPPORT_HPP
