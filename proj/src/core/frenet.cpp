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

#include "curvsig/frenet.hpp"

#include "curvsig/crv.hpp"
#include "curvsig/error.hpp"
#include "format.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <string>

namespace curvsig::frenet {

namespace {

using Index = Eigen::Index;

// Weighted sum of rows start + k*dir, k = 0..coeffs.size()-1.
template <std::size_t K>
Eigen::RowVectorXd combine(const Matrix& x, Index start, Index dir, const double (&coeffs)[K])
{
    Eigen::RowVectorXd acc = coeffs[0] * x.row(start);
    for (std::size_t k = 1; k < K; ++k)
        acc += coeffs[k] * x.row(start + dir * static_cast<Index>(k));
    return acc;
}

// Second-order one-sided stencils, written for the forward direction. The
// backward stencil reuses them with the sign flipped for odd orders.
constexpr double kFwd1[] = {-3.0, 4.0, -1.0};          // / 2h
constexpr double kFwd2[] = {2.0, -5.0, 4.0, -1.0};     // / h^2
constexpr double kFwd3[] = {-5.0, 18.0, -24.0, 14.0, -3.0}; // / 2h^3

void unit_or_zero(Eigen::Ref<Eigen::RowVectorXd> v, double norm, bool defined)
{
    if (defined)
        v /= norm;
    else
        v.setZero();
}

} // namespace

Matrix derivative(const Matrix& x, double h, int order)
{
    const Index n = x.rows();
    if (n < static_cast<Index>(kMinGridSize))
        fail(ErrorCode::TooShort, "finite differences need at least " + std::to_string(kMinGridSize) +
                                      " samples, got " + std::to_string(n));
    if (!(h > 0.0))
        fail(ErrorCode::InvalidArgument, "sample spacing must be positive");

    Matrix d(n, x.cols());
    switch (order) {
    case 1: {
        const double s = 1.0 / (2.0 * h);
        for (Index i = 1; i + 1 < n; ++i)
            d.row(i) = (x.row(i + 1) - x.row(i - 1)) * s;
        d.row(0) = combine(x, 0, 1, kFwd1) * s;
        d.row(n - 1) = -combine(x, n - 1, -1, kFwd1) * s;
        break;
    }
    case 2: {
        const double s = 1.0 / (h * h);
        for (Index i = 1; i + 1 < n; ++i)
            d.row(i) = (x.row(i + 1) - 2.0 * x.row(i) + x.row(i - 1)) * s;
        d.row(0) = combine(x, 0, 1, kFwd2) * s;
        d.row(n - 1) = combine(x, n - 1, -1, kFwd2) * s;
        break;
    }
    case 3: {
        const double s = 1.0 / (2.0 * h * h * h);
        for (Index i = 2; i + 2 < n; ++i)
            d.row(i) = (x.row(i + 2) - 2.0 * x.row(i + 1) + 2.0 * x.row(i - 1) - x.row(i - 2)) * s;
        for (Index i : {Index{0}, Index{1}})
            d.row(i) = combine(x, i, 1, kFwd3) * s;
        for (Index i : {n - 2, n - 1})
            d.row(i) = -combine(x, i, -1, kFwd3) * s;
        break;
    }
    default:
        fail(ErrorCode::InvalidArgument, "derivative order must be 1, 2 or 3");
    }
    return d;
}

std::vector<Matrix> derivatives(const ReparamCurve& curve, int max_order)
{
    if (max_order < 1 || max_order > 3)
        fail(ErrorCode::InvalidArgument, "derivative order must be 1, 2 or 3");
    std::vector<Matrix> out;
    for (int order = 1; order <= max_order; ++order)
        out.push_back(derivative(curve.samples, curve.arc_step(), order));
    return out;
}

Frames gram_schmidt_frames(const Matrix& d1, const Matrix& d2, const Matrix& d3, double h, double tolerance)
{
    const Index n = d1.rows();
    Frames f;
    f.e1 = d1;
    f.e2 = d2;
    f.e3 = d3;
    f.rank.assign(static_cast<std::size_t>(n), 0);

    for (Index i = 0; i < n; ++i) {
        auto e1 = f.e1.row(i);
        auto e2 = f.e2.row(i);
        auto e3 = f.e3.row(i);

        // Residuals are compared with |X'| after scaling by h and h^2, which
        // puts all three on the same (dimensionless) footing.
        const double speed = e1.norm();
        const bool has1 = speed > tolerance;
        unit_or_zero(e1, speed, has1);
        if (!has1) {
            e2.setZero();
            e3.setZero();
            continue;
        }

        // Modified Gram-Schmidt, applied twice for orthogonality to ~1e-16.
        for (int pass = 0; pass < 2; ++pass)
            e2 -= e2.dot(e1) * e1;
        const double r2 = e2.norm();
        const bool has2 = r2 * h > tolerance * speed;
        unit_or_zero(e2, r2, has2);

        bool has3 = false;
        if (has2) {
            for (int pass = 0; pass < 2; ++pass) {
                e3 -= e3.dot(e1) * e1;
                e3 -= e3.dot(e2) * e2;
            }
            const double r3 = e3.norm();
            has3 = r3 * h * h > tolerance * speed;
            unit_or_zero(e3, r3, has3);
        } else {
            e3.setZero();
        }
        f.rank[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(1 + has2 + has3);
    }
    return f;
}

std::vector<double> CurvatureSignature::arclength() const
{
    std::vector<double> s(grid_size());
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = static_cast<double>(i) * arc_step;
    return s;
}

CurvatureSignature frenet_curvatures(const ReparamCurve& input, const Options& options)
{
    if (input.grid_size() < kMinGridSize)
        fail(ErrorCode::TooShort, "curvature needs a grid of at least " + std::to_string(kMinGridSize) +
                                      " samples, got " + std::to_string(input.grid_size()));
    const ReparamCurve curve = gaussian_smooth(input, options.smoothing_sigma);
    const double h = curve.arc_step();
    const auto d = derivatives(curve, 3);
    const Frames fr = gram_schmidt_frames(d[0], d[1], d[2], h, options.tolerance);

    const Index n = d[0].rows();
    CurvatureSignature sig;
    sig.arc_step = h;
    sig.total_length = curve.total_length;
    sig.k1.assign(static_cast<std::size_t>(n), 0.0);
    sig.k2.assign(static_cast<std::size_t>(n), 0.0);
    sig.valid.assign(static_cast<std::size_t>(n), 0);
    sig.rank = fr.rank;

    std::vector<double> speed(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        speed[static_cast<std::size_t>(i)] = d[0].row(i).norm();

    bool any_valid = false;
    for (Index i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (fr.rank[ui] < 1)
            continue;
        any_valid = true;
        sig.valid[ui] = 1;
        if (fr.rank[ui] < 2)
            continue;
        // <X'', e2> is the residual norm of X'' after removing e1.
        sig.k1[ui] = d[1].row(i).dot(fr.e2.row(i)) / (speed[ui] * speed[ui]);
    }
    if (!any_valid)
        fail(ErrorCode::Degenerate, "no sample has a defined tangent");

    // e2 of neighbour j, sign-aligned with e2 at the centre.
    auto aligned_e2 = [&](Index j, Index centre) -> Eigen::RowVectorXd {
        Eigen::RowVectorXd v = fr.e2.row(j);
        if (v.dot(fr.e2.row(centre)) < 0.0)
            v = -v;
        return v;
    };
    auto has_e2 = [&](Index j) { return fr.rank[static_cast<std::size_t>(j)] >= 2; };

    for (Index i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (fr.rank[ui] < 3)
            continue;
        Eigen::RowVectorXd de2;
        if (i > 0 && i + 1 < n) {
            if (!has_e2(i - 1) || !has_e2(i + 1))
                continue;
            de2 = (aligned_e2(i + 1, i) - aligned_e2(i - 1, i)) / (2.0 * h);
        } else {
            const Index dir = i == 0 ? 1 : -1;
            if (!has_e2(i + dir) || !has_e2(i + 2 * dir))
                continue;
            de2 = (-3.0 * fr.e2.row(i) + 4.0 * aligned_e2(i + dir, i) - aligned_e2(i + 2 * dir, i)) *
                  (static_cast<double>(dir) / (2.0 * h));
        }
        sig.k2[ui] = de2.dot(fr.e3.row(i)) / speed[ui];
    }
    return sig;
}

void write_csv(std::ostream& out, const CurvatureSignature& sig)
{
    out << "s,k1,k2,valid\n";
    const auto s = sig.arclength();
    for (std::size_t i = 0; i < sig.grid_size(); ++i)
        out << format_double(s[i]) << ',' << format_double(sig.k1[i]) << ',' << format_double(sig.k2[i]) << ','
            << int(sig.valid[i]) << '\n';
}

void write_csv(const std::filesystem::path& path, const CurvatureSignature& sig)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    write_csv(out, sig);
    if (!out)
        fail(ErrorCode::Io, "failed writing " + path.string());
}

void write_crv(const std::filesystem::path& path, const CurvatureSignature& sig)
{
    crv::Tensor t;
    t.frames = static_cast<std::uint32_t>(sig.grid_size());
    t.height = 1;
    t.width = 2;
    t.values.reserve(2 * sig.grid_size());
    for (std::size_t i = 0; i < sig.grid_size(); ++i) {
        t.values.push_back(static_cast<float>(sig.k1[i]));
        t.values.push_back(static_cast<float>(sig.k2[i]));
    }
    crv::write(path, t);
}

} // namespace curvsig::frenet
