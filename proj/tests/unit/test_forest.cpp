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


#include "curvsig/forest.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace curvsig;
using namespace curvsig::forest;
using testing::error_code_of;

namespace {

// Gaussian clusters around well separated centres.
Dataset clusters(Rng& rng, std::size_t per_class, std::size_t classes, std::size_t features, double spread = 0.1)
{
    Dataset d;
    d.features.resize(Eigen::Index(per_class * classes), Eigen::Index(features));
    for (std::size_t c = 0; c < classes; ++c) {
        d.class_names.push_back("c" + std::to_string(c));
        for (std::size_t i = 0; i < per_class; ++i) {
            const auto row = Eigen::Index(c * per_class + i);
            for (std::size_t f = 0; f < features; ++f)
                d.features(row, Eigen::Index(f)) = double(c) * (f % 2 ? -3.0 : 3.0) + spread * rng.normal();
            d.labels.push_back(int(c));
        }
    }
    return d;
}

std::vector<double> row_of(const Matrix& m, Eigen::Index i)
{
    return {m.row(i).begin(), m.row(i).end()};
}

TreeNode leaf(std::vector<std::uint32_t> votes)
{
    TreeNode n;
    n.votes = std::move(votes);
    return n;
}

ForestModel voting_model(const std::vector<std::vector<std::uint32_t>>& leaves)
{
    ForestModel m;
    m.class_names = {"A", "B"};
    m.n_features = 1;
    m.m_features = 1;
    for (const auto& v : leaves)
        m.trees.emplace_back(std::vector<TreeNode>{leaf(v)});
    return m;
}

} // namespace

TEST_SUITE("forest") {

TEST_CASE("gini values")
{
    const std::vector<double> pure{1.0, 0.0}, even{0.5, 0.5}, skew{0.7, 0.3};
    CHECK(gini(pure) == 0.0);
    CHECK(gini(even) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gini(skew) == doctest::Approx(0.42).epsilon(1e-15));
    const std::vector<double> counts{7, 3};
    CHECK(gini_counts(counts) == doctest::Approx(0.42).epsilon(1e-15));

    const std::vector<double> negative{1.2, -0.2}, short_sum{0.5, 0.4};
    CHECK(error_code_of([&] { gini(negative); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([&] { gini(short_sum); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([] { gini({}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("single class gives pure single-leaf trees")
{
    Dataset d;
    d.features = Matrix::Random(10, 3);
    d.labels.assign(10, 0);
    d.class_names = {"only"};
    const auto model = train(d, {.n_trees = 5});
    for (const auto& t : model.trees)
        CHECK(t.nodes().size() == 1);
    CHECK(evaluate(model, d).accuracy == 1.0);
    const auto p = model.predict(std::vector<double>{0.0, 0.0, 0.0});
    CHECK(p.label == 0);
    CHECK(p.votes == std::vector<double>{1.0});
}

TEST_CASE("root splits on the separating feature")
{
    Rng rng(71);
    Dataset d;
    d.class_names = {"low", "high"};
    d.features.resize(40, 3);
    for (Eigen::Index i = 0; i < 40; ++i) {
        const bool high = i % 2 == 1;
        d.features(i, 0) = high ? rng.uniform(5.5, 9.0) : rng.uniform(1.0, 4.5);
        d.features(i, 1) = rng.uniform();
        d.features(i, 2) = rng.uniform();
        d.labels.push_back(high);
    }
    const auto model = train(d, {.n_trees = 10, .m_features = 3});
    for (const auto& t : model.trees) {
        const auto& root = t.nodes().front();
        CHECK(root.feature == 0);
        CHECK(root.threshold > 4.0);
        CHECK(root.threshold < 6.0);
        CHECK(t.nodes().size() == 3);
    }
    CHECK(evaluate(model, d).accuracy == 1.0);
}

TEST_CASE("plurality vote and ties")
{
    const auto aab = voting_model({{3, 0}, {2, 1}, {0, 4}});
    const auto p = aab.predict(std::vector<double>{0.0});
    CHECK(p.label == 0);
    CHECK(p.votes[0] == doctest::Approx(2.0 / 3.0));
    CHECK(p.votes[1] == doctest::Approx(1.0 / 3.0));

    CHECK(voting_model({{0, 2}, {2, 0}}).predict(std::vector<double>{0.0}).label == 0);
    CHECK(leaf({1, 1, 0}).majority() == 0);
    CHECK(leaf({0, 2, 2}).majority() == 1);

    CHECK(error_code_of([&] { aab.predict(std::vector<double>{0.0, 1.0}); }) == ErrorCode::DimensionMismatch);
    CHECK(error_code_of([&] { aab.predict(std::vector<double>{std::nan("")}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("tree structure validation")
{
    TreeNode split;
    split.feature = 0;
    split.left = 1;
    split.right = 2;
    CHECK_NOTHROW(DecisionTree({split, leaf({1, 0}), leaf({0, 1})}));
    CHECK(error_code_of([&] { DecisionTree({split, leaf({1, 0})}); }) == ErrorCode::Format);
    TreeNode loop = split;
    loop.left = 1;
    loop.right = 1;
    CHECK(error_code_of([&] { DecisionTree({split, loop, leaf({0, 1})}); }) == ErrorCode::Format);
    CHECK(error_code_of([&] { DecisionTree({leaf({})}); }) == ErrorCode::Format);
    CHECK(error_code_of([&] { DecisionTree(std::vector<TreeNode>{}); }) == ErrorCode::Format);
}

TEST_CASE("dataset validation")
{
    Rng rng(73);
    Dataset d = clusters(rng, 3, 2, 2);
    CHECK_NOTHROW(d.validate());
    d.labels[0] = 5;
    CHECK(error_code_of([&] { d.validate(); }) == ErrorCode::InvalidArgument);
    d.labels[0] = 0;
    d.features(1, 1) = std::nan("");
    CHECK(error_code_of([&] { d.validate(); }) == ErrorCode::InvalidArgument);
    d.features(1, 1) = 0.0;
    d.labels.pop_back();
    CHECK(error_code_of([&] { d.validate(); }) == ErrorCode::DimensionMismatch);
    CHECK(error_code_of([&] { train(Dataset{}, {}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("hyperparameter checks")
{
    Rng rng(79);
    const Dataset d = clusters(rng, 5, 2, 4);
    CHECK(Params{}.resolved_m(16) == 4);
    CHECK(Params{}.resolved_m(1) == 1);
    CHECK(Params{.m_features = 2}.resolved_m(16) == 2);
    CHECK(error_code_of([&] { train(d, {.n_trees = 0}); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([&] { train(d, {.m_features = 5}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("bootstrap samples with replacement")
{
    Rng rng(83);
    const auto idx = bootstrap_indices(rng, 1000);
    CHECK(idx.size() == 1000);
    const std::set<std::size_t> distinct(idx.begin(), idx.end());
    CHECK(*distinct.rbegin() < 1000);
    CHECK(double(distinct.size()) / 1000.0 == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(0.05));
}

TEST_CASE("min_leaf bounds leaf size")
{
    Rng rng(89);
    const Dataset d = clusters(rng, 30, 3, 4, 3.0);
    std::vector<std::size_t> rows(d.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Rng tree_rng(1);
    const auto tree = grow_tree(d, rows, 4, 5, tree_rng);
    for (const auto& n : tree.nodes())
        if (n.is_leaf())
            CHECK(std::accumulate(n.votes.begin(), n.votes.end(), 0u) >= 5u);
}

TEST_CASE("serialization round trip")
{
    Rng rng(97);
    const Dataset d = clusters(rng, 15, 3, 5, 2.0);
    auto model = train(d, {.n_trees = 7, .seed = 5});
    model.metadata = {{"config.smoothing", "2"}, {"note", "two words"}};
    const std::string text = model.serialize();
    CHECK(text.rfind("curvsig-forest 1\n", 0) == 0);
    const auto back = ForestModel::parse(text);
    CHECK(back.serialize() == text);
    CHECK(back.meta("note") == "two words");
    CHECK_FALSE(back.meta("missing").has_value());
    for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
        const auto row = row_of(d.features, i);
        CHECK(back.predict(row).votes == model.predict(row).votes);
    }

    std::string future = text;
    future.replace(0, 16, "curvsig-forest 2");
    CHECK(error_code_of([&] { ForestModel::parse(future); }) == ErrorCode::Format);
    CHECK(error_code_of([&] { ForestModel::parse(text.substr(0, text.size() / 2)); }) == ErrorCode::Format);
    CHECK(error_code_of([] { ForestModel::parse(""); }) == ErrorCode::Format);
}

TEST_CASE("evaluation metrics")
{
    Rng rng(101);
    const Dataset d = clusters(rng, 10, 2, 2);
    const auto always_a = voting_model({{1, 0}});
    Dataset one_col = d;
    one_col.features = d.features.leftCols(1);
    one_col.class_names = {"A", "B"};
    const auto m = evaluate(always_a, one_col);
    CHECK(m.accuracy == 0.5);
    CHECK(m.confusion == std::vector<std::vector<std::size_t>>{{10, 0}, {10, 0}});
    CHECK(m.recall[0] == 1.0);
    CHECK(m.recall[1] == 0.0);

    const auto model = train(d, {.n_trees = 5});
    const auto good = evaluate(model, d);
    CHECK(good.accuracy == 1.0);
    CHECK(good.confusion == std::vector<std::vector<std::size_t>>{{10, 0}, {0, 10}});
}

TEST_CASE("stratified folds")
{
    Rng rng(103);
    Dataset d = clusters(rng, 2, 2, 2);
    const auto folds = stratified_folds(d, 2, 1);
    REQUIRE(folds.size() == 2);
    CHECK(folds[0].size() == 2);
    CHECK(folds[1].size() == 2);
    for (const auto& f : folds)
        CHECK(d.labels[f[0]] != d.labels[f[1]]);

    Dataset uneven = clusters(rng, 5, 2, 2);
    uneven.labels[0] = 1;
    uneven.labels[1] = 1;
    uneven.labels[2] = 1;
    try {
        cross_validate(uneven, 3, {.n_trees = 3});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
        CHECK(std::string(e.what()).find("'c0'") != std::string::npos);
    }
    CHECK(error_code_of([&] { cross_validate(d, 1, {}); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([&] { cross_validate(d, 5, {}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("leave-one-out on a single class")
{
    Dataset d;
    d.features = Matrix::Random(6, 2);
    d.labels.assign(6, 0);
    d.class_names = {"only"};
    const auto cv = cross_validate(d, 6, {.n_trees = 3});
    CHECK(cv.mean_accuracy == 1.0);
    CHECK(cv.folds.size() == 6);
}

TEST_CASE("cross validation is deterministic")
{
    Rng rng(107);
    const Dataset d = clusters(rng, 12, 3, 4, 2.5);
    const auto a = cross_validate(d, 4, {.n_trees = 15, .seed = 9});
    const auto b = cross_validate(d, 4, {.n_trees = 15, .seed = 9, .threads = 1});
    CHECK(a.mean_accuracy == b.mean_accuracy);
    CHECK(a.test_rows == b.test_rows);
    CHECK(a.confusion == b.confusion);
    for (std::size_t f = 0; f < a.folds.size(); ++f)
        CHECK(a.folds[f].predictions == b.folds[f].predictions);
    std::size_t total = 0;
    for (const auto& row : a.confusion)
        total += std::accumulate(row.begin(), row.end(), std::size_t{0});
    CHECK(total == d.rows());
}

TEST_CASE("leave one group out")
{
    Rng rng(109);
    const Dataset d = clusters(rng, 6, 2, 3, 0.5);
    std::vector<std::string> groups;
    for (std::size_t i = 0; i < d.rows(); ++i)
        groups.push_back("s" + std::to_string(i % 3));
    const auto cv = cross_validate_groups(d, groups, {.n_trees = 10});
    CHECK(cv.folds.size() == 3);
    CHECK(cv.mean_accuracy == 1.0);
    for (const auto& rows : cv.test_rows)
        for (std::size_t r : rows)
            CHECK(groups[r] == groups[rows.front()]);
    CHECK(error_code_of([&] { cross_validate_groups(d, std::vector<std::string>(d.rows(), "x"), {}); }) ==
          ErrorCode::InvalidArgument);
    CHECK(error_code_of([&] { cross_validate_groups(d, {"a"}, {}); }) == ErrorCode::DimensionMismatch);
}

// ---- properties -----------------------------------------------------------

TEST_CASE("gini bounds")
{
    Rng rng(113);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 1 + rng.below(8);
        std::vector<double> p(k);
        double sum = 0.0;
        for (auto& v : p)
            sum += v = rng.below(4) == 0 ? 0.0 : rng.uniform();
        if (sum == 0.0)
            p[0] = sum = 1.0;
        for (auto& v : p)
            v /= sum;
        const double g = gini(p);
        CHECK(g >= 0.0);
        CHECK(g <= 1.0 - 1.0 / double(k) + 1e-12);
        const bool one_hot = std::count(p.begin(), p.end(), 0.0) == std::ptrdiff_t(k - 1);
        CHECK((g == 0.0) == one_hot);
    }
}

TEST_CASE("monotone feature transforms do not change routing")
{
    Rng rng(127);
    for (int trial = 0; trial < 10; ++trial) {
        const Dataset d = clusters(rng, 12, 3, 4, 2.0);
        Dataset t = d;
        const auto col = Eigen::Index(rng.below(4));
        for (Eigen::Index i = 0; i < t.features.rows(); ++i) {
            const double x = d.features(i, col);
            t.features(i, col) = trial % 2 ? std::exp(0.5 * x) : x * x * x + 2.0 * x;
        }
        std::vector<std::size_t> rows(d.rows());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        Rng ra{std::uint64_t(trial)}, rb{std::uint64_t(trial)};
        const auto a = grow_tree(d, rows, 2, 1, ra);
        const auto b = grow_tree(t, rows, 2, 1, rb);
        REQUIRE(a.nodes().size() == b.nodes().size());
        for (std::size_t n = 0; n < a.nodes().size(); ++n) {
            CHECK(a.nodes()[n].feature == b.nodes()[n].feature);
            CHECK(a.nodes()[n].votes == b.nodes()[n].votes);
        }
        for (Eigen::Index i = 0; i < d.features.rows(); ++i)
            CHECK(&a.leaf_for(row_of(d.features, i)) - a.nodes().data() ==
                  &b.leaf_for(row_of(t.features, i)) - b.nodes().data());
    }
}

TEST_CASE("training is deterministic and thread independent")
{
    Rng rng(131);
    const Dataset d = clusters(rng, 10, 4, 6, 3.0);
    const auto a = train(d, {.n_trees = 12, .seed = 77, .threads = 1});
    const auto b = train(d, {.n_trees = 12, .seed = 77, .threads = 4});
    CHECK(a.serialize() == b.serialize());
    const auto c = train(d, {.n_trees = 12, .seed = 78});
    CHECK(a.serialize() != c.serialize());
}

TEST_CASE("one unrestricted tree fits separable data")
{
    Rng rng(137);
    for (int trial = 0; trial < 10; ++trial) {
        const Dataset d = clusters(rng, 8, 3, 3, 0.3);
        const auto model = train(d, {.n_trees = 1, .m_features = 3, .seed = std::uint64_t(trial)});
        CHECK(evaluate(model, d).accuracy == 1.0);
    }
}

}
