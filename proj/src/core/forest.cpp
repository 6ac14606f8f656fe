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

#include "curvsig/error.hpp"
#include "format.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace curvsig::forest {

void Dataset::validate() const
{
    if (rows() < 1)
        fail(ErrorCode::InvalidArgument, "dataset has no rows");
    if (cols() < 1)
        fail(ErrorCode::InvalidArgument, "dataset has no feature columns");
    if (classes() < 1)
        fail(ErrorCode::InvalidArgument, "dataset has no classes");
    if (labels.size() != rows())
        fail(ErrorCode::DimensionMismatch, "dataset has " + std::to_string(rows()) + " rows but " +
                                               std::to_string(labels.size()) + " labels");
    for (int l : labels)
        if (l < 0 || static_cast<std::size_t>(l) >= classes())
            fail(ErrorCode::InvalidArgument, "label " + std::to_string(l) + " outside 0.." +
                                                 std::to_string(classes() - 1));
    if (!features.allFinite())
        fail(ErrorCode::InvalidArgument, "dataset contains NaN or Inf features");
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const
{
    Dataset out;
    out.class_names = class_names;
    out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
    out.labels.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(indices[i]));
        out.labels.push_back(labels[indices[i]]);
    }
    return out;
}

double gini(std::span<const double> p)
{
    if (p.empty())
        fail(ErrorCode::InvalidArgument, "gini of an empty distribution");
    double sum = 0.0, sq = 0.0;
    for (double v : p) {
        if (!(v >= 0.0))
            fail(ErrorCode::InvalidArgument, "negative class probability");
        sum += v;
        sq += v * v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        fail(ErrorCode::InvalidArgument, "class probabilities sum to " + format_double(sum));
    return std::max(0.0, 1.0 - sq);
}

double gini_counts(std::span<const double> counts)
{
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (!(total > 0.0))
        fail(ErrorCode::InvalidArgument, "gini of an empty node");
    double sq = 0.0;
    for (double c : counts)
        sq += c * c;
    return 1.0 - sq / (total * total);
}

int TreeNode::majority() const
{
    return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes))
{
    if (nodes_.empty())
        fail(ErrorCode::Format, "tree has no nodes");
    const int n = static_cast<int>(nodes_.size());
    for (int i = 0; i < n; ++i) {
        const auto& node = nodes_[static_cast<std::size_t>(i)];
        if (node.is_leaf()) {
            if (node.votes.empty())
                fail(ErrorCode::Format, "leaf without votes");
        } else if (node.left <= i || node.left >= n || node.right <= i || node.right >= n) {
            fail(ErrorCode::Format, "tree node has out-of-range children");
        }
    }
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> row) const
{
    const TreeNode* node = &nodes_.front();
    // Children always follow their parent, so this terminates.
    while (!node->is_leaf())
        node = &nodes_[static_cast<std::size_t>(row[static_cast<std::size_t>(node->feature)] <= node->threshold
                                                    ? node->left
                                                    : node->right)];
    return *node;
}

std::size_t DecisionTree::depth() const
{
    std::vector<std::size_t> d(nodes_.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        best = std::max(best, d[i]);
        if (!nodes_[i].is_leaf()) {
            d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
        }
    }
    return best;
}

std::size_t Params::resolved_m(std::size_t n_features) const
{
    if (m_features == 0)
        return std::clamp<std::size_t>(
            static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n_features)))), 1, n_features);
    if (m_features > n_features)
        fail(ErrorCode::InvalidArgument, "m_features " + std::to_string(m_features) + " exceeds feature count " +
                                             std::to_string(n_features));
    return m_features;
}

std::vector<std::size_t> bootstrap_indices(Rng& rng, std::size_t m)
{
    std::vector<std::size_t> idx(m);
    for (auto& i : idx)
        i = static_cast<std::size_t>(rng.below(m));
    return idx;
}

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0; // n * weighted child impurity
    std::size_t left_count = 0;
};

class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, std::size_t m_features, std::size_t min_leaf, Rng& rng)
        : data_(data), m_(m_features), min_leaf_(std::max<std::size_t>(1, min_leaf)), rng_(rng),
          k_(data.classes()), order_(data.cols())
    {
    }

    DecisionTree build(std::vector<std::size_t> rows)
    {
        struct Pending {
            std::vector<std::size_t> rows;
            std::size_t node;
        };
        std::vector<Pending> stack;
        nodes_.emplace_back();
        stack.push_back({std::move(rows), 0});
        while (!stack.empty()) {
            Pending p = std::move(stack.back());
            stack.pop_back();
            const Split split = best_split(p.rows);
            if (split.feature < 0) {
                nodes_[p.node].votes = counts(p.rows);
                continue;
            }
            std::vector<std::size_t> left, right;
            for (std::size_t r : p.rows)
                (value(r, split.feature) <= split.threshold ? left : right).push_back(r);

            const std::size_t l = nodes_.size();
            nodes_.emplace_back();
            nodes_.emplace_back();
            TreeNode& node = nodes_[p.node];
            node.feature = split.feature;
            node.threshold = split.threshold;
            node.left = static_cast<int>(l);
            node.right = static_cast<int>(l + 1);
            // Right pushed first so the left subtree is expanded first.
            stack.push_back({std::move(right), l + 1});
            stack.push_back({std::move(left), l});
        }
        return DecisionTree(std::move(nodes_));
    }

private:
    double value(std::size_t row, int feature) const
    {
        return data_.features(static_cast<Eigen::Index>(row), feature);
    }

    std::vector<std::uint32_t> counts(const std::vector<std::size_t>& rows) const
    {
        std::vector<std::uint32_t> c(k_, 0);
        for (std::size_t r : rows)
            ++c[static_cast<std::size_t>(data_.labels[r])];
        return c;
    }

    // Draws features in random order until m_ non-constant ones have been
    // scanned (or all are exhausted); the best split over those wins, ties
    // going to the lowest feature index and then the lowest threshold.
    Split best_split(const std::vector<std::size_t>& rows)
    {
        Split best;
        const auto c = counts(rows);
        const auto nonzero = std::count_if(c.begin(), c.end(), [](std::uint32_t v) { return v > 0; });
        if (nonzero <= 1 || rows.size() < 2 * min_leaf_)
            return best;

        std::iota(order_.begin(), order_.end(), 0);
        std::vector<Split> candidates;
        std::size_t scanned = 0;
        for (std::size_t drawn = 0; drawn < order_.size() && scanned < m_; ++drawn) {
            const std::size_t pick = drawn + static_cast<std::size_t>(rng_.below(order_.size() - drawn));
            std::swap(order_[drawn], order_[pick]);
            const int feature = static_cast<int>(order_[drawn]);
            bool constant = true;
            const Split s = scan_feature(rows, feature, constant);
            if (constant)
                continue;
            ++scanned;
            if (s.feature >= 0)
                candidates.push_back(s);
        }
        for (const Split& s : candidates)
            if (best.feature < 0 || s.score < best.score ||
                (s.score == best.score &&
                 (s.feature < best.feature || (s.feature == best.feature && s.threshold < best.threshold))))
                best = s;
        return best;
    }

    Split scan_feature(const std::vector<std::size_t>& rows, int feature, bool& constant)
    {
        sorted_.clear();
        for (std::size_t r : rows)
            sorted_.emplace_back(value(r, feature), data_.labels[r]);
        std::sort(sorted_.begin(), sorted_.end());
        constant = sorted_.front().first == sorted_.back().first;

        Split best;
        if (constant)
            return best;
        std::vector<double> left(k_, 0.0), right(k_, 0.0);
        for (const auto& [v, l] : sorted_)
            right[static_cast<std::size_t>(l)] += 1.0;
        double left_sq = 0.0;
        double right_sq = 0.0;
        for (double x : right)
            right_sq += x * x;

        const std::size_t n = sorted_.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const auto cls = static_cast<std::size_t>(sorted_[i].second);
            left_sq += 2.0 * left[cls] + 1.0;
            right_sq -= 2.0 * right[cls] - 1.0;
            left[cls] += 1.0;
            right[cls] -= 1.0;
            if (sorted_[i].first == sorted_[i + 1].first)
                continue;
            const std::size_t nl = i + 1;
            const std::size_t nr = n - nl;
            if (nl < min_leaf_ || nr < min_leaf_)
                continue;
            // n * weighted Gini = n - sum(L^2)/nL - sum(R^2)/nR
            const double score = static_cast<double>(n) - left_sq / static_cast<double>(nl) -
                                 right_sq / static_cast<double>(nr);
            if (best.feature < 0 || score < best.score) {
                best.feature = feature;
                best.score = score;
                best.left_count = nl;
                best.threshold = midpoint(sorted_[i].first, sorted_[i + 1].first);
            }
        }
        return best;
    }

    static double midpoint(double a, double b)
    {
        const double mid = a + 0.5 * (b - a);
        // Guard against the midpoint rounding onto the upper value.
        return mid < b ? mid : a;
    }

    const Dataset& data_;
    std::size_t m_;
    std::size_t min_leaf_;
    Rng& rng_;
    std::size_t k_;
    std::vector<std::size_t> order_;
    std::vector<std::pair<double, int>> sorted_;
    std::vector<TreeNode> nodes_;
};

} // namespace

DecisionTree grow_tree(const Dataset& data, std::span<const std::size_t> rows, std::size_t m_features,
                       std::size_t min_leaf, Rng& rng)
{
    if (rows.empty())
        fail(ErrorCode::InvalidArgument, "cannot grow a tree on zero rows");
    TreeBuilder builder(data, m_features, min_leaf, rng);
    return builder.build(std::vector<std::size_t>(rows.begin(), rows.end()));
}

ForestModel train(const Dataset& data, const Params& params)
{
    data.validate();
    if (params.n_trees < 1)
        fail(ErrorCode::InvalidArgument, "n_trees must be at least 1");

    ForestModel model;
    model.class_names = data.class_names;
    model.n_features = data.cols();
    model.m_features = params.resolved_m(data.cols());
    model.min_leaf = std::max<std::size_t>(1, params.min_leaf);
    model.seed = params.seed;
    model.trees.resize(params.n_trees);

    parallel_for(params.n_trees, params.threads, [&](std::size_t t) {
        Rng rng(stream_seed(params.seed, t));
        const auto rows = bootstrap_indices(rng, data.rows());
        model.trees[t] = grow_tree(data, rows, model.m_features, model.min_leaf, rng);
    });
    return model;
}

Prediction ForestModel::predict(std::span<const double> row) const
{
    if (row.size() != n_features)
        fail(ErrorCode::DimensionMismatch, "feature row has " + std::to_string(row.size()) + " values, model expects " +
                                               std::to_string(n_features));
    for (double v : row)
        if (std::isnan(v))
            fail(ErrorCode::InvalidArgument, "feature row contains NaN");
    if (trees.empty())
        fail(ErrorCode::InvalidArgument, "model has no trees");

    std::vector<std::size_t> tally(class_names.size(), 0);
    for (const auto& tree : trees)
        ++tally[static_cast<std::size_t>(tree.predict(row))];
    Prediction p;
    p.label = static_cast<int>(std::max_element(tally.begin(), tally.end()) - tally.begin());
    p.votes.resize(tally.size());
    for (std::size_t k = 0; k < tally.size(); ++k)
        p.votes[k] = static_cast<double>(tally[k]) / static_cast<double>(trees.size());
    return p;
}

std::optional<std::string> ForestModel::meta(const std::string& key) const
{
    for (const auto& [k, v] : metadata)
        if (k == key)
            return v;
    return std::nullopt;
}

// Text layout, one record per line:
//
//   curvsig-forest <version>
//   n_features <F>
//   m_features <m>
//   min_leaf <n>
//   seed <u64>
//   classes <K>
//   class <name>                      (K lines, id order)
//   meta <key> <value>                (any number)
//   trees <count>
//   tree <nodes>
//   split <feature> <threshold> <left> <right>   |   leaf <v_0> ... <v_K-1>
//   end
std::string ForestModel::serialize() const
{
    std::ostringstream out;
    out << "curvsig-forest " << kFormatVersion << '\n';
    out << "n_features " << n_features << '\n';
    out << "m_features " << m_features << '\n';
    out << "min_leaf " << min_leaf << '\n';
    out << "seed " << seed << '\n';
    out << "classes " << class_names.size() << '\n';
    for (const auto& name : class_names)
        out << "class " << name << '\n';
    for (const auto& [k, v] : metadata)
        out << "meta " << k << ' ' << v << '\n';
    out << "trees " << trees.size() << '\n';
    for (const auto& tree : trees) {
        out << "tree " << tree.nodes().size() << '\n';
        for (const auto& node : tree.nodes()) {
            if (node.is_leaf()) {
                out << "leaf";
                for (auto v : node.votes)
                    out << ' ' << v;
            } else {
                out << "split " << node.feature << ' ' << format_double(node.threshold) << ' ' << node.left << ' '
                    << node.right;
            }
            out << '\n';
        }
    }
    out << "end\n";
    return out.str();
}

namespace {

class LineReader {
public:
    explicit LineReader(const std::string& text) : in_(text) {}

    // Next line split into its first word and the remainder.
    std::pair<std::string, std::string> next(const char* expected)
    {
        std::string line;
        if (!std::getline(in_, line))
            fail(ErrorCode::Format, std::string("model file truncated, expected '") +
                                        (expected ? expected : "a tree node") + "'");
        ++line_no_;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto sp = line.find(' ');
        std::string key = line.substr(0, sp);
        std::string rest = sp == std::string::npos ? std::string() : line.substr(sp + 1);
        if (expected && key != expected)
            error("expected '" + std::string(expected) + "', found '" + key + "'");
        return {key, rest};
    }

    template <class Int>
    Int integer(const char* key)
    {
        const auto [k, rest] = next(key);
        Int v{};
        if (!parse_int(rest, v))
            error(std::string("bad integer for '") + key + "'");
        return v;
    }

    [[noreturn]] void error(const std::string& what) const
    {
        fail(ErrorCode::Format, "model line " + std::to_string(line_no_) + ": " + what);
    }

    bool peek_is(const std::string& key)
    {
        const auto pos = in_.tellg();
        std::string line;
        const bool ok = static_cast<bool>(std::getline(in_, line));
        in_.seekg(pos);
        return ok && line.compare(0, key.size() + 1, key + " ") == 0;
    }

private:
    std::istringstream in_;
    std::size_t line_no_ = 0;
};

std::vector<std::string> split_words(const std::string& s)
{
    std::istringstream in(s);
    std::vector<std::string> words;
    for (std::string w; in >> w;)
        words.push_back(w);
    return words;
}

} // namespace

ForestModel ForestModel::parse(const std::string& text)
{
    LineReader r(text);
    const auto [magic, version] = r.next("curvsig-forest");
    int v = 0;
    if (!parse_int(version, v) || v != kFormatVersion)
        r.error("unsupported model format version '" + version + "'");

    ForestModel m;
    m.n_features = r.integer<std::size_t>("n_features");
    m.m_features = r.integer<std::size_t>("m_features");
    m.min_leaf = r.integer<std::size_t>("min_leaf");
    m.seed = r.integer<std::uint64_t>("seed");
    const auto k = r.integer<std::size_t>("classes");
    if (k < 1)
        r.error("model needs at least one class");
    for (std::size_t i = 0; i < k; ++i)
        m.class_names.push_back(r.next("class").second);
    while (r.peek_is("meta")) {
        const auto rest = r.next("meta").second;
        const auto sp = rest.find(' ');
        m.metadata.emplace_back(rest.substr(0, sp), sp == std::string::npos ? "" : rest.substr(sp + 1));
    }
    const auto n_trees = r.integer<std::size_t>("trees");
    if (n_trees < 1)
        r.error("model needs at least one tree");
    for (std::size_t t = 0; t < n_trees; ++t) {
        const auto n_nodes = r.integer<std::size_t>("tree");
        std::vector<TreeNode> nodes(n_nodes);
        for (auto& node : nodes) {
            const auto [kind, rest] = r.next(nullptr);
            const auto words = split_words(rest);
            if (kind == "leaf") {
                if (words.size() != k)
                    r.error("leaf must carry one count per class");
                for (const auto& w : words) {
                    std::uint32_t c = 0;
                    if (!parse_int(w, c))
                        r.error("bad leaf count '" + w + "'");
                    node.votes.push_back(c);
                }
            } else if (kind == "split") {
                if (words.size() != 4 || !parse_int(words[0], node.feature) || !parse_double(words[1], node.threshold) ||
                    !parse_int(words[2], node.left) || !parse_int(words[3], node.right))
                    r.error("malformed split record");
                if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= m.n_features)
                    r.error("split feature out of range");
            } else {
                r.error("expected 'leaf' or 'split', found '" + kind + "'");
            }
        }
        m.trees.emplace_back(std::move(nodes));
    }
    r.next("end");
    if (m.m_features < 1 || m.m_features > m.n_features)
        fail(ErrorCode::Format, "model m_features out of range");
    return m;
}

Metrics evaluate(const ForestModel& model, const Dataset& data)
{
    if (data.rows() == 0)
        fail(ErrorCode::InvalidArgument, "cannot evaluate on an empty dataset");
    data.validate();
    if (data.classes() != model.class_names.size())
        fail(ErrorCode::DimensionMismatch, "dataset and model disagree on the number of classes");

    const std::size_t k = data.classes();
    Metrics m;
    m.confusion.assign(k, std::vector<std::size_t>(k, 0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto row = data.features.row(static_cast<Eigen::Index>(i));
        const int pred = model.predict(std::span<const double>(row.data(), static_cast<std::size_t>(row.size()))).label;
        m.predictions.push_back(pred);
        ++m.confusion[static_cast<std::size_t>(data.labels[i])][static_cast<std::size_t>(pred)];
        correct += pred == data.labels[i];
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(data.rows());
    m.recall.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        const auto total = std::accumulate(m.confusion[c].begin(), m.confusion[c].end(), std::size_t{0});
        if (total > 0)
            m.recall[c] = static_cast<double>(m.confusion[c][c]) / static_cast<double>(total);
    }
    return m;
}

std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& data, std::size_t folds, std::uint64_t seed)
{
    if (folds < 2)
        fail(ErrorCode::InvalidArgument, "cross-validation needs at least 2 folds");
    if (folds > data.rows())
        fail(ErrorCode::InvalidArgument, std::to_string(folds) + " folds exceed " + std::to_string(data.rows()) +
                                             " rows");
    std::vector<std::vector<std::size_t>> by_class(data.classes());
    for (std::size_t i = 0; i < data.rows(); ++i)
        by_class[static_cast<std::size_t>(data.labels[i])].push_back(i);

    Rng rng(stream_seed(seed, 0xf01d5ULL));
    std::vector<std::vector<std::size_t>> out(folds);
    std::size_t deal = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& rows = by_class[c];
        if (rows.empty())
            continue;
        if (rows.size() < folds)
            fail(ErrorCode::InvalidArgument, "class '" + data.class_names[c] + "' has " + std::to_string(rows.size()) +
                                                 " samples, fewer than " + std::to_string(folds) + " folds");
        for (std::size_t i = rows.size(); i > 1; --i)
            std::swap(rows[i - 1], rows[static_cast<std::size_t>(rng.below(i))]);
        for (std::size_t r : rows)
            out[deal++ % folds].push_back(r);
    }
    for (auto& f : out)
        std::sort(f.begin(), f.end());
    return out;
}

namespace {

CrossValidation run_folds(const Dataset& data, const std::vector<std::vector<std::size_t>>& test_sets,
                          const Params& params)
{
    const std::size_t k = data.classes();
    CrossValidation cv;
    cv.confusion.assign(k, std::vector<std::size_t>(k, 0));
    cv.test_rows = test_sets;
    for (const auto& test : test_sets) {
        std::vector<bool> held(data.rows(), false);
        for (std::size_t r : test)
            held[r] = true;
        std::vector<std::size_t> train_rows;
        for (std::size_t i = 0; i < data.rows(); ++i)
            if (!held[i])
                train_rows.push_back(i);
        if (train_rows.empty())
            fail(ErrorCode::InvalidArgument, "a fold leaves no training rows");

        const auto model = train(data.subset(train_rows), params);
        auto metrics = evaluate(model, data.subset(test));
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b)
                cv.confusion[a][b] += metrics.confusion[a][b];
        cv.folds.push_back(std::move(metrics));
    }
    double sum = 0.0;
    for (const auto& f : cv.folds)
        sum += f.accuracy;
    cv.mean_accuracy = sum / static_cast<double>(cv.folds.size());
    double var = 0.0;
    for (const auto& f : cv.folds)
        var += (f.accuracy - cv.mean_accuracy) * (f.accuracy - cv.mean_accuracy);
    cv.stddev_accuracy = std::sqrt(var / static_cast<double>(cv.folds.size()));
    return cv;
}

} // namespace

CrossValidation cross_validate(const Dataset& data, std::size_t folds, const Params& params)
{
    data.validate();
    return run_folds(data, stratified_folds(data, folds, params.seed), params);
}

CrossValidation cross_validate_groups(const Dataset& data, const std::vector<std::string>& groups,
                                      const Params& params)
{
    data.validate();
    if (groups.size() != data.rows())
        fail(ErrorCode::DimensionMismatch, "one group per row is required");
    std::map<std::string, std::vector<std::size_t>> by_group;
    for (std::size_t i = 0; i < groups.size(); ++i)
        by_group[groups[i]].push_back(i);
    if (by_group.size() < 2)
        fail(ErrorCode::InvalidArgument, "group cross-validation needs at least 2 groups");
    std::vector<std::vector<std::size_t>> test_sets;
    for (auto& [name, rows] : by_group)
        test_sets.push_back(std::move(rows));
    return run_folds(data, test_sets, params);
}

} // namespace curvsig::forest
