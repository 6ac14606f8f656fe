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

#ifndef CURVSIG_FOREST_HPP
#define CURVSIG_FOREST_HPP

#include "curvsig/rng.hpp"
#include "curvsig/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace curvsig::forest {

/// Feature rows with class ids in 0..K-1.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> class_names;

    std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }
    std::size_t classes() const { return class_names.size(); }

    /// Throws ErrorCode::InvalidArgument on any broken invariant.
    void validate() const;
    Dataset subset(std::span<const std::size_t> indices) const;
};

/// Eq. sum p_k (1 - p_k). Probabilities must be nonnegative and sum to 1
/// within 1e-9.
double gini(std::span<const double> probabilities);

/// Gini impurity from raw class counts (total > 0).
double gini_counts(std::span<const double> counts);

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<std::uint32_t> votes; // leaves only

    bool is_leaf() const { return feature < 0; }
    /// Majority class of a leaf, lowest id on ties.
    int majority() const;
};

/// Flat CART tree; node 0 is the root. Rows go left when value <= threshold.
class DecisionTree {
public:
    DecisionTree() = default;
    explicit DecisionTree(std::vector<TreeNode> nodes);

    const TreeNode& leaf_for(std::span<const double> row) const;
    int predict(std::span<const double> row) const { return leaf_for(row).majority(); }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t depth() const;

private:
    std::vector<TreeNode> nodes_;
};

struct Params {
    std::size_t n_trees = 100;
    /// Features drawn per node; 0 selects round(sqrt(F)).
    std::size_t m_features = 0;
    std::size_t min_leaf = 1;
    std::uint64_t seed = 42;
    /// Worker threads; 0 uses the hardware concurrency.
    unsigned threads = 0;

    std::size_t resolved_m(std::size_t n_features) const;
};

struct Prediction {
    int label = 0;
    std::vector<double> votes; // sums to 1
};

class ForestModel {
public:
    std::vector<DecisionTree> trees;
    std::vector<std::string> class_names;
    std::size_t n_features = 0;
    std::size_t m_features = 0;
    std::size_t min_leaf = 1;
    std::uint64_t seed = 0;
    /// Free-form key/value lines stored with the model (pipeline config echo).
    std::vector<std::pair<std::string, std::string>> metadata;

    Prediction predict(std::span<const double> row) const;

    /// Versioned text format; thresholds use shortest round-trip decimals.
    std::string serialize() const;
    static ForestModel parse(const std::string& text);

    std::optional<std::string> meta(const std::string& key) const;
};

inline constexpr int kFormatVersion = 1;

/// Bootstrap draw of size m from m rows.
std::vector<std::size_t> bootstrap_indices(Rng& rng, std::size_t m);

/// Grows one unpruned CART tree on the given rows.
DecisionTree grow_tree(const Dataset& data, std::span<const std::size_t> rows, std::size_t m_features,
                       std::size_t min_leaf, Rng& rng);

ForestModel train(const Dataset& data, const Params& params);

struct Metrics {
    double accuracy = 0.0;
    /// Undefined for classes absent from the evaluated rows.
    std::vector<std::optional<double>> recall;
    /// confusion[true][predicted]
    std::vector<std::vector<std::size_t>> confusion;
    std::vector<int> predictions;
};

Metrics evaluate(const ForestModel& model, const Dataset& data);

struct CrossValidation {
    double mean_accuracy = 0.0;
    double stddev_accuracy = 0.0;
    std::vector<Metrics> folds;
    std::vector<std::vector<std::size_t>> test_rows;
    /// Pooled confusion over all held-out rows.
    std::vector<std::vector<std::size_t>> confusion;
};

/// Stratified assignment: each class is shuffled with the seed and dealt
/// round-robin. Throws if a class has fewer rows than folds.
std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& data, std::size_t folds,
                                                       std::uint64_t seed);

CrossValidation cross_validate(const Dataset& data, std::size_t folds, const Params& params);

/// One fold per distinct group (e.g. leave-one-subject-out).
CrossValidation cross_validate_groups(const Dataset& data, const std::vector<std::string>& groups,
                                      const Params& params);

} // namespace curvsig::forest

#endif // CURVSIG_FOREST_HPP
