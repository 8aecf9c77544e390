#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nids/dataset.hpp"
#include "nids/random.hpp"

namespace nids {

enum class Criterion { gini, entropy };
enum class ModelKind { knn, random_forest };

const char* to_string(Criterion c);
const char* to_string(ModelKind k);
Criterion parse_criterion(const std::string& s);
ModelKind parse_model_kind(const std::string& s);

struct HyperParams {
    ModelKind variant = ModelKind::random_forest;
    std::size_t knn_k = 5;
    std::size_t rf_trees = 100;
    Criterion rf_criterion = Criterion::gini;

    void validate() const;
    std::string describe() const;

    friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

// Impurity of a two-class node. Throws on an empty node.
double impurity(std::size_t count0, std::size_t count1, Criterion criterion);

// ---------------------------------------------------------------------------
// KNN

struct KnnModel {
    Matrix points;
    std::vector<Label> labels;
    std::size_t k = 1;
};

KnnModel knn_fit(const Dataset& train, std::size_t k);

/// Euclidean k nearest neighbors with distance ties going to the lower row
/// index. Majority vote; an even split takes the nearest neighbor's label.
std::vector<Label> knn_predict(const KnnModel& model, const Matrix& queries);

// ---------------------------------------------------------------------------
// Decision tree

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;     // x[feature] <= threshold
    int right = -1;
    std::array<std::size_t, 2> counts{0, 0};
    Label label = 0;

    bool is_leaf() const { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    Label predict(std::span<const double> x) const;
    std::size_t depth() const;
    std::size_t leaf_count() const;

    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct TreeParams {
    Criterion criterion = Criterion::gini;
    std::size_t feature_subsample = 0;  // 0 means all features
    std::size_t min_samples_split = 2;
};

/// Grows an unpruned tree on the given rows (duplicates allowed, as produced
/// by bootstrap sampling). Each node samples feature_subsample features
/// without replacement and takes the midpoint split with the largest
/// impurity decrease; nodes that are pure, too small, or admit no
/// impurity-decreasing split become leaves.
DecisionTree tree_fit(const Matrix& x, std::span<const Label> y, std::span<const std::size_t> rows,
                      const TreeParams& params, Engine& eng);
DecisionTree tree_fit(const Dataset& sample, const TreeParams& params, Engine& eng);

// ---------------------------------------------------------------------------
// Random forest

struct RandomForestModel {
    std::vector<DecisionTree> trees;
    Criterion criterion = Criterion::gini;
    std::size_t n_features = 0;
    std::uint64_t seed = 0;
};

// Bootstrap of size M per tree, ceil(sqrt(N)) features per split, one RNG
// stream per tree index.
RandomForestModel rf_fit(const Dataset& train, const HyperParams& hp, std::uint64_t seed);

// Majority vote across trees; a tied vote predicts 0.
std::vector<Label> rf_predict(const RandomForestModel& model, const Matrix& queries);

// ---------------------------------------------------------------------------
// Uniform contract

using TrainedModel = std::variant<KnnModel, RandomForestModel>;

TrainedModel fit(const Dataset& train, const HyperParams& hp, std::uint64_t seed);
std::vector<Label> predict(const TrainedModel& model, const Matrix& queries);

// Versioned text dump. Format: first line "nids-model 1", then either
//   knn <k> <rows> <cols>            followed by rows of "<label> <values...>"
//   rf <criterion> <trees> <n_features> <seed>
//     followed per tree by "tree <node_count>" and one line per node:
//     "<feature> <threshold> <left> <right> <count0> <count1> <label>"
void save_model(const TrainedModel& model, std::ostream& out);
TrainedModel load_model(std::istream& in);

}  // namespace nids
