#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nids/classifiers.hpp"

namespace nids {

namespace {

constexpr double kMinDecrease = 1e-12;

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;
};

struct PendingNode {
    int node;
    std::size_t begin;
    std::size_t end;
};

TreeNode make_node(std::size_t c0, std::size_t c1) {
    TreeNode node;
    node.counts = {c0, c1};
    node.label = c1 > c0 ? 1 : 0;
    return node;
}

}  // namespace

Label DecisionTree::predict(std::span<const double> x) const {
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
        const auto& node = nodes[static_cast<std::size_t>(i)];
        i = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(i)].label;
}

std::size_t DecisionTree::depth() const {
    if (nodes.empty()) return 0;
    std::vector<std::size_t> level(nodes.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        deepest = std::max(deepest, level[i]);
        if (!nodes[i].is_leaf()) {
            level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
            level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
        }
    }
    return deepest;
}

std::size_t DecisionTree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

DecisionTree tree_fit(const Matrix& x, std::span<const Label> y, std::span<const std::size_t> rows,
                      const TreeParams& params, Engine& eng) {
    if (rows.empty()) throw std::invalid_argument("tree_fit: empty sample");
    const std::size_t n_features = x.cols();
    const std::size_t draw =
        params.feature_subsample == 0 ? n_features : std::min(params.feature_subsample, n_features);

    std::vector<std::size_t> work(rows.begin(), rows.end());
    std::vector<std::size_t> feature_pool(n_features);
    std::vector<std::pair<double, Label>> column;
    column.reserve(work.size());

    DecisionTree tree;
    auto counts_of = [&](std::size_t begin, std::size_t end) {
        std::size_t c1 = 0;
        for (std::size_t i = begin; i < end; ++i) c1 += y[work[i]] == 1 ? 1 : 0;
        return std::array<std::size_t, 2>{end - begin - c1, c1};
    };

    const auto root_counts = counts_of(0, work.size());
    tree.nodes.push_back(make_node(root_counts[0], root_counts[1]));
    std::vector<PendingNode> stack{{0, 0, work.size()}};

    while (!stack.empty()) {
        const PendingNode pending = stack.back();
        stack.pop_back();
        const auto counts = tree.nodes[static_cast<std::size_t>(pending.node)].counts;
        const std::size_t total = counts[0] + counts[1];
        if (counts[0] == 0 || counts[1] == 0 || total < params.min_samples_split) continue;

        const double parent = impurity(counts[0], counts[1], params.criterion);
        std::iota(feature_pool.begin(), feature_pool.end(), 0);
        Split best;
        for (std::size_t f = 0; f < draw; ++f) {
            const std::size_t pick = f + static_cast<std::size_t>(uniform_index(eng, n_features - f));
            std::swap(feature_pool[f], feature_pool[pick]);
            const std::size_t feature = feature_pool[f];

            column.clear();
            for (std::size_t i = pending.begin; i < pending.end; ++i) column.emplace_back(x(work[i], feature), y[work[i]]);
            std::sort(column.begin(), column.end());

            std::size_t left0 = 0;
            std::size_t left1 = 0;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                (column[i].second == 1 ? left1 : left0) += 1;
                const double lo = column[i].first;
                const double hi = column[i + 1].first;
                if (!(lo < hi)) continue;
                const std::size_t nl = left0 + left1;
                const std::size_t nr = total - nl;
                const double weighted =
                    (static_cast<double>(nl) * impurity(left0, left1, params.criterion) +
                     static_cast<double>(nr) * impurity(counts[0] - left0, counts[1] - left1, params.criterion)) /
                    static_cast<double>(total);
                const double decrease = parent - weighted;
                if (decrease > kMinDecrease && decrease > best.decrease) {
                    double threshold = lo + (hi - lo) / 2.0;
                    if (!(threshold < hi)) threshold = lo;
                    best = {static_cast<int>(feature), threshold, decrease};
                }
            }
        }
        if (best.feature < 0) continue;

        const auto f = static_cast<std::size_t>(best.feature);
        const auto mid = std::partition(work.begin() + static_cast<std::ptrdiff_t>(pending.begin),
                                        work.begin() + static_cast<std::ptrdiff_t>(pending.end),
                                        [&](std::size_t r) { return x(r, f) <= best.threshold; });
        const auto split_at = static_cast<std::size_t>(mid - work.begin());
        const auto lc = counts_of(pending.begin, split_at);
        const auto rc = counts_of(split_at, pending.end);

        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(make_node(lc[0], lc[1]));
        const int right = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(make_node(rc[0], rc[1]));
        auto& node = tree.nodes[static_cast<std::size_t>(pending.node)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left;
        node.right = right;
        stack.push_back({right, split_at, pending.end});
        stack.push_back({left, pending.begin, split_at});
    }
    return tree;
}

DecisionTree tree_fit(const Dataset& sample, const TreeParams& params, Engine& eng) {
    std::vector<std::size_t> rows(sample.rows());
    std::iota(rows.begin(), rows.end(), 0);
    return tree_fit(sample.features, sample.labels, rows, params, eng);
}

}  // namespace nids
