#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <utility>

#include "nids/classifiers.hpp"
#include "nids/parallel.hpp"

namespace nids {

const char* to_string(Criterion c) { return c == Criterion::gini ? "gini" : "entropy"; }
const char* to_string(ModelKind k) { return k == ModelKind::knn ? "knn" : "rf"; }

Criterion parse_criterion(const std::string& s) {
    if (s == "gini") return Criterion::gini;
    if (s == "entropy") return Criterion::entropy;
    throw std::invalid_argument("unknown split criterion '" + s + "'");
}

ModelKind parse_model_kind(const std::string& s) {
    if (s == "knn") return ModelKind::knn;
    if (s == "rf" || s == "random_forest") return ModelKind::random_forest;
    throw std::invalid_argument("unknown classifier '" + s + "'");
}

void HyperParams::validate() const {
    if (variant == ModelKind::knn && knn_k < 1) throw std::invalid_argument("knn_k must be at least 1");
    if (variant == ModelKind::random_forest && rf_trees < 1) throw std::invalid_argument("rf_trees must be at least 1");
}

std::string HyperParams::describe() const {
    if (variant == ModelKind::knn) return "knn(k=" + std::to_string(knn_k) + ")";
    return std::string("rf(trees=") + std::to_string(rf_trees) + ", criterion=" + to_string(rf_criterion) + ")";
}

double impurity(std::size_t count0, std::size_t count1, Criterion criterion) {
    const std::size_t total = count0 + count1;
    if (total == 0) throw std::invalid_argument("impurity: empty node");
    const double p0 = static_cast<double>(count0) / static_cast<double>(total);
    const double p1 = static_cast<double>(count1) / static_cast<double>(total);
    if (criterion == Criterion::gini) return 1.0 - p0 * p0 - p1 * p1;
    double h = 0.0;
    if (p0 > 0.0) h -= p0 * std::log2(p0);
    if (p1 > 0.0) h -= p1 * std::log2(p1);
    return h;
}

KnnModel knn_fit(const Dataset& train, std::size_t k) {
    if (k < 1) throw std::invalid_argument("knn_fit: k must be at least 1");
    if (k > train.rows())
        throw std::invalid_argument("knn_fit: k=" + std::to_string(k) + " exceeds the " + std::to_string(train.rows()) +
                                    " training rows");
    return {train.features, train.labels, k};
}

std::vector<Label> knn_predict(const KnnModel& model, const Matrix& queries) {
    if (queries.rows() > 0 && queries.cols() != model.points.cols())
        throw std::invalid_argument("knn_predict: query width " + std::to_string(queries.cols()) +
                                    " does not match training width " + std::to_string(model.points.cols()));
    std::vector<Label> out(queries.rows());
    constexpr std::size_t block = 64;
    const std::size_t blocks = (queries.rows() + block - 1) / block;
    const std::size_t m = model.points.rows();
    const std::size_t n = model.points.cols();
    parallel_for(blocks, [&](std::size_t b) {
        std::priority_queue<std::pair<double, std::size_t>> heap;
        const std::size_t end = std::min(queries.rows(), (b + 1) * block);
        for (std::size_t q = b * block; q < end; ++q) {
            const auto x = queries.row(q);
            for (std::size_t i = 0; i < m; ++i) {
                const auto p = model.points.row(i);
                double d = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double diff = x[j] - p[j];
                    d += diff * diff;
                }
                if (heap.size() < model.k) {
                    heap.emplace(d, i);
                } else if (std::pair{d, i} < heap.top()) {
                    heap.pop();
                    heap.emplace(d, i);
                }
            }
            std::size_t ones = 0;
            std::size_t nearest = 0;
            while (!heap.empty()) {
                nearest = heap.top().second;  // last popped is the closest
                ones += model.labels[nearest] == 1 ? 1 : 0;
                heap.pop();
            }
            if (2 * ones > model.k) {
                out[q] = 1;
            } else if (2 * ones < model.k) {
                out[q] = 0;
            } else {
                out[q] = model.labels[nearest];
            }
        }
    });
    return out;
}

}  // namespace nids
