#include "nids/smote.hpp"

#include <algorithm>
#include <queue>
#include <string>
#include <utility>

#include "nids/parallel.hpp"
#include "nids/random.hpp"

namespace nids {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

std::vector<double> interpolate(std::span<const double> base, std::span<const double> neighbor, double gap) {
    if (base.size() != neighbor.size()) throw std::invalid_argument("interpolate: width mismatch");
    std::vector<double> out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + gap * (neighbor[i] - base[i]);
    return out;
}

std::vector<std::size_t> nearest_neighbors(const Matrix& points, std::span<const std::size_t> candidates,
                                           std::size_t self, std::size_t k) {
    // Max-heap on (distance, position) keeps the k best; lexicographic pair
    // order gives the lower-index tie-break for free.
    std::priority_queue<std::pair<double, std::size_t>> heap;
    const auto origin = points.row(candidates[self]);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (i == self) continue;
        const std::pair<double, std::size_t> entry{squared_distance(origin, points.row(candidates[i])), i};
        if (heap.size() < k) {
            heap.push(entry);
        } else if (k > 0 && entry < heap.top()) {
            heap.pop();
            heap.push(entry);
        }
    }
    std::vector<std::size_t> out(heap.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = heap.top().second;
        heap.pop();
    }
    return out;
}

SmoteResult oversample_traced(const Dataset& train, const SmoteConfig& cfg) {
    if (cfg.k < 1) throw DataError("SMOTE: k must be at least 1");
    const std::size_t n0 = train.count(0);
    const std::size_t n1 = train.count(1);
    if (n0 == 0 || n1 == 0) throw DataError("SMOTE: training data must contain both classes");
    const Label minority = n1 <= n0 ? 1 : 0;
    const std::size_t current = std::min(n0, n1);
    const std::size_t target = cfg.target_minority_count == 0 ? std::max(n0, n1) : cfg.target_minority_count;
    if (target < current)
        throw DataError("SMOTE: target minority count " + std::to_string(target) + " is below the current count " +
                        std::to_string(current));

    SmoteResult result{train, {}, minority};
    const std::size_t needed = target - current;
    if (needed == 0) return result;
    if (current < 2) throw DataError("SMOTE: minority class has a single instance, no neighbor exists");

    std::vector<std::size_t> members;
    for (std::size_t r = 0; r < train.rows(); ++r) {
        if (train.labels[r] == minority) members.push_back(r);
    }
    const std::size_t m = members.size();
    const std::size_t k = std::min(cfg.k, m - 1);
    const std::size_t bases = std::min(needed, m);

    // Per-base draws, generated independently then interleaved round-robin.
    std::vector<std::vector<SyntheticOrigin>> draws(bases);
    parallel_for(bases, [&](std::size_t j) {
        const std::size_t count = needed / m + (j < needed % m ? 1 : 0);
        const auto neighbors = nearest_neighbors(train.features, members, j, k);
        auto eng = make_engine(cfg.seed, j);
        draws[j].reserve(count);
        for (std::size_t t = 0; t < count; ++t) {
            const std::size_t pick = neighbors[uniform_index(eng, neighbors.size())];
            const double gap = uniform01(eng);
            draws[j].push_back({members[j], members[pick], gap});
        }
    });

    result.origins.reserve(needed);
    for (std::size_t i = 0; i < needed; ++i) {
        const auto& origin = draws[i % m][i / m];
        result.origins.push_back(origin);
        const auto row = interpolate(train.features.row(origin.base_row), train.features.row(origin.neighbor_row),
                                     origin.gap);
        result.data.features.append_row(row);
        result.data.labels.push_back(minority);
    }
    return result;
}

Dataset oversample(const Dataset& train, const SmoteConfig& cfg) { return oversample_traced(train, cfg).data; }

}  // namespace nids
