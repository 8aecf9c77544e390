#include <numeric>
#include <stdexcept>
#include <string>

#include "nids/evaluation.hpp"
#include "nids/random.hpp"

namespace nids {

std::vector<std::vector<std::size_t>> kfold_partition(std::size_t rows, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("k-fold: at least two folds are required");
    if (folds > rows)
        throw DataError("k-fold: " + std::to_string(folds) + " folds exceed the " + std::to_string(rows) + " rows");
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), 0);
    auto eng = make_engine(seed, 0xf01d);
    shuffle(order, eng);

    std::vector<std::vector<std::size_t>> out(folds);
    std::size_t start = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t size = rows / folds + (f < rows % folds ? 1 : 0);
        out[f].assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                      order.begin() + static_cast<std::ptrdiff_t>(start + size));
        start += size;
    }
    return out;
}

double kfold_cv(const Dataset& d, const HyperParams& hp, std::size_t folds, std::uint64_t seed) {
    const auto parts = kfold_partition(d.rows(), folds, seed);
    double total = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_rows;
        train_rows.reserve(d.rows() - parts[f].size());
        for (std::size_t g = 0; g < folds; ++g) {
            if (g != f) train_rows.insert(train_rows.end(), parts[g].begin(), parts[g].end());
        }
        const auto train = subset(d, train_rows);
        const auto held_out = subset(d, parts[f]);
        const auto model = fit(train, hp, derive_seed(seed, f));
        total += accuracy(predict(model, held_out.features), held_out.labels);
    }
    return total / static_cast<double>(folds);
}

}  // namespace nids
