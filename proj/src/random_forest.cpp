#include <cmath>
#include <stdexcept>

#include "nids/classifiers.hpp"
#include "nids/parallel.hpp"

namespace nids {

RandomForestModel rf_fit(const Dataset& train, const HyperParams& hp, std::uint64_t seed) {
    if (hp.variant != ModelKind::random_forest) throw std::invalid_argument("rf_fit: hyper-parameters are not for RF");
    hp.validate();
    if (train.rows() == 0) throw std::invalid_argument("rf_fit: empty training set");

    RandomForestModel model;
    model.criterion = hp.rf_criterion;
    model.n_features = train.cols();
    model.seed = seed;
    model.trees.resize(hp.rf_trees);

    const TreeParams params{hp.rf_criterion,
                            static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(train.cols())))), 2};
    const std::size_t m = train.rows();
    parallel_for(hp.rf_trees, [&](std::size_t t) {
        auto eng = make_engine(seed, t);
        std::vector<std::size_t> bootstrap(m);
        for (auto& r : bootstrap) r = static_cast<std::size_t>(uniform_index(eng, m));
        model.trees[t] = tree_fit(train.features, train.labels, bootstrap, params, eng);
    });
    return model;
}

std::vector<Label> rf_predict(const RandomForestModel& model, const Matrix& queries) {
    if (queries.rows() > 0 && queries.cols() != model.n_features)
        throw std::invalid_argument("rf_predict: query width " + std::to_string(queries.cols()) +
                                    " does not match training width " + std::to_string(model.n_features));
    std::vector<Label> out(queries.rows());
    constexpr std::size_t block = 256;
    const std::size_t blocks = (queries.rows() + block - 1) / block;
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t end = std::min(queries.rows(), (b + 1) * block);
        for (std::size_t q = b * block; q < end; ++q) {
            std::size_t ones = 0;
            for (const auto& tree : model.trees) ones += tree.predict(queries.row(q)) == 1 ? 1 : 0;
            out[q] = 2 * ones > model.trees.size() ? 1 : 0;
        }
    });
    return out;
}

TrainedModel fit(const Dataset& train, const HyperParams& hp, std::uint64_t seed) {
    hp.validate();
    if (hp.variant == ModelKind::knn) return knn_fit(train, hp.knn_k);
    return rf_fit(train, hp, seed);
}

std::vector<Label> predict(const TrainedModel& model, const Matrix& queries) {
    return std::visit(
        [&](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, KnnModel>) {
                return knn_predict(m, queries);
            } else {
                return rf_predict(m, queries);
            }
        },
        model);
}

}  // namespace nids
