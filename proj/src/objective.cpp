#include <algorithm>
#include <stdexcept>

#include "nids/evaluation.hpp"
#include "nids/hyperopt.hpp"

namespace nids {

double evaluate_objective(const Candidate& c, const SearchSpace& space, ModelKind kind, const Dataset& train,
                          std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("evaluate_objective: at least two folds are required");
    if (folds > train.rows())
        throw DataError("evaluate_objective: " + std::to_string(folds) + " folds exceed the " +
                        std::to_string(train.rows()) + " training rows");
    const std::size_t support = std::min(train.count(0), train.count(1));
    if (folds > support)
        throw DataError("evaluate_objective: " + std::to_string(folds) + " folds exceed the smaller class support of " +
                        std::to_string(support) + " rows");
    return kfold_cv(train, hyperparams_from(space, c, kind), folds, seed);
}

Objective make_cv_objective(const SearchSpace& space, ModelKind kind, const Dataset& train, std::size_t folds,
                            std::uint64_t seed) {
    return [space, kind, &train, folds, seed](const Candidate& c) {
        return evaluate_objective(c, space, kind, train, folds, seed);
    };
}

}  // namespace nids
