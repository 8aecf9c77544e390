#include <unordered_map>

#include "nids/hyperopt.hpp"

namespace nids {

OptimizationTrace random_search(const SearchSpace& space, const Objective& objective, std::size_t budget,
                                std::uint64_t seed) {
    if (space.dims() == 0) throw std::invalid_argument("random_search: empty search space");
    TrialRecorder rec("rs", objective, budget, seed);
    auto eng = make_engine(seed, 0x125);
    const std::uint64_t total = space.cardinality();

    // Lazy Fisher-Yates over candidate ordinals: the sparse map holds only
    // the swapped positions, so memory is O(budget) for any space size.
    std::unordered_map<std::uint64_t, std::uint64_t> swapped;
    auto at = [&](std::uint64_t i) {
        const auto it = swapped.find(i);
        return it == swapped.end() ? i : it->second;
    };
    std::uint64_t drawn = 0;
    while (!rec.exhausted()) {
        if (drawn < total) {
            const std::uint64_t j = drawn + uniform_index(eng, total - drawn);
            const std::uint64_t pick = at(j);
            swapped[j] = at(drawn);
            ++drawn;
            rec.evaluate(space.from_ordinal(pick));
        } else {
            rec.evaluate(space.sample(eng));
        }
    }
    return std::move(rec).finish();
}

}  // namespace nids
