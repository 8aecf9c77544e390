#pragma once

#include <algorithm>
#include <vector>

#include "nids/hyperopt.hpp"

namespace nids::detail {

// Spaces at most this large are enumerated instead of sampled.
inline constexpr std::uint64_t kEnumerationLimit = 4096;

// Every candidate the recorder has not seen yet, in ordinal order.
inline std::vector<Candidate> unobserved_candidates(const SearchSpace& space, const TrialRecorder& rec) {
    std::vector<Candidate> out;
    for (std::uint64_t o = 0; o < space.cardinality(); ++o) {
        auto c = space.from_ordinal(o);
        if (!rec.seen(c)) out.push_back(std::move(c));
    }
    return out;
}

// Draws up to `count` distinct unseen candidates from the space. Returns fewer
// when the space runs out.
inline std::vector<Candidate> initial_design(const SearchSpace& space, const TrialRecorder& rec, std::size_t count,
                                             Engine& eng) {
    std::vector<Candidate> out;
    if (space.cardinality() <= kEnumerationLimit) {
        auto pool = unobserved_candidates(space, rec);
        shuffle(pool, eng);
        if (pool.size() > count) pool.resize(count);
        return pool;
    }
    while (out.size() < count) {
        auto c = space.sample(eng);
        if (!rec.seen(c) && std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
    }
    return out;
}

// Removes candidates already evaluated, keeping the first copy of duplicates.
inline void drop_observed(std::vector<Candidate>& pool, const TrialRecorder& rec) {
    std::vector<Candidate> kept;
    for (auto& c : pool) {
        if (!rec.seen(c) && std::find(kept.begin(), kept.end(), c) == kept.end()) kept.push_back(std::move(c));
    }
    pool = std::move(kept);
}

}  // namespace nids::detail
