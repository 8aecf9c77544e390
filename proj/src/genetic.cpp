#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "bo_common.hpp"
#include "nids/hyperopt.hpp"

namespace nids {

namespace {

// Index into `ranked` drawn with probability proportional to (P - rank).
std::size_t rank_select(std::size_t population, Engine& eng) {
    const double total = static_cast<double>(population * (population + 1)) / 2.0;
    double u = uniform01(eng) * total;
    for (std::size_t r = 0; r < population; ++r) {
        u -= static_cast<double>(population - r);
        if (u < 0.0) return r;
    }
    return population - 1;
}

// Replaces an offspring that repeats an evaluated or sibling chromosome:
// a few single-gene mutations first, then a random unseen candidate when the
// space is small enough to enumerate.
void refresh_duplicate(Candidate& child, const SearchSpace& space, const TrialRecorder& rec,
                       const std::vector<Candidate>& siblings, Engine& eng) {
    const auto fresh = [&](const Candidate& c) {
        return !rec.seen(c) && std::find(siblings.begin(), siblings.end(), c) == siblings.end();
    };
    if (fresh(child)) return;
    for (int attempt = 0; attempt < 16; ++attempt) {
        Candidate trial = child;
        const auto d = static_cast<std::size_t>(uniform_index(eng, space.dims()));
        trial.index[d] = static_cast<std::size_t>(uniform_index(eng, space.params()[d].size()));
        if (fresh(trial)) {
            child = std::move(trial);
            return;
        }
    }
    if (space.cardinality() > detail::kEnumerationLimit) return;
    std::vector<Candidate> pool;
    for (auto& c : detail::unobserved_candidates(space, rec)) {
        if (fresh(c)) pool.push_back(std::move(c));
    }
    if (!pool.empty()) child = pool[static_cast<std::size_t>(uniform_index(eng, pool.size()))];
}

}  // namespace

OptimizationTrace ga_optimize(const SearchSpace& space, const Objective& objective, const GaConfig& cfg,
                              std::vector<GaGeneration>* history) {
    if (space.dims() == 0) throw std::invalid_argument("ga: empty search space");
    if (cfg.population < 2) throw std::invalid_argument("ga: population must be at least 2");
    if (cfg.generations < 1) throw std::invalid_argument("ga: generations must be at least 1");
    if (cfg.crossover_rate < 0.0 || cfg.crossover_rate > 1.0 || cfg.mutation_rate < 0.0 || cfg.mutation_rate > 1.0)
        throw std::invalid_argument("ga: rates must lie in [0, 1]");
    if (cfg.elitism >= cfg.population) throw std::invalid_argument("ga: elitism must be below the population size");

    const std::size_t pop = cfg.population;
    const std::size_t budget = pop + (cfg.generations - 1) * (pop - cfg.elitism);
    TrialRecorder rec("ga", objective, budget, cfg.seed);
    auto eng = make_engine(cfg.seed, 0x6a);

    // a) random initial chromosomes; b) fitness
    GaGeneration gen;
    for (std::size_t i = 0; i < pop; ++i) {
        gen.population.push_back(cfg.initial.empty() ? space.sample(eng) : cfg.initial[i % cfg.initial.size()]);
        gen.fitness.push_back(rec.evaluate(gen.population.back()));
    }
    if (history) history->push_back(gen);

    double incumbent = rec.trace().best().score;
    std::size_t stale = 0;
    for (std::size_t g = 1; g < cfg.generations && stale < cfg.patience; ++g) {
        // c) rank by fitness, descending; earlier position wins ties
        std::vector<std::size_t> ranked(pop);
        std::iota(ranked.begin(), ranked.end(), 0);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [&](std::size_t a, std::size_t b) { return gen.fitness[a] > gen.fitness[b]; });

        // d) keep the elite, replace the rest with offspring
        GaGeneration next;
        for (std::size_t e = 0; e < cfg.elitism; ++e) {
            next.population.push_back(gen.population[ranked[e]]);
            next.fitness.push_back(gen.fitness[ranked[e]]);
        }
        while (next.population.size() < pop) {
            const auto& mother = gen.population[ranked[rank_select(pop, eng)]];
            const auto& father = gen.population[ranked[rank_select(pop, eng)]];
            Candidate child = mother;
            if (uniform01(eng) < cfg.crossover_rate) {
                for (std::size_t d = 0; d < space.dims(); ++d) {
                    if (uniform01(eng) < 0.5) child.index[d] = father.index[d];
                }
            }
            for (std::size_t d = 0; d < space.dims(); ++d) {
                if (uniform01(eng) < cfg.mutation_rate)
                    child.index[d] = static_cast<std::size_t>(uniform_index(eng, space.params()[d].size()));
            }
            if (cfg.mutation_rate > 0.0) refresh_duplicate(child, space, rec, next.population, eng);
            next.fitness.push_back(rec.evaluate(child));
            next.population.push_back(std::move(child));
        }
        gen = std::move(next);
        if (history) history->push_back(gen);

        // e) stop once the incumbent stops improving
        const double best = rec.trace().best().score;
        if (best > incumbent) {
            incumbent = best;
            stale = 0;
        } else {
            ++stale;
        }
    }
    return std::move(rec).finish();
}

}  // namespace nids
