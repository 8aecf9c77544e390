#include <algorithm>
#include <stdexcept>

#include "bo_common.hpp"
#include "nids/hyperopt.hpp"

namespace nids {

std::vector<double> pso_velocity_update(std::span<const double> v, std::span<const double> x,
                                        std::span<const double> pbest, std::span<const double> gbest,
                                        const PsoConfig& cfg, std::span<const double> vmax,
                                        std::span<const double> r1, std::span<const double> r2) {
    const std::size_t dims = v.size();
    if (x.size() != dims || pbest.size() != dims || gbest.size() != dims || vmax.size() != dims ||
        r1.size() != dims || r2.size() != dims)
        throw std::invalid_argument("pso_velocity_update: dimension mismatch");
    std::vector<double> out(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        const double next = cfg.inertia * v[d] + cfg.c1 * r1[d] * (pbest[d] - x[d]) + cfg.c2 * r2[d] * (gbest[d] - x[d]);
        out[d] = std::clamp(next, -vmax[d], vmax[d]);
    }
    return out;
}

OptimizationTrace pso_optimize(const SearchSpace& space, const Objective& objective, const PsoConfig& cfg) {
    if (space.dims() == 0) throw std::invalid_argument("pso: empty search space");
    if (cfg.swarm_size < 2) throw std::invalid_argument("pso: swarm_size must be at least 2");
    if (cfg.iterations < 1) throw std::invalid_argument("pso: iterations must be at least 1");
    if (!(cfg.c1 > 0.0 && cfg.c2 > 0.0)) throw std::invalid_argument("pso: c1 and c2 must be positive");

    const std::size_t dims = space.dims();
    TrialRecorder rec("pso", objective, cfg.swarm_size * cfg.iterations, cfg.seed);
    auto eng = make_engine(cfg.seed, 0x9503);

    std::vector<double> upper(dims);
    std::vector<double> vmax(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        upper[d] = static_cast<double>(space.params()[d].size() - 1);
        vmax[d] = cfg.vmax_fraction * upper[d];
    }

    struct Particle {
        std::vector<double> x;
        std::vector<double> v;
        std::vector<double> best_x;
        double best_score = 0.0;
    };
    std::vector<Particle> swarm(cfg.swarm_size);
    std::vector<double> gbest;
    double gbest_score = 0.0;

    for (std::size_t i = 0; i < swarm.size(); ++i) {
        auto& p = swarm[i];
        p.x.resize(dims);
        p.v.resize(dims);
        if (!cfg.initial.empty()) p.x = space.encode(cfg.initial[i % cfg.initial.size()]);
        for (std::size_t d = 0; d < dims; ++d) {
            if (cfg.initial.empty()) p.x[d] = uniform01(eng) * upper[d];
            p.v[d] = (2.0 * uniform01(eng) - 1.0) * vmax[d];
        }
        p.best_x = p.x;
        p.best_score = rec.evaluate(space.decode(p.x));
        if (gbest.empty() || p.best_score > gbest_score) {
            gbest = p.best_x;
            gbest_score = p.best_score;
        }
    }

    // Replaces `c` with an unevaluated candidate; false once a small space is exhausted.
    const auto reseed = [&](Candidate& c) {
        if (space.cardinality() <= detail::kEnumerationLimit) {
            const auto pool = detail::unobserved_candidates(space, rec);
            if (pool.empty()) return false;
            c = pool[static_cast<std::size_t>(uniform_index(eng, pool.size()))];
            return true;
        }
        for (int attempt = 0; attempt < 64; ++attempt) {
            auto s = space.sample(eng);
            if (!rec.seen(s)) {
                c = std::move(s);
                return true;
            }
        }
        return false;
    };

    std::vector<double> r1(dims);
    std::vector<double> r2(dims);
    for (std::size_t it = 1; it < cfg.iterations; ++it) {
        // Synchronous update: gbest from the previous iteration drives all particles.
        const auto g = gbest;
        for (auto& p : swarm) {
            for (std::size_t d = 0; d < dims; ++d) {
                r1[d] = uniform01(eng);
                r2[d] = uniform01(eng);
            }
            p.v = pso_velocity_update(p.v, p.x, p.best_x, g, cfg, vmax, r1, r2);
            for (std::size_t d = 0; d < dims; ++d) {
                const double moved = p.x[d] + p.v[d];
                p.x[d] = std::clamp(moved, 0.0, upper[d]);
                if (p.x[d] != moved) p.v[d] = 0.0;  // absorbing wall
            }
            auto c = space.decode(p.x);
            if (rec.seen(c) && reseed(c)) {
                // The particle landed on an evaluated point: restart it elsewhere, keeping its memory.
                p.x = space.encode(c);
                for (std::size_t d = 0; d < dims; ++d) p.v[d] = (2.0 * uniform01(eng) - 1.0) * vmax[d];
            }
            const double score = rec.evaluate(c);
            if (score > p.best_score) {
                p.best_score = score;
                p.best_x = p.x;
            }
            if (score > gbest_score) {
                gbest_score = score;
                gbest = p.x;
            }
        }
    }
    return std::move(rec).finish();
}

}  // namespace nids
