#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bo_common.hpp"
#include "nids/hyperopt.hpp"

namespace nids {

namespace {

std::vector<double> uniform_pmf(std::size_t size) { return std::vector<double>(size, 1.0 / static_cast<double>(size)); }

// Mixture of Gaussian kernels centered on the observed indices, each
// truncated to the grid 0..size-1 and renormalized.
std::vector<double> parzen_pmf(std::size_t size, std::vector<std::size_t> centers) {
    if (centers.empty() || size == 1) return uniform_pmf(size);
    std::sort(centers.begin(), centers.end());
    double spacing = 0.0;
    for (std::size_t i = 1; i < centers.size(); ++i)
        spacing = std::max(spacing, static_cast<double>(centers[i] - centers[i - 1]));
    const double bandwidth = std::max(static_cast<double>(size - 1) / 10.0, spacing);

    std::vector<double> pmf(size, 0.0);
    std::vector<double> kernel(size);
    for (std::size_t c : centers) {
        double total = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            const double z = (static_cast<double>(i) - static_cast<double>(c)) / bandwidth;
            kernel[i] = std::exp(-0.5 * z * z);
            total += kernel[i];
        }
        for (std::size_t i = 0; i < size; ++i) pmf[i] += kernel[i] / total;
    }
    for (auto& p : pmf) p /= static_cast<double>(centers.size());
    return pmf;
}

std::vector<double> smoothed_frequencies(std::size_t size, const std::vector<std::size_t>& observed) {
    std::vector<double> pmf(size, 1.0);
    for (std::size_t v : observed) pmf[v] += 1.0;
    const double total = static_cast<double>(observed.size() + size);
    for (auto& p : pmf) p /= total;
    return pmf;
}

std::vector<std::size_t> column(std::span<const Candidate> set, std::size_t d) {
    std::vector<std::size_t> out;
    out.reserve(set.size());
    for (const auto& c : set) out.push_back(c.index.at(d));
    return out;
}

}  // namespace

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> tpe_split(std::span<const Trial> trials, double gamma) {
    if (trials.size() < 2) throw std::invalid_argument("tpe_split: need at least two trials");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("tpe_split: gamma must lie in (0, 1)");
    std::vector<std::size_t> order(trials.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (trials[a].score != trials[b].score) return trials[a].score > trials[b].score;
        return trials[a].eval_index < trials[b].eval_index;
    });
    const auto rounded = static_cast<std::size_t>(std::llround(gamma * static_cast<double>(trials.size())));
    const std::size_t n_good = std::max<std::size_t>(1, rounded);
    std::vector<std::size_t> good(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_good));
    std::vector<std::size_t> bad(order.begin() + static_cast<std::ptrdiff_t>(n_good), order.end());
    return {good, bad};
}

TpeModel::TpeModel(const SearchSpace& space, std::span<const Candidate> good, std::span<const Candidate> bad) {
    for (std::size_t d = 0; d < space.dims(); ++d) {
        const auto& p = space.params()[d];
        const auto g = column(good, d);
        const auto b = column(bad, d);
        if (p.is_categorical()) {
            dims_.push_back({smoothed_frequencies(p.size(), g), smoothed_frequencies(p.size(), b)});
        } else {
            dims_.push_back({parzen_pmf(p.size(), g), parzen_pmf(p.size(), b)});
        }
    }
}

double TpeModel::log_good(const Candidate& c) const {
    double s = 0.0;
    for (std::size_t d = 0; d < dims_.size(); ++d) s += std::log(dims_[d].good_pmf.at(c.index.at(d)));
    return s;
}

double TpeModel::log_bad(const Candidate& c) const {
    double s = 0.0;
    for (std::size_t d = 0; d < dims_.size(); ++d) s += std::log(dims_[d].bad_pmf.at(c.index.at(d)));
    return s;
}

Candidate TpeModel::sample_good(Engine& eng) const {
    Candidate c;
    for (const auto& dim : dims_) {
        double u = uniform01(eng);
        std::size_t pick = dim.good_pmf.size() - 1;
        for (std::size_t i = 0; i < dim.good_pmf.size(); ++i) {
            u -= dim.good_pmf[i];
            if (u < 0.0) {
                pick = i;
                break;
            }
        }
        c.index.push_back(pick);
    }
    return c;
}

std::size_t tpe_select(const TpeModel& model, std::span<const Candidate> pool) {
    if (pool.empty()) throw std::invalid_argument("tpe_select: empty pool");
    std::size_t arg = 0;
    double best = model.log_ratio(pool[0]);
    for (std::size_t i = 1; i < pool.size(); ++i) {
        const double r = model.log_ratio(pool[i]);
        if (r > best) {
            best = r;
            arg = i;
        }
    }
    return arg;
}

OptimizationTrace bo_tpe_optimize(const SearchSpace& space, const Objective& objective, std::size_t budget,
                                  std::uint64_t seed, const TpeConfig& cfg) {
    if (budget == 0) throw std::invalid_argument("bo-tpe: budget must be positive");
    if (cfg.pool_size == 0) throw std::invalid_argument("bo-tpe: pool_size must be positive");
    TrialRecorder rec("bo-tpe", objective, budget, seed);
    auto eng = make_engine(seed, 0x7be);
    const bool enumerable = space.cardinality() <= detail::kEnumerationLimit;

    for (const auto& c : detail::initial_design(space, rec, std::min(std::max<std::size_t>(cfg.init_points, 2), budget), eng))
        rec.evaluate(c);

    while (!rec.exhausted()) {
        const auto& trials = rec.trace().trials;
        if (trials.size() < 2) break;  // single-point space
        const auto [good_idx, bad_idx] = tpe_split(trials, cfg.gamma);
        std::vector<Candidate> good;
        std::vector<Candidate> bad;
        for (std::size_t i : good_idx) good.push_back(trials[i].candidate);
        for (std::size_t i : bad_idx) bad.push_back(trials[i].candidate);
        const TpeModel model(space, good, bad);

        std::vector<Candidate> pool;
        for (std::size_t i = 0; i < cfg.pool_size; ++i) pool.push_back(model.sample_good(eng));
        detail::drop_observed(pool, rec);
        if (pool.empty() && enumerable) pool = detail::unobserved_candidates(space, rec);
        if (pool.empty()) {
            if (enumerable) break;  // every candidate has been evaluated
            continue;
        }
        rec.evaluate(pool[tpe_select(model, pool)]);
    }
    return std::move(rec).finish();
}

}  // namespace nids
