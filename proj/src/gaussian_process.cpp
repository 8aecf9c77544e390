#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bo_common.hpp"
#include "nids/hyperopt.hpp"

namespace nids {

namespace {

constexpr double kInitialJitter = 1e-6;
constexpr double kMaxJitter = 1e-2;
constexpr double kInterpolationTolerance = 1e-4;  // score units
constexpr int kMaxHalvings = 30;

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

// In-place lower Cholesky factor of a row-major n x n matrix.
bool cholesky(std::vector<double>& a, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
        if (!(diag > 0.0)) return false;
        const double ljj = std::sqrt(diag);
        a[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / ljj;
        }
        for (std::size_t k = j + 1; k < n; ++k) a[j * n + k] = 0.0;
    }
    return true;
}

// Solves L y = b.
std::vector<double> forward_solve(const std::vector<double>& l, std::size_t n, std::vector<double> b) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) b[i] -= l[i * n + k] * b[k];
        b[i] /= l[i * n + i];
    }
    return b;
}

// Solves L^T x = y.
std::vector<double> backward_solve(const std::vector<double>& l, std::size_t n, std::vector<double> y) {
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) y[i] -= l[k * n + i] * y[k];
        y[i] /= l[i * n + i];
    }
    return y;
}

}  // namespace

GpState GpState::fit(std::vector<std::vector<double>> points, std::vector<double> scores) {
    if (points.size() != scores.size()) throw std::invalid_argument("GpState::fit: points and scores differ in length");
    for (const auto& p : points) {
        if (p.size() != points.front().size()) throw std::invalid_argument("GpState::fit: ragged points");
    }
    GpState s;
    s.points_ = std::move(points);
    const std::size_t n = s.points_.size();
    if (n == 0) return s;

    double mean = 0.0;
    for (double y : scores) mean += y;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double y : scores) var += (y - mean) * (y - mean);
    var /= static_cast<double>(n);
    s.score_mean_ = mean;
    s.score_std_ = var > 0.0 ? std::sqrt(var) : 1.0;

    std::vector<double> dists;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::sqrt(squared_distance(s.points_[i], s.points_[j]));
            if (d > 0.0) dists.push_back(d);
        }
    }
    if (!dists.empty()) {
        const auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
        std::nth_element(dists.begin(), mid, dists.end());
        double median = *mid;
        if (dists.size() % 2 == 0) median = (median + *std::max_element(dists.begin(), mid)) / 2.0;
        s.length_scale_ = median;
    }

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = (scores[i] - s.score_mean_) / s.score_std_;

    // A smooth kernel over nearby points can be too ill-conditioned to
    // reproduce the observations; the length scale is halved until it does.
    // The mean at an observed point misses its score by jitter * alpha_i.
    for (int halving = 0;; ++halving) {
        bool factored = false;
        for (double jitter = kInitialJitter; jitter <= kMaxJitter * 1.0000001; jitter *= 10.0) {
            std::vector<double> k(n * n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) k[i * n + j] = s.kernel(s.points_[i], s.points_[j]);
                k[i * n + i] += jitter;
            }
            if (cholesky(k, n)) {
                s.chol_ = std::move(k);
                s.jitter_ = jitter;
                s.alpha_ = backward_solve(s.chol_, n, forward_solve(s.chol_, n, y));
                factored = true;
                break;
            }
        }
        if (!factored) throw std::runtime_error("GpState::fit: kernel matrix is not positive definite at jitter 1e-2");
        double miss = 0.0;
        for (double a : s.alpha_) miss = std::max(miss, std::abs(s.jitter_ * a) * s.score_std_);
        if (miss <= kInterpolationTolerance || halving == kMaxHalvings) return s;
        s.length_scale_ /= 2.0;
    }
}

double GpState::kernel(std::span<const double> a, std::span<const double> b) const {
    return std::exp(-0.5 * squared_distance(a, b) / (length_scale_ * length_scale_));
}

std::pair<double, double> GpState::posterior(std::span<const double> query) const {
    const std::size_t n = points_.size();
    if (n == 0) return {score_mean_, score_std_};
    if (query.size() != points_.front().size()) throw std::invalid_argument("GpState::posterior: dimension mismatch");
    std::vector<double> ks(n);
    for (std::size_t i = 0; i < n; ++i) ks[i] = kernel(points_[i], query);
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += ks[i] * alpha_[i];
    const auto v = forward_solve(chol_, n, ks);
    double var = 1.0;
    for (double x : v) var -= x * x;
    return {score_mean_ + score_std_ * mu, score_std_ * std::sqrt(std::max(0.0, var))};
}

std::pair<double, double> gp_posterior(const GpState& state, std::span<const double> query) {
    return state.posterior(query);
}

double expected_improvement(double mu, double sigma, double best) {
    if (sigma < 0.0) throw std::invalid_argument("expected_improvement: sigma must be non-negative");
    const double gain = mu - best;
    if (sigma == 0.0) return std::max(0.0, gain);
    const double z = gain / sigma;
    const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return std::max(0.0, gain * cdf + sigma * pdf);
}

OptimizationTrace bo_gp_optimize(const SearchSpace& space, const Objective& objective, std::size_t budget,
                                 std::uint64_t seed, const BoConfig& cfg) {
    if (budget == 0) throw std::invalid_argument("bo-gp: budget must be positive");
    if (cfg.pool_size == 0) throw std::invalid_argument("bo-gp: pool_size must be positive");
    TrialRecorder rec("bo-gp", objective, budget, seed);
    auto eng = make_engine(seed, 0xb06);
    const bool enumerable = space.cardinality() <= detail::kEnumerationLimit;

    for (const auto& c : detail::initial_design(space, rec, std::min(cfg.init_points, budget), eng)) rec.evaluate(c);

    while (!rec.exhausted()) {
        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        for (const auto& t : rec.trace().trials) {
            if (t.cached) continue;
            xs.push_back(space.unit_encode(t.candidate));
            ys.push_back(t.score);
        }
        const auto gp = GpState::fit(std::move(xs), std::move(ys));
        const double best = rec.trace().best().score;

        std::vector<Candidate> pool;
        if (enumerable && space.cardinality() <= cfg.pool_size) {
            pool = detail::unobserved_candidates(space, rec);
        } else {
            for (std::size_t i = 0; i < cfg.pool_size; ++i) pool.push_back(space.sample(eng));
            detail::drop_observed(pool, rec);
            if (pool.empty() && enumerable) pool = detail::unobserved_candidates(space, rec);
        }
        if (pool.empty()) {
            if (enumerable) break;  // every candidate has been evaluated
            continue;
        }

        std::size_t arg = 0;
        double arg_ei = -1.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const auto [mu, sigma] = gp.posterior(space.unit_encode(pool[i]));
            const double ei = expected_improvement(mu, sigma, best);
            if (ei > arg_ei) {
                arg_ei = ei;
                arg = i;
            }
        }
        rec.evaluate(pool[arg]);
    }
    return std::move(rec).finish();
}

}  // namespace nids
