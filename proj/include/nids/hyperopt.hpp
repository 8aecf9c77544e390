#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nids/classifiers.hpp"
#include "nids/dataset.hpp"
#include "nids/random.hpp"

namespace nids {

// ---------------------------------------------------------------------------
// Search space

struct IntRange {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::int64_t step = 1;
};

struct Categorical {
    std::vector<std::string> values;
};

struct ParamSpec {
    std::string name;
    std::variant<IntRange, Categorical> domain;

    std::size_t size() const;
    bool is_categorical() const { return std::holds_alternative<Categorical>(domain); }
    std::string value_string(std::size_t index) const;
    std::optional<std::size_t> index_of(const std::string& value) const;
};

/// A concrete assignment: one domain index per parameter. For an IntRange the
/// value is lo + index * step; for a Categorical it is values[index].
struct Candidate {
    std::vector<std::size_t> index;

    friend auto operator<=>(const Candidate&, const Candidate&) = default;
};

class SearchSpace {
public:
    SearchSpace() = default;
    explicit SearchSpace(std::vector<ParamSpec> params);

    const std::vector<ParamSpec>& params() const { return params_; }
    std::size_t dims() const { return params_.size(); }

    // Number of distinct candidates, saturating at UINT64_MAX.
    std::uint64_t cardinality() const;

    bool contains(const Candidate& c) const;
    Candidate sample(Engine& eng) const;

    // Mixed-radix rank of a candidate and its inverse.
    std::uint64_t ordinal(const Candidate& c) const;
    Candidate from_ordinal(std::uint64_t ordinal) const;

    // Continuous index-space encoding used by PSO: dimension d spans
    // [0, size_d - 1]. Decoding rounds and clamps.
    std::vector<double> encode(const Candidate& c) const;
    Candidate decode(std::span<const double> position) const;

    // Encoding in the unit cube, used by the GP surrogate.
    std::vector<double> unit_encode(const Candidate& c) const;

    std::int64_t int_value(const Candidate& c, const std::string& name) const;
    std::string value_string(const Candidate& c, const std::string& name) const;
    std::string describe(const Candidate& c) const;

private:
    std::size_t param_index(const std::string& name) const;

    std::vector<ParamSpec> params_;
};

// k in {1, 3, ..., 29}
SearchSpace knn_reference_space();
// trees in {10..250}, criterion in {gini, entropy}
SearchSpace rf_reference_space();
SearchSpace reference_space(ModelKind kind);

HyperParams hyperparams_from(const SearchSpace& space, const Candidate& c, ModelKind kind);

// ---------------------------------------------------------------------------
// Objective and traces

using Objective = std::function<double(const Candidate&)>;

struct Trial {
    Candidate candidate;
    double score = 0.0;
    std::size_t eval_index = 0;
    double wall_time = 0.0;  // seconds
    bool cached = false;     // served from the memo
};

struct OptimizationTrace {
    std::string optimizer;
    std::vector<Trial> trials;
    std::size_t best_index = 0;
    std::size_t budget = 0;
    std::uint64_t seed = 0;

    const Trial& best() const { return trials.at(best_index); }
    // Best score seen after each trial.
    std::vector<double> incumbent_curve() const;
};

/// Memoizes objective values within one optimizer run and records every
/// proposal (memo hits included) as a trial. Proposals beyond the budget are
/// rejected.
class TrialRecorder {
public:
    TrialRecorder(std::string optimizer, const Objective& objective, std::size_t budget, std::uint64_t seed);

    double evaluate(const Candidate& c);
    bool exhausted() const { return trace_.trials.size() >= trace_.budget; }
    std::size_t remaining() const { return trace_.budget - trace_.trials.size(); }
    bool seen(const Candidate& c) const { return memo_.contains(c); }
    std::size_t objective_calls() const { return calls_; }
    const OptimizationTrace& trace() const { return trace_; }
    OptimizationTrace finish() &&;

private:
    const Objective& objective_;
    OptimizationTrace trace_;
    std::map<Candidate, double> memo_;
    std::size_t calls_ = 0;
};

/// Mean k-fold CV accuracy of the classifier described by the candidate.
double evaluate_objective(const Candidate& c, const SearchSpace& space, ModelKind kind, const Dataset& train,
                          std::size_t folds, std::uint64_t seed);

Objective make_cv_objective(const SearchSpace& space, ModelKind kind, const Dataset& train, std::size_t folds,
                            std::uint64_t seed);

// ---------------------------------------------------------------------------
// Random search

/// Uniform sampling without replacement until the space is exhausted, with
/// replacement afterwards.
OptimizationTrace random_search(const SearchSpace& space, const Objective& objective, std::size_t budget,
                                std::uint64_t seed);

// ---------------------------------------------------------------------------
// Particle swarm

struct PsoConfig {
    std::size_t swarm_size = 20;
    std::size_t iterations = 30;  // including the initial evaluation round
    double c1 = 2.0;              // cognition factor
    double c2 = 2.0;              // social factor
    double inertia = 1.0;
    double vmax_fraction = 0.5;   // of the domain width, per dimension
    std::uint64_t seed = 0;
    std::vector<Candidate> initial;  // optional starting positions, cycled over the swarm
};

/// v' = w*v + c1*r1*(pbest - x) + c2*r2*(gbest - x), clamped to +/- vmax
/// per component.
std::vector<double> pso_velocity_update(std::span<const double> v, std::span<const double> x,
                                        std::span<const double> pbest, std::span<const double> gbest,
                                        const PsoConfig& cfg, std::span<const double> vmax,
                                        std::span<const double> r1, std::span<const double> r2);

OptimizationTrace pso_optimize(const SearchSpace& space, const Objective& objective, const PsoConfig& cfg);

// ---------------------------------------------------------------------------
// Genetic algorithm

struct GaConfig {
    std::size_t population = 20;
    std::size_t generations = 30;  // including the initial population
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;    // per gene, uniform resample
    std::size_t elitism = 1;
    std::size_t patience = 10;     // generations without incumbent improvement before stopping
    std::uint64_t seed = 0;
    std::vector<Candidate> initial;  // optional initial chromosomes, cycled over the population
};

struct GaGeneration {
    std::vector<Candidate> population;
    std::vector<double> fitness;
};

OptimizationTrace ga_optimize(const SearchSpace& space, const Objective& objective, const GaConfig& cfg,
                              std::vector<GaGeneration>* history = nullptr);

// ---------------------------------------------------------------------------
// Gaussian-process surrogate

/// GP regression with a squared-exponential kernel (signal variance 1,
/// median-heuristic length scale) on standardized scores. Jitter starts at
/// 1e-6 and escalates by x10 up to 1e-2 if the kernel matrix is not
/// positive definite. The length scale is halved while the fitted mean misses
/// an observation by more than 1e-4.
class GpState {
public:
    static GpState fit(std::vector<std::vector<double>> points, std::vector<double> scores);

    // Posterior mean and standard deviation in score units.
    std::pair<double, double> posterior(std::span<const double> query) const;

    double length_scale() const { return length_scale_; }
    double jitter() const { return jitter_; }
    std::size_t size() const { return points_.size(); }

private:
    double kernel(std::span<const double> a, std::span<const double> b) const;

    std::vector<std::vector<double>> points_;
    std::vector<double> alpha_;
    std::vector<double> chol_;  // lower triangle, row-major n x n
    double length_scale_ = 1.0;
    double jitter_ = 1e-6;
    double score_mean_ = 0.0;
    double score_std_ = 1.0;
};

std::pair<double, double> gp_posterior(const GpState& state, std::span<const double> query);

// Expected improvement over `best` for a maximized objective.
double expected_improvement(double mu, double sigma, double best);

struct BoConfig {
    std::size_t init_points = 5;
    std::size_t pool_size = 256;  // GP: random candidates scored by EI
};

OptimizationTrace bo_gp_optimize(const SearchSpace& space, const Objective& objective, std::size_t budget,
                                 std::uint64_t seed, const BoConfig& cfg = {});

// ---------------------------------------------------------------------------
// Tree Parzen estimator

struct TpeConfig {
    std::size_t init_points = 5;
    double gamma = 0.25;
    std::size_t pool_size = 24;
};

// Indices into `trials` of the good (best n_good by score, ties to the earlier
// eval_index) and bad sets, n_good = max(1, round(gamma * n)).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> tpe_split(std::span<const Trial> trials, double gamma);

/// Per-dimension Parzen densities over the good set (l) and bad set (g).
/// Integer dimensions use truncated Gaussian kernels on the index grid;
/// categorical dimensions use add-one smoothed frequencies.
class TpeModel {
public:
    TpeModel(const SearchSpace& space, std::span<const Candidate> good, std::span<const Candidate> bad);

    double log_good(const Candidate& c) const;
    double log_bad(const Candidate& c) const;
    double log_ratio(const Candidate& c) const { return log_good(c) - log_bad(c); }
    Candidate sample_good(Engine& eng) const;

private:
    struct Dimension {
        std::vector<double> good_pmf;
        std::vector<double> bad_pmf;
    };
    std::vector<Dimension> dims_;
};

// First index of the maximal log l/g ratio.
std::size_t tpe_select(const TpeModel& model, std::span<const Candidate> pool);

OptimizationTrace bo_tpe_optimize(const SearchSpace& space, const Objective& objective, std::size_t budget,
                                  std::uint64_t seed, const TpeConfig& cfg = {});

// ---------------------------------------------------------------------------
// Trace persistence

// One JSON object per line: eval_index, candidate {name: value}, score,
// wall_time, cached.
void write_trace_jsonl(const OptimizationTrace& trace, const SearchSpace& space, std::ostream& out);
OptimizationTrace read_trace_jsonl(std::istream& in, const SearchSpace& space, std::string optimizer = {});
// eval_index,<param names...>,score,wall_time
void write_trace_csv(const OptimizationTrace& trace, const SearchSpace& space, std::ostream& out);

enum class OptimizerId { rs, pso, ga, bo_gp, bo_tpe };
const char* to_string(OptimizerId id);
OptimizerId parse_optimizer(const std::string& s);

}  // namespace nids
