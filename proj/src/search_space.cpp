#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nids/hyperopt.hpp"

namespace nids {

std::size_t ParamSpec::size() const {
    if (const auto* r = std::get_if<IntRange>(&domain)) return static_cast<std::size_t>((r->hi - r->lo) / r->step + 1);
    return std::get<Categorical>(domain).values.size();
}

std::string ParamSpec::value_string(std::size_t index) const {
    if (const auto* r = std::get_if<IntRange>(&domain))
        return std::to_string(r->lo + static_cast<std::int64_t>(index) * r->step);
    return std::get<Categorical>(domain).values.at(index);
}

std::optional<std::size_t> ParamSpec::index_of(const std::string& value) const {
    for (std::size_t i = 0; i < size(); ++i) {
        if (value_string(i) == value) return i;
    }
    return std::nullopt;
}

SearchSpace::SearchSpace(std::vector<ParamSpec> params) : params_(std::move(params)) {
    if (params_.empty()) throw std::invalid_argument("search space has no parameters");
    for (const auto& p : params_) {
        if (const auto* r = std::get_if<IntRange>(&p.domain)) {
            if (r->lo > r->hi) throw std::invalid_argument("parameter '" + p.name + "': lo > hi");
            if (r->step < 1) throw std::invalid_argument("parameter '" + p.name + "': step must be >= 1");
        } else if (std::get<Categorical>(p.domain).values.empty()) {
            throw std::invalid_argument("parameter '" + p.name + "': empty categorical domain");
        }
    }
}

std::uint64_t SearchSpace::cardinality() const {
    std::uint64_t total = 1;
    for (const auto& p : params_) {
        const std::uint64_t s = p.size();
        if (total > std::numeric_limits<std::uint64_t>::max() / s) return std::numeric_limits<std::uint64_t>::max();
        total *= s;
    }
    return total;
}

bool SearchSpace::contains(const Candidate& c) const {
    if (c.index.size() != params_.size()) return false;
    for (std::size_t d = 0; d < params_.size(); ++d) {
        if (c.index[d] >= params_[d].size()) return false;
    }
    return true;
}

Candidate SearchSpace::sample(Engine& eng) const {
    Candidate c;
    c.index.reserve(params_.size());
    for (const auto& p : params_) c.index.push_back(static_cast<std::size_t>(uniform_index(eng, p.size())));
    return c;
}

std::uint64_t SearchSpace::ordinal(const Candidate& c) const {
    std::uint64_t out = 0;
    for (std::size_t d = 0; d < params_.size(); ++d) out = out * params_[d].size() + c.index[d];
    return out;
}

Candidate SearchSpace::from_ordinal(std::uint64_t ordinal) const {
    Candidate c;
    c.index.resize(params_.size());
    for (std::size_t d = params_.size(); d-- > 0;) {
        const std::uint64_t s = params_[d].size();
        c.index[d] = static_cast<std::size_t>(ordinal % s);
        ordinal /= s;
    }
    return c;
}

std::vector<double> SearchSpace::encode(const Candidate& c) const {
    return {c.index.begin(), c.index.end()};
}

Candidate SearchSpace::decode(std::span<const double> position) const {
    if (position.size() != params_.size()) throw std::invalid_argument("decode: dimension mismatch");
    Candidate c;
    c.index.resize(params_.size());
    for (std::size_t d = 0; d < params_.size(); ++d) {
        const double hi = static_cast<double>(params_[d].size() - 1);
        c.index[d] = static_cast<std::size_t>(std::clamp(std::round(position[d]), 0.0, hi));
    }
    return c;
}

std::vector<double> SearchSpace::unit_encode(const Candidate& c) const {
    std::vector<double> out(params_.size(), 0.0);
    for (std::size_t d = 0; d < params_.size(); ++d) {
        const std::size_t s = params_[d].size();
        out[d] = s > 1 ? static_cast<double>(c.index[d]) / static_cast<double>(s - 1) : 0.0;
    }
    return out;
}

std::size_t SearchSpace::param_index(const std::string& name) const {
    for (std::size_t d = 0; d < params_.size(); ++d) {
        if (params_[d].name == name) return d;
    }
    throw std::invalid_argument("search space has no parameter '" + name + "'");
}

std::int64_t SearchSpace::int_value(const Candidate& c, const std::string& name) const {
    const auto d = param_index(name);
    const auto* r = std::get_if<IntRange>(&params_[d].domain);
    if (!r) throw std::invalid_argument("parameter '" + name + "' is categorical");
    return r->lo + static_cast<std::int64_t>(c.index[d]) * r->step;
}

std::string SearchSpace::value_string(const Candidate& c, const std::string& name) const {
    const auto d = param_index(name);
    return params_[d].value_string(c.index[d]);
}

std::string SearchSpace::describe(const Candidate& c) const {
    std::string out;
    for (std::size_t d = 0; d < params_.size(); ++d) {
        if (d > 0) out += ", ";
        out += params_[d].name + "=" + params_[d].value_string(c.index[d]);
    }
    return out;
}

SearchSpace knn_reference_space() { return SearchSpace({{"k", IntRange{1, 29, 2}}}); }

SearchSpace rf_reference_space() {
    return SearchSpace({{"trees", IntRange{10, 250, 1}}, {"criterion", Categorical{{"gini", "entropy"}}}});
}

SearchSpace reference_space(ModelKind kind) {
    return kind == ModelKind::knn ? knn_reference_space() : rf_reference_space();
}

HyperParams hyperparams_from(const SearchSpace& space, const Candidate& c, ModelKind kind) {
    if (!space.contains(c)) throw std::invalid_argument("candidate lies outside the search space");
    HyperParams hp;
    hp.variant = kind;
    if (kind == ModelKind::knn) {
        hp.knn_k = static_cast<std::size_t>(space.int_value(c, "k"));
    } else {
        hp.rf_trees = static_cast<std::size_t>(space.int_value(c, "trees"));
        hp.rf_criterion = parse_criterion(space.value_string(c, "criterion"));
    }
    return hp;
}

std::vector<double> OptimizationTrace::incumbent_curve() const {
    std::vector<double> out;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& t : trials) {
        best = std::max(best, t.score);
        out.push_back(best);
    }
    return out;
}

TrialRecorder::TrialRecorder(std::string optimizer, const Objective& objective, std::size_t budget,
                             std::uint64_t seed)
    : objective_(objective) {
    if (budget < 1) throw std::invalid_argument(optimizer + ": budget must be at least 1");
    trace_.optimizer = std::move(optimizer);
    trace_.budget = budget;
    trace_.seed = seed;
}

double TrialRecorder::evaluate(const Candidate& c) {
    if (exhausted()) throw std::logic_error(trace_.optimizer + ": evaluation budget exceeded");
    Trial trial;
    trial.candidate = c;
    trial.eval_index = trace_.trials.size();
    const auto start = std::chrono::steady_clock::now();
    if (const auto it = memo_.find(c); it != memo_.end()) {
        trial.score = it->second;
        trial.cached = true;
    } else {
        trial.score = objective_(c);
        ++calls_;
        memo_.emplace(c, trial.score);
    }
    trial.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (trace_.trials.empty() || trial.score > trace_.best().score) trace_.best_index = trial.eval_index;
    trace_.trials.push_back(std::move(trial));
    return trace_.trials.back().score;
}

OptimizationTrace TrialRecorder::finish() && { return std::move(trace_); }

const char* to_string(OptimizerId id) {
    switch (id) {
        case OptimizerId::rs: return "rs";
        case OptimizerId::pso: return "pso";
        case OptimizerId::ga: return "ga";
        case OptimizerId::bo_gp: return "bo-gp";
        case OptimizerId::bo_tpe: return "bo-tpe";
    }
    return "?";
}

OptimizerId parse_optimizer(const std::string& s) {
    for (auto id : {OptimizerId::rs, OptimizerId::pso, OptimizerId::ga, OptimizerId::bo_gp, OptimizerId::bo_tpe}) {
        if (s == to_string(id)) return id;
    }
    throw std::invalid_argument("unknown optimizer '" + s + "' (expected rs, pso, ga, bo-gp or bo-tpe)");
}

}  // namespace nids
