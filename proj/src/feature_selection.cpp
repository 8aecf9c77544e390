#include "nids/feature_selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "nids/parallel.hpp"
#include "text_util.hpp"

namespace nids {

namespace {

// Maps arbitrary codes onto 0..distinct-1 in ascending code order.
std::vector<std::size_t> densify(std::span<const int> values, std::size_t& distinct) {
    std::vector<int> uniq(values.begin(), values.end());
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    distinct = uniq.size();
    std::vector<std::size_t> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = static_cast<std::size_t>(std::lower_bound(uniq.begin(), uniq.end(), values[i]) - uniq.begin());
    return out;
}

std::vector<FeatureScore> rank_scores(const std::vector<FeatureScore>& scores) {
    auto ranked = scores;
    std::stable_sort(ranked.begin(), ranked.end(), [](const FeatureScore& a, const FeatureScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.feature_index < b.feature_index;
    });
    return ranked;
}

std::vector<std::size_t> apply_policy(const std::vector<FeatureScore>& scores, const SelectionPolicy& policy) {
    const auto ranked = rank_scores(scores);
    std::vector<std::size_t> selected;
    if (policy.kind == SelectionPolicy::Kind::top_k) {
        for (std::size_t i = 0; i < std::min(policy.k, ranked.size()); ++i) selected.push_back(ranked[i].feature_index);
    } else {
        const double max_score = ranked.empty() ? 0.0 : ranked.front().score;
        for (const auto& fs : ranked) {
            if (fs.score > 0.0 && fs.score >= policy.fraction * max_score) selected.push_back(fs.feature_index);
        }
    }
    if (selected.empty()) throw DataError("feature selection policy selected zero features");
    return selected;
}

std::vector<double> label_column(const Dataset& d) { return {d.labels.begin(), d.labels.end()}; }

}  // namespace

double entropy(std::span<const int> values) {
    if (values.empty()) throw std::invalid_argument("entropy: empty input");
    std::size_t distinct = 0;
    const auto codes = densify(values, distinct);
    std::vector<std::size_t> counts(distinct, 0);
    for (auto c : codes) ++counts[c];
    const double n = static_cast<double>(values.size());
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

std::vector<int> discretize(std::span<const double> values, const DiscretizationSpec& spec) {
    if (spec.bins < 2) throw std::invalid_argument("discretize: at least two bins are required");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(values.size());
    std::vector<int> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto below = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin());
        out[i] = static_cast<int>(std::floor(static_cast<double>(spec.bins) * below / n));
    }
    return out;
}

double mutual_information_discrete(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("mutual_information: length mismatch (" + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    if (a.empty()) return 0.0;
    std::size_t na = 0;
    std::size_t nb = 0;
    const auto ca = densify(a, na);
    const auto cb = densify(b, nb);
    std::vector<std::size_t> joint(na * nb, 0);
    std::vector<std::size_t> ma(na, 0);
    std::vector<std::size_t> mb(nb, 0);
    for (std::size_t i = 0; i < ca.size(); ++i) {
        ++joint[ca[i] * nb + cb[i]];
        ++ma[ca[i]];
        ++mb[cb[i]];
    }
    const double n = static_cast<double>(a.size());
    double mi = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            const auto c = joint[i * nb + j];
            if (c == 0) continue;
            const double pij = static_cast<double>(c) / n;
            mi += pij * std::log2(pij * n * n / (static_cast<double>(ma[i]) * static_cast<double>(mb[j])));
        }
    }
    return std::max(0.0, mi);
}

double mutual_information(std::span<const double> feature, std::span<const Label> labels,
                          const DiscretizationSpec& spec) {
    if (feature.size() != labels.size())
        throw std::invalid_argument("mutual_information: length mismatch (" + std::to_string(feature.size()) +
                                    " vs " + std::to_string(labels.size()) + ")");
    const auto bins = discretize(feature, spec);
    return mutual_information_discrete(bins, labels);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("pearson: length mismatch (" + std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()) + ")");
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double merit(std::span<const double> class_feature_r, double mean_feature_feature_r) {
    if (class_feature_r.empty()) throw std::invalid_argument("merit: empty subset");
    const double k = static_cast<double>(class_feature_r.size());
    double mean_cf = 0.0;
    for (double r : class_feature_r) mean_cf += std::abs(r);
    mean_cf /= k;
    const double radicand = k + k * (k - 1.0) * mean_feature_feature_r;
    if (!(radicand > 0.0))
        throw std::domain_error("merit: non-positive radicand for subset of size " + std::to_string(class_feature_r.size()) +
                                " with mean feature-feature correlation " + format_number(mean_feature_feature_r));
    return k * mean_cf / std::sqrt(radicand);
}

std::vector<std::string> SelectionResult::selected_names() const {
    std::vector<std::string> out;
    for (auto i : selected) out.push_back(feature_names.at(i));
    return out;
}

std::vector<FeatureScore> SelectionResult::ranking() const { return rank_scores(scores); }

SelectionResult select_igbfs(const Dataset& d, const DiscretizationSpec& disc, const SelectionPolicy& policy) {
    if (d.rows() == 0) throw DataError("select_igbfs: empty dataset");
    SelectionResult res;
    res.method = SelectionMethod::igbfs;
    res.policy = policy;
    res.discretization = disc;
    res.feature_names = d.feature_names;
    res.scores.resize(d.cols());
    parallel_for(d.cols(), [&](std::size_t j) {
        res.scores[j] = {j, mutual_information(d.features.column(j), d.labels, disc)};
    });
    res.selected = apply_policy(res.scores, policy);
    return res;
}

SelectionResult select_cbfs(const Dataset& d, CbfsMode mode, const SelectionPolicy& policy) {
    if (d.rows() == 0) throw DataError("select_cbfs: empty dataset");
    SelectionResult res;
    res.method = SelectionMethod::cbfs;
    res.policy = policy;
    res.cbfs_mode = mode;
    res.feature_names = d.feature_names;
    const auto y = label_column(d);
    const std::size_t n = d.cols();
    std::vector<std::vector<double>> columns(n);
    res.scores.resize(n);
    parallel_for(n, [&](std::size_t j) {
        columns[j] = d.features.column(j);
        res.scores[j] = {j, std::abs(pearson(columns[j], y))};
    });

    if (mode == CbfsMode::ranking) {
        res.selected = apply_policy(res.scores, policy);
        return res;
    }

    const std::size_t cap = policy.kind == SelectionPolicy::Kind::top_k ? policy.k : n;
    std::map<std::pair<std::size_t, std::size_t>, double> ff_cache;
    auto ff = [&](std::size_t a, std::size_t b) {
        const auto key = std::minmax(a, b);
        auto it = ff_cache.find(key);
        if (it == ff_cache.end()) it = ff_cache.emplace(key, std::abs(pearson(columns[a], columns[b]))).first;
        return it->second;
    };

    std::vector<std::size_t> subset;
    std::vector<double> subset_cf;
    double subset_ff_sum = 0.0;  // sum over unordered pairs
    double current = 0.0;
    while (subset.size() < cap) {
        double best_merit = current;
        std::size_t best = n;
        double best_ff_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::find(subset.begin(), subset.end(), j) != subset.end()) continue;
            double ff_sum = subset_ff_sum;
            for (auto s : subset) ff_sum += ff(s, j);
            const double k = static_cast<double>(subset.size() + 1);
            const double pairs = k * (k - 1.0) / 2.0;
            auto cf = subset_cf;
            cf.push_back(res.scores[j].score);
            const double m = merit(cf, pairs > 0.0 ? ff_sum / pairs : 0.0);
            if (m > best_merit) {
                best_merit = m;
                best = j;
                best_ff_sum = ff_sum;
            }
        }
        if (best == n) break;
        subset.push_back(best);
        subset_cf.push_back(res.scores[best].score);
        subset_ff_sum = best_ff_sum;
        current = best_merit;
    }
    if (subset.empty()) throw DataError("feature selection policy selected zero features");
    std::stable_sort(subset.begin(), subset.end(), [&](std::size_t a, std::size_t b) {
        if (res.scores[a].score != res.scores[b].score) return res.scores[a].score > res.scores[b].score;
        return a < b;
    });
    res.selected = subset;
    return res;
}

Dataset project(const Dataset& d, std::span<const std::size_t> selected) {
    if (selected.empty()) throw DataError("project: empty feature selection");
    for (auto j : selected) {
        if (j >= d.cols())
            throw DataError("project: feature index " + std::to_string(j) + " out of range for " +
                            std::to_string(d.cols()) + " features");
    }
    Dataset out;
    out.labels = d.labels;
    for (auto j : selected) out.feature_names.push_back(d.feature_names[j]);
    out.features = Matrix(d.rows(), selected.size());
    for (std::size_t r = 0; r < d.rows(); ++r) {
        const auto src = d.features.row(r);
        auto dst = out.features.row(r);
        for (std::size_t c = 0; c < selected.size(); ++c) dst[c] = src[selected[c]];
    }
    return out;
}

Dataset project(const Dataset& d, const SelectionResult& sel) { return project(d, sel.selected); }

void write_scores_csv(const SelectionResult& sel, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << "feature_name,score,selected\n";
    for (const auto& fs : sel.ranking()) {
        const bool chosen = std::find(sel.selected.begin(), sel.selected.end(), fs.feature_index) != sel.selected.end();
        out << sel.feature_names.at(fs.feature_index) << ',' << format_number(fs.score) << ',' << (chosen ? 1 : 0)
            << '\n';
    }
}

const char* to_string(SelectionMethod m) { return m == SelectionMethod::igbfs ? "igbfs" : "cbfs"; }

}  // namespace nids
