#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nids/dataset.hpp"

namespace nids {

struct DiscretizationSpec {
    std::size_t bins = 10;  // equal-frequency
};

// Shannon entropy in bits of a discrete vector.
double entropy(std::span<const int> values);

// Equal-frequency bin ids in [0, bins). Identical values always share a bin
// and bin ids are monotone in the value.
std::vector<int> discretize(std::span<const double> values, const DiscretizationSpec& spec);

// I(A;B) in bits from the empirical joint distribution of two discrete vectors.
double mutual_information_discrete(std::span<const int> a, std::span<const int> b);

// Discretizes the feature, then evaluates I(feature; labels) in bits.
double mutual_information(std::span<const double> feature, std::span<const Label> labels,
                          const DiscretizationSpec& spec = {});

// Pearson correlation; 0 when either column is constant.
double pearson(std::span<const double> x, std::span<const double> y);

// CFS subset merit k*mean|r_cf| / sqrt(k + k(k-1)*mean_r_ff).
double merit(std::span<const double> class_feature_r, double mean_feature_feature_r);

enum class SelectionMethod { igbfs, cbfs };
enum class CbfsMode { ranking, greedy_merit };

struct SelectionPolicy {
    enum class Kind { top_k, relative_threshold };
    Kind kind = Kind::relative_threshold;
    std::size_t k = 10;       // top_k: number of features kept
    double fraction = 0.01;   // relative_threshold: keep score >= fraction * max score (and > 0)
};

struct FeatureScore {
    std::size_t feature_index;
    double score;
};

struct SelectionResult {
    SelectionMethod method = SelectionMethod::igbfs;
    std::vector<std::size_t> selected;      // descending score, ties by lower index
    std::vector<FeatureScore> scores;       // one per feature, by feature index
    std::vector<std::string> feature_names; // names of all scored features
    SelectionPolicy policy;
    DiscretizationSpec discretization;
    CbfsMode cbfs_mode = CbfsMode::ranking;

    std::vector<std::string> selected_names() const;
    // All scores, descending, ties by lower index.
    std::vector<FeatureScore> ranking() const;
};

SelectionResult select_igbfs(const Dataset& d, const DiscretizationSpec& disc, const SelectionPolicy& policy);

// Ranking mode scores |pearson(feature, label)| and applies the policy.
// Greedy mode grows a subset by forward selection on the CFS merit until the
// merit stops improving; a top_k policy caps the subset size.
SelectionResult select_cbfs(const Dataset& d, CbfsMode mode, const SelectionPolicy& policy);

// Restricts the dataset to the selected columns, in selection order.
Dataset project(const Dataset& d, std::span<const std::size_t> selected);
Dataset project(const Dataset& d, const SelectionResult& sel);

// feature_name,score,selected, descending by score.
void write_scores_csv(const SelectionResult& sel, const std::filesystem::path& path);

const char* to_string(SelectionMethod m);

}  // namespace nids
