#include "nids/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "nids/random.hpp"
#include "text_util.hpp"

namespace nids {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw std::invalid_argument("Matrix: data size does not match shape");
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = data_[r * cols_ + c];
    return out;
}

void Matrix::append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) throw std::invalid_argument("Matrix::append_row: width mismatch");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

void Dataset::validate() const {
    if (rows() == 0 || cols() == 0) throw DataError("dataset must have at least one row and one feature");
    if (labels.size() != rows()) throw DataError("label count does not match row count");
    if (feature_names.size() != cols()) throw DataError("feature name count does not match column count");
    for (Label y : labels) {
        if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
    }
    for (double v : features.data()) {
        if (!std::isfinite(v)) throw DataError("dataset contains non-finite values");
    }
}

std::size_t Dataset::count(Label label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

Dataset subset(const Dataset& d, std::span<const std::size_t> rows) {
    Dataset out;
    out.feature_names = d.feature_names;
    std::vector<double> data;
    data.reserve(rows.size() * d.cols());
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= d.rows()) throw std::out_of_range("subset: row index out of range");
        const auto src = d.features.row(r);
        data.insert(data.end(), src.begin(), src.end());
        out.labels.push_back(d.labels[r]);
    }
    out.features = Matrix(rows.size(), d.cols(), std::move(data));
    return out;
}

const RawColumn& RawTable::column(const std::string& name) const {
    return columns[column_index(name)];
}

std::size_t RawTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) return i;
    }
    throw DataError("no column named '" + name + "'");
}

Label LabelPolicy::map(const std::string& label) const {
    if (benign.contains(label)) return 0;
    if (attack.empty() || attack.contains(label)) return 1;
    throw DataError("label value '" + label + "' is not covered by the label policy");
}

Dataset preprocess(const RawTable& raw, const LabelPolicy& policy, const PreprocessOptions& options) {
    if (raw.rows == 0) throw DataError("input table has no rows");
    const std::size_t label_idx = raw.column_index(raw.label_column);
    for (const auto& name : options.drop_columns) raw.column_index(name);

    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < raw.columns.size(); ++c) {
        if (c == label_idx) continue;
        const auto& name = raw.columns[c].name;
        if (std::find(options.drop_columns.begin(), options.drop_columns.end(), name) != options.drop_columns.end())
            continue;
        feature_cols.push_back(c);
    }
    if (feature_cols.empty()) throw DataError("no feature columns remain after dropping");

    const auto& label_text = raw.columns[label_idx].text;
    std::vector<bool> keep(raw.rows);
    for (std::size_t r = 0; r < raw.rows; ++r) keep[r] = !label_text[r].empty();

    for (std::size_t c : feature_cols) {
        const auto& col = raw.columns[c];
        if (col.kind != ColumnKind::numeric) continue;
        for (std::size_t r = 0; r < raw.rows; ++r) {
            if (!keep[r]) continue;
            if (col.missing[r] || !std::isfinite(col.numbers[r])) {
                if (options.non_finite == NonFinitePolicy::drop_row) {
                    keep[r] = false;
                    continue;
                }
                throw DataError(std::string(col.missing[r] ? "missing" : "non-finite") + " value in column '" +
                                col.name + "' at row " + std::to_string(r));
            }
        }
    }

    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < raw.rows; ++r) {
        if (keep[r]) rows.push_back(r);
    }
    if (rows.empty()) throw DataError("no rows remain after discarding unlabeled rows");

    Dataset d;
    d.features = Matrix(rows.size(), feature_cols.size());
    d.labels.reserve(rows.size());
    for (std::size_t r : rows) d.labels.push_back(policy.map(label_text[r]));

    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
        const auto& col = raw.columns[feature_cols[j]];
        d.feature_names.push_back(col.name);
        if (col.kind == ColumnKind::numeric) {
            for (std::size_t i = 0; i < rows.size(); ++i) d.features(i, j) = col.numbers[rows[i]];
            continue;
        }
        std::map<std::string, double> codes;  // ordered: lexicographic encoding
        for (std::size_t r : rows) codes.emplace(col.text[r], 0.0);
        double next = 0.0;
        for (auto& [value, code] : codes) code = next++;
        for (std::size_t i = 0; i < rows.size(); ++i) d.features(i, j) = codes.at(col.text[rows[i]]);
    }
    return d;
}

NormalizationParams fit_zscore(const Dataset& d) {
    if (d.rows() == 0) throw DataError("fit_zscore: empty dataset");
    const std::size_t m = d.rows();
    const std::size_t n = d.cols();
    NormalizationParams p{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t r = 0; r < m; ++r) {
        const auto row = d.features.row(r);
        for (std::size_t c = 0; c < n; ++c) p.mean[c] += row[c];
    }
    for (auto& mu : p.mean) mu /= static_cast<double>(m);
    for (std::size_t r = 0; r < m; ++r) {
        const auto row = d.features.row(r);
        for (std::size_t c = 0; c < n; ++c) {
            const double dev = row[c] - p.mean[c];
            p.stddev[c] += dev * dev;
        }
    }
    for (auto& s : p.stddev) s = std::sqrt(s / static_cast<double>(m));
    return p;
}

Dataset apply_zscore(const Dataset& d, const NormalizationParams& params) {
    if (params.mean.size() != d.cols() || params.stddev.size() != d.cols())
        throw DataError("apply_zscore: parameter dimension " + std::to_string(params.mean.size()) +
                        " does not match dataset width " + std::to_string(d.cols()));
    Dataset out = d;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.features.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            const double s = params.stddev[c];
            row[c] = s > 0.0 ? (row[c] - params.mean[c]) / s : 0.0;
        }
    }
    return out;
}

namespace {

std::size_t round_count(double x) { return static_cast<std::size_t>(std::llround(x)); }

}  // namespace

std::vector<std::size_t> split_indices(const std::vector<Label>& labels, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw DataError("train_fraction must lie strictly between 0 and 1");
    const std::size_t m = labels.size();
    if (m < 2) throw DataError("splitting requires at least two rows");

    std::vector<std::size_t> train;
    auto eng = make_engine(spec.seed, 0x5917);
    if (!spec.stratified) {
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        shuffle(order, eng);
        const std::size_t n_train = round_count(spec.train_fraction * static_cast<double>(m));
        train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(n_train, m)));
    } else {
        for (Label cls : {0, 1}) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < m; ++i) {
                if (labels[i] == cls) members.push_back(i);
            }
            shuffle(members, eng);
            const std::size_t n_train = round_count(spec.train_fraction * static_cast<double>(members.size()));
            train.insert(train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
        }
    }
    if (train.empty() || train.size() == m)
        throw DataError("train_fraction " + format_number(spec.train_fraction) + " on " + std::to_string(m) +
                        " rows leaves an empty train or test partition");
    std::sort(train.begin(), train.end());
    return train;
}

TrainTestSplit split_train_test(const Dataset& d, const SplitSpec& spec) {
    const auto train_rows = split_indices(d.labels, spec);
    std::vector<std::size_t> test_rows;
    test_rows.reserve(d.rows() - train_rows.size());
    std::size_t t = 0;
    for (std::size_t r = 0; r < d.rows(); ++r) {
        if (t < train_rows.size() && train_rows[t] == r) {
            ++t;
        } else {
            test_rows.push_back(r);
        }
    }
    return {subset(d, train_rows), subset(d, test_rows)};
}

std::vector<std::size_t> stratified_sample_indices(const std::vector<Label>& labels, std::size_t n,
                                                   std::uint64_t seed) {
    const std::size_t m = labels.size();
    if (n >= m) {
        std::vector<std::size_t> all(m);
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    auto eng = make_engine(seed, 0x57a7);
    std::vector<std::size_t> out;
    for (Label cls : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < m; ++i) {
            if (labels[i] == cls) members.push_back(i);
        }
        shuffle(members, eng);
        const double share = static_cast<double>(members.size()) * static_cast<double>(n) / static_cast<double>(m);
        const std::size_t take = std::min(members.size(), round_count(share));
        out.insert(out.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace nids
