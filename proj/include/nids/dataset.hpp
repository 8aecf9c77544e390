#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nids {

// Thrown for malformed or unusable input data. The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double> column(std::size_t c) const;
    void append_row(std::span<const double> values);

    const std::vector<double>& data() const { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

using Label = int;  // 0 = normal/benign, 1 = attack

/// Numeric feature matrix plus binary labels; the currency between stages.
struct Dataset {
    Matrix features;
    std::vector<Label> labels;
    std::vector<std::string> feature_names;

    std::size_t rows() const { return features.rows(); }
    std::size_t cols() const { return features.cols(); }

    // Throws DataError unless shapes agree, labels are 0/1, every value is
    // finite and the dataset has at least one row and one column.
    void validate() const;

    std::size_t count(Label label) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

Dataset subset(const Dataset& d, std::span<const std::size_t> rows);

// ---------------------------------------------------------------------------
// Raw ingestion

enum class ColumnKind { numeric, categorical };

struct RawColumn {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::vector<double> numbers;     // numeric columns; empty cells are NaN
    std::vector<bool> missing;       // numeric columns; true for empty cells
    std::vector<std::string> text;   // categorical columns
};

/// Column-oriented table as read from a CSV file.
struct RawTable {
    std::vector<RawColumn> columns;
    std::string label_column;
    std::size_t rows = 0;

    const RawColumn& column(const std::string& name) const;
    std::size_t column_index(const std::string& name) const;
};

struct CsvOptions {
    char delimiter = ',';
};

/// Reads a CSV with a mandatory header row. Column kinds are inferred: a
/// column is numeric when every non-empty cell parses as a number. The label
/// column is always read as text. Duplicate header names get a ".1", ".2"...
/// suffix so names stay unique.
RawTable load_csv(const std::filesystem::path& path, const std::string& label_column,
                  const CsvOptions& options = {});

// Writes the dataset with its feature names plus a trailing "label" column.
// Values use the shortest round-trip representation.
void write_csv(const Dataset& d, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Label policy and schema adapters

enum class NonFinitePolicy { reject, drop_row };

/// Maps dataset-specific label spellings onto {0, 1}. Labels listed under
/// benign map to 0. When attack is empty every other label maps to 1;
/// otherwise labels outside both sets are an error.
struct LabelPolicy {
    std::set<std::string> benign{"BENIGN", "Benign", "benign", "normal", "Normal", "0"};
    std::set<std::string> attack;

    Label map(const std::string& label) const;
};

struct SchemaAdapter {
    std::string label_column = "label";
    LabelPolicy labels;
    std::vector<std::string> drop_columns;
    NonFinitePolicy non_finite = NonFinitePolicy::reject;
    char delimiter = ',';
};

// Text key = value file. Recognized keys: label_column, benign, attack, drop,
// non_finite (reject|drop), delimiter. List values are comma separated.
SchemaAdapter load_schema(const std::filesystem::path& path);

struct PreprocessOptions {
    std::vector<std::string> drop_columns;
    NonFinitePolicy non_finite = NonFinitePolicy::reject;
};

/// Discards unlabeled rows, binarizes labels, label-encodes categorical
/// columns in lexicographic order and rejects missing or non-finite values.
Dataset preprocess(const RawTable& raw, const LabelPolicy& policy,
                   const PreprocessOptions& options = {});

// ---------------------------------------------------------------------------
// Normalization

struct NormalizationParams {
    std::vector<double> mean;
    std::vector<double> stddev;  // population convention
};

NormalizationParams fit_zscore(const Dataset& d);

// (x - mean) / stddev per feature; zero-variance features become 0.
Dataset apply_zscore(const Dataset& d, const NormalizationParams& params);

// ---------------------------------------------------------------------------
// Splitting and sampling

struct SplitSpec {
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
    bool stratified = false;
};

struct TrainTestSplit {
    Dataset train;
    Dataset test;
};

// Row indices of the training part; the test part is the complement.
// Indices are returned in ascending order.
std::vector<std::size_t> split_indices(const std::vector<Label>& labels, const SplitSpec& spec);

TrainTestSplit split_train_test(const Dataset& d, const SplitSpec& spec);

// Seeded stratified sample of (about) n rows preserving class proportions,
// returned as ascending row indices.
std::vector<std::size_t> stratified_sample_indices(const std::vector<Label>& labels, std::size_t n,
                                                   std::uint64_t seed);

}  // namespace nids
