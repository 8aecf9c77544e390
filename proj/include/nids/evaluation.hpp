#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nids/classifiers.hpp"
#include "nids/dataset.hpp"

namespace nids {

// Positive class is attack (1).
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> truth);

/// Accuracy, precision, recall (TPR) and false alarm rate (FPR). A metric
/// whose denominator is zero is reported as 0 and flagged.
struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double far = 0.0;
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool far_undefined = false;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

MetricsReport metrics(const ConfusionMatrix& cm);

double accuracy(std::span<const Label> predicted, std::span<const Label> truth);

// Seeded shuffle of 0..rows-1 cut into `folds` contiguous folds whose sizes
// differ by at most one.
std::vector<std::vector<std::size_t>> kfold_partition(std::size_t rows, std::size_t folds, std::uint64_t seed);

// Mean held-out accuracy over the folds.
double kfold_cv(const Dataset& d, const HyperParams& hp, std::size_t folds, std::uint64_t seed);

struct CurvePoint {
    std::size_t train_size = 0;
    double train_accuracy = 0.0;
    double cv_accuracy = 0.0;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct LearningCurve {
    std::vector<CurvePoint> points;
    std::size_t folds = 5;
    std::uint64_t seed = 0;
};

/// For each fraction, takes a nested stratified subsample of that share of
/// the rows (original order preserved, so 1.0 is the dataset itself) and
/// records training self-accuracy and k-fold CV accuracy.
LearningCurve learning_curve(const Dataset& d, const HyperParams& hp, std::span<const double> fractions,
                             std::size_t folds, std::uint64_t seed);

struct MinimumSize {
    std::size_t train_size = 0;
    bool converged = false;
};

/// Smallest size from which every later CV accuracy stays within epsilon of
/// the final one, and whose |train - cv| gap is at most 5 * epsilon. When only
/// the final point qualifies the curve has not converged: the last size is
/// returned with converged = false.
MinimumSize minimum_training_size(const LearningCurve& curve, double epsilon = 0.002);

// train_accuracy - cv_accuracy per point.
std::vector<double> overfit_gap(const LearningCurve& curve);

struct PcaResult {
    Matrix projection;                          // rows x 2
    std::array<std::vector<double>, 2> components;
    std::array<double, 2> explained_variance{};  // eigenvalues of the covariance
    std::array<double, 2> explained_variance_ratio{};
};

/// Top two principal components by power iteration with deflation. Components
/// are unit norm with their largest-magnitude entry positive.
PcaResult pca2(const Dataset& d);

void write_learning_curve_csv(const LearningCurve& curve, const std::filesystem::path& path);
void write_pca_csv(const PcaResult& pca, std::span<const Label> labels, const std::filesystem::path& path);

}  // namespace nids
