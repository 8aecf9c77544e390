#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "nids/evaluation.hpp"
#include "nids/random.hpp"
#include "text_util.hpp"

namespace nids {

LearningCurve learning_curve(const Dataset& d, const HyperParams& hp, std::span<const double> fractions,
                             std::size_t folds, std::uint64_t seed) {
    if (fractions.empty()) throw std::invalid_argument("learning_curve: no fractions given");
    LearningCurve curve;
    curve.folds = folds;
    curve.seed = seed;
    double previous = 0.0;
    for (double f : fractions) {
        if (!(f > previous && f <= 1.0))
            throw std::invalid_argument("learning_curve: fractions must be ascending within (0, 1]");
        previous = f;
        const auto n = static_cast<std::size_t>(std::llround(f * static_cast<double>(d.rows())));
        const auto rows = stratified_sample_indices(d.labels, n, seed);
        if (rows.size() < folds)
            throw DataError("learning_curve: fraction " + format_number(f) + " yields " + std::to_string(rows.size()) +
                            " rows, fewer than " + std::to_string(folds) + " folds");
        if (!curve.points.empty() && rows.size() <= curve.points.back().train_size)
            throw DataError("learning_curve: fraction " + format_number(f) + " does not increase the sample size");
        const auto sample = subset(d, rows);
        const auto model = fit(sample, hp, derive_seed(seed, 0x5e1f));
        CurvePoint point;
        point.train_size = sample.rows();
        point.train_accuracy = accuracy(predict(model, sample.features), sample.labels);
        point.cv_accuracy = kfold_cv(sample, hp, folds, seed);
        curve.points.push_back(point);
    }
    return curve;
}

MinimumSize minimum_training_size(const LearningCurve& curve, double epsilon) {
    if (curve.points.empty()) throw std::invalid_argument("minimum_training_size: empty curve");
    const auto& pts = curve.points;
    const std::size_t last = pts.size() - 1;
    const double final_cv = pts[last].cv_accuracy;

    // Scan backwards to find where the within-epsilon plateau begins.
    std::size_t plateau = last;
    while (plateau > 0 && std::abs(pts[plateau - 1].cv_accuracy - final_cv) <= epsilon) --plateau;
    for (std::size_t i = plateau; i < last; ++i) {
        if (std::abs(pts[i].train_accuracy - pts[i].cv_accuracy) <= 5.0 * epsilon) return {pts[i].train_size, true};
    }
    return {pts[last].train_size, false};
}

std::vector<double> overfit_gap(const LearningCurve& curve) {
    std::vector<double> out;
    out.reserve(curve.points.size());
    for (const auto& p : curve.points) out.push_back(p.train_accuracy - p.cv_accuracy);
    return out;
}

void write_learning_curve_csv(const LearningCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << "train_size,train_accuracy,cv_accuracy,gap\n";
    for (const auto& p : curve.points) {
        out << p.train_size << ',' << format_number(p.train_accuracy) << ',' << format_number(p.cv_accuracy) << ','
            << format_number(p.train_accuracy - p.cv_accuracy) << '\n';
    }
}

}  // namespace nids
