#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "nids/evaluation.hpp"
#include "text_util.hpp"

namespace nids {

namespace {

constexpr double kTolerance = 1e-9;
constexpr int kMaxIterations = 10000;

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec multiply(const std::vector<Vec>& m, const Vec& v) {
    Vec out(v.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = dot(m[i], v);
    return out;
}

void remove_component(Vec& v, const Vec& direction) {
    const double p = dot(v, direction);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * direction[i];
}

void fix_sign(Vec& v) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[arg]) + 1e-12) arg = i;
    }
    if (v[arg] < 0.0) {
        for (auto& x : v) x = -x;
    }
}

// Dominant eigenpair of a symmetric PSD matrix restricted to the subspace
// orthogonal to `exclude`. Converged when the residual |Cv - lambda v| drops
// below tolerance (relative to the matrix scale).
std::pair<Vec, double> dominant_eigenpair(const std::vector<Vec>& cov, const Vec* exclude, double scale) {
    const std::size_t n = cov.size();
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i) + 0.01 * static_cast<double>(i * i);
    if (exclude) remove_component(v, *exclude);
    double len = norm(v);
    if (len < 1e-12) {
        // Start vector parallel to the excluded direction: use the axis it
        // leans on least.
        const auto axis = std::min_element(exclude->begin(), exclude->end(),
                                           [](double a, double b) { return std::abs(a) < std::abs(b); });
        std::fill(v.begin(), v.end(), 0.0);
        v[static_cast<std::size_t>(axis - exclude->begin())] = 1.0;
        remove_component(v, *exclude);
        len = norm(v);
    }
    for (auto& x : v) x /= len;

    for (int it = 0; it < kMaxIterations; ++it) {
        Vec w = multiply(cov, v);
        if (exclude) remove_component(w, *exclude);
        const double lambda = dot(v, w);
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) residual += (w[i] - lambda * v[i]) * (w[i] - lambda * v[i]);
        residual = std::sqrt(residual);
        if (residual <= kTolerance * std::max(1.0, scale)) return {v, std::max(0.0, lambda)};
        const double wn = norm(w);
        if (wn <= kTolerance * std::max(1.0, scale)) return {v, 0.0};  // null space: any direction is exact
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    }
    throw std::runtime_error("pca2: power iteration did not converge within the iteration cap");
}

}  // namespace

PcaResult pca2(const Dataset& d) {
    const std::size_t m = d.rows();
    const std::size_t n = d.cols();
    if (n < 2 || m < 2) throw std::invalid_argument("pca2: need at least two rows and two features");

    Vec mean(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const auto row = d.features.row(r);
        for (std::size_t c = 0; c < n; ++c) mean[c] += row[c];
    }
    for (auto& x : mean) x /= static_cast<double>(m);

    std::vector<Vec> cov(n, Vec(n, 0.0));
    Vec centered(n);
    for (std::size_t r = 0; r < m; ++r) {
        const auto row = d.features.row(r);
        for (std::size_t c = 0; c < n; ++c) centered[c] = row[c] - mean[c];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) cov[i][j] += centered[i] * centered[j];
        }
    }
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            cov[i][j] /= static_cast<double>(m);
            cov[j][i] = cov[i][j];
        }
        trace += cov[i][i];
    }

    auto [first, l1] = dominant_eigenpair(cov, nullptr, trace);
    fix_sign(first);
    auto [second, l2] = dominant_eigenpair(cov, &first, trace);
    // Re-orthogonalize to keep the pair orthonormal to rounding precision.
    remove_component(second, first);
    const double sn = norm(second);
    for (auto& x : second) x /= sn;
    fix_sign(second);

    PcaResult out;
    out.components = {first, second};
    out.explained_variance = {l1, l2};
    out.explained_variance_ratio = {trace > 0.0 ? l1 / trace : 0.0, trace > 0.0 ? l2 / trace : 0.0};
    out.projection = Matrix(m, 2);
    for (std::size_t r = 0; r < m; ++r) {
        const auto row = d.features.row(r);
        double p1 = 0.0;
        double p2 = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            const double x = row[c] - mean[c];
            p1 += x * first[c];
            p2 += x * second[c];
        }
        out.projection(r, 0) = p1;
        out.projection(r, 1) = p2;
    }
    return out;
}

void write_pca_csv(const PcaResult& pca, std::span<const Label> labels, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << "pc1,pc2,label\n";
    for (std::size_t r = 0; r < pca.projection.rows(); ++r) {
        out << format_number(pca.projection(r, 0)) << ',' << format_number(pca.projection(r, 1)) << ','
            << (r < labels.size() ? labels[r] : 0) << '\n';
    }
}

}  // namespace nids
