#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "nids/smote.hpp"
#include "support/synthetic.hpp"
#include "support/threads.hpp"

using namespace nids;

namespace {

Dataset tiny(std::vector<double> values, std::vector<Label> labels, std::size_t cols) {
    Dataset d;
    d.features = Matrix(labels.size(), cols, std::move(values));
    d.labels = std::move(labels);
    for (std::size_t c = 0; c < cols; ++c) d.feature_names.push_back("f" + std::to_string(c));
    return d;
}

}  // namespace

TEST_CASE("interpolate follows the segment formula") {
    const std::vector<double> a{0, 0};
    const std::vector<double> b{1, 1};
    CHECK(interpolate(a, b, 0.5) == std::vector<double>{0.5, 0.5});
    CHECK(interpolate(a, b, 0.0) == a);
    CHECK(interpolate(a, b, 1.0) == b);
}

TEST_CASE("two-point minority with k=1 produces points on the joining segment") {
    const auto d = tiny({0, 0, 1, 1, 5, 5, 6, 6, 7, 7}, {1, 1, 0, 0, 0}, 2);
    const auto out = oversample_traced(d, {1, 0, 11});
    CHECK(out.data.count(1) == 3);
    REQUIRE(out.origins.size() == 1);
    const auto row = out.data.features.row(5);
    CHECK(row[0] == doctest::Approx(row[1]));
    CHECK(row[0] >= 0.0);
    CHECK(row[0] <= 1.0);
}

TEST_CASE("identical minority rows give identical synthetic rows") {
    const auto d = tiny({2, 3, 2, 3, 2, 3, 9, 9, 8, 8, 7, 7, 6, 6, 5, 5}, {1, 1, 1, 0, 0, 0, 0, 0}, 2);
    const auto out = oversample(d, {5, 0, 3});
    for (std::size_t r = 0; r < out.rows(); ++r) {
        if (out.labels[r] != 1) continue;
        CHECK(out.features(r, 0) == 2.0);
        CHECK(out.features(r, 1) == 3.0);
    }
}

TEST_CASE("target equal to the current count is a no-op") {
    const auto d = tiny({0, 1, 2, 3, 4, 5}, {1, 1, 0, 0, 0, 0}, 1);
    const auto out = oversample(d, {5, 2, 1});
    CHECK(out.features == d.features);
    CHECK(out.labels == d.labels);
}

TEST_CASE("oversample errors") {
    const auto singleton = tiny({0, 1, 2}, {1, 0, 0}, 1);
    CHECK_THROWS(oversample(singleton, {5, 0, 1}));
    const auto d = tiny({0, 1, 2, 3, 4}, {1, 1, 1, 0, 0}, 1);
    CHECK_THROWS(oversample(d, {5, 1, 1}));  // target below the current minority count
    CHECK_THROWS(oversample(d, {0, 0, 1}));
    const auto one_class = tiny({0, 1}, {0, 0}, 1);
    CHECK_THROWS(oversample(one_class, {5, 0, 1}));
}

TEST_CASE("synthetic rows are convex combinations of a base and one of its k nearest neighbors") {
    const auto d = nids::testing::make_blobs({.rows = 300, .informative = 3, .noise = 1, .attack_fraction = 0.1, .seed = 21});
    const std::size_t k = 5;
    const auto out = oversample_traced(d, {k, 0, 99});
    CHECK(out.minority == 1);
    CHECK(out.data.count(1) == d.count(0));
    CHECK(out.data.count(0) == d.count(0));

    std::vector<std::size_t> minority;
    for (std::size_t r = 0; r < d.rows(); ++r) {
        if (d.labels[r] == 1) minority.push_back(r);
    }
    for (std::size_t i = 0; i < out.origins.size(); ++i) {
        const auto& o = out.origins[i];
        CHECK(o.gap >= 0.0);
        CHECK(o.gap <= 1.0);
        const auto self = static_cast<std::size_t>(std::find(minority.begin(), minority.end(), o.base_row) - minority.begin());
        const auto nn = nearest_neighbors(d.features, minority, self, k);
        bool found = false;
        for (std::size_t j : nn) found = found || minority[j] == o.neighbor_row;
        CHECK(found);
        const auto row = out.data.features.row(d.rows() + i);
        const auto base = d.features.row(o.base_row);
        const auto nb = d.features.row(o.neighbor_row);
        double residual = 0.0;
        for (std::size_t c = 0; c < d.cols(); ++c) residual = std::max(residual, std::abs(base[c] + o.gap * (nb[c] - base[c]) - row[c]));
        CHECK(residual < 1e-9);
    }
}

TEST_CASE("original rows come first and are unchanged") {
    const auto d = nids::testing::make_blobs({.rows = 200, .seed = 5});
    const auto out = oversample(d, {5, 60, 1});
    CHECK(out.count(1) == 60);
    for (std::size_t r = 0; r < d.rows(); ++r) {
        CHECK(out.labels[r] == d.labels[r]);
        for (std::size_t c = 0; c < d.cols(); ++c) CHECK(out.features(r, c) == d.features(r, c));
    }
}

TEST_CASE("base instances are taken round-robin") {
    const auto d = nids::testing::make_blobs({.rows = 200, .seed = 6});
    const auto minority = d.count(1);
    const auto out = oversample_traced(d, {3, minority * 3 + 1, 2});
    std::map<std::size_t, std::size_t> uses;
    for (const auto& o : out.origins) ++uses[o.base_row];
    CHECK(uses.size() == minority);
    for (const auto& [row, n] : uses) {
        CHECK(n >= 2);
        CHECK(n <= 3);
    }
}

TEST_CASE("large k degrades to all other minority rows") {
    const auto d = tiny({0, 1, 2, 10, 11, 12, 13}, {1, 1, 1, 0, 0, 0, 0}, 1);
    const std::vector<std::size_t> minority{0, 1, 2};
    CHECK(nearest_neighbors(d.features, minority, 0, 50) == std::vector<std::size_t>{1, 2});
    CHECK_NOTHROW(oversample(d, {50, 0, 1}));
}

TEST_CASE("neighbor distance ties go to the lower index") {
    const auto d = tiny({0, -1, 1, 2}, {1, 1, 1, 1}, 1);
    const std::vector<std::size_t> all{0, 1, 2, 3};
    CHECK(nearest_neighbors(d.features, all, 0, 1) == std::vector<std::size_t>{1});
    CHECK(nearest_neighbors(d.features, all, 0, 2) == std::vector<std::size_t>{1, 2});
}

TEST_CASE("oversample is deterministic and independent of the thread count") {
    const auto d = nids::testing::make_blobs({.rows = 400, .seed = 8});
    Dataset one;
    Dataset four;
    {
        nids::testing::ScopedThreads t(1);
        one = oversample(d, {5, 0, 77});
    }
    {
        nids::testing::ScopedThreads t(4);
        four = oversample(d, {5, 0, 77});
    }
    CHECK(one.features == four.features);
    CHECK(oversample(d, {5, 0, 77}).features == one.features);
    CHECK_FALSE(oversample(d, {5, 0, 78}).features == one.features);
}
