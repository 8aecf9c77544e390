#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "nids/classifiers.hpp"
#include "text_util.hpp"

namespace nids {

namespace {

constexpr const char* kMagic = "nids-model";
constexpr int kVersion = 1;

template <typename T>
T read(std::istream& in, const char* what) {
    T value{};
    if (!(in >> value)) throw DataError(std::string("model file: cannot read ") + what);
    return value;
}

double read_double(std::istream& in, const char* what) {
    const auto token = read<std::string>(in, what);
    const auto v = parse_number(token);
    if (!v) throw DataError(std::string("model file: bad number for ") + what + ": " + token);
    return *v;
}

void expect(std::istream& in, const std::string& keyword) {
    const auto token = read<std::string>(in, keyword.c_str());
    if (token != keyword) throw DataError("model file: expected '" + keyword + "', got '" + token + "'");
}

}  // namespace

void save_model(const TrainedModel& model, std::ostream& out) {
    out << kMagic << ' ' << kVersion << '\n';
    if (const auto* knn = std::get_if<KnnModel>(&model)) {
        out << "knn " << knn->k << ' ' << knn->points.rows() << ' ' << knn->points.cols() << '\n';
        for (std::size_t r = 0; r < knn->points.rows(); ++r) {
            out << knn->labels[r];
            for (double v : knn->points.row(r)) out << ' ' << format_number(v);
            out << '\n';
        }
        return;
    }
    const auto& rf = std::get<RandomForestModel>(model);
    out << "rf " << to_string(rf.criterion) << ' ' << rf.trees.size() << ' ' << rf.n_features << ' ' << rf.seed
        << '\n';
    for (const auto& tree : rf.trees) {
        out << "tree " << tree.nodes.size() << '\n';
        for (const auto& n : tree.nodes) {
            out << n.feature << ' ' << format_number(n.threshold) << ' ' << n.left << ' ' << n.right << ' '
                << n.counts[0] << ' ' << n.counts[1] << ' ' << n.label << '\n';
        }
    }
}

TrainedModel load_model(std::istream& in) {
    expect(in, kMagic);
    const int version = read<int>(in, "version");
    if (version != kVersion) throw DataError("model file: unsupported version " + std::to_string(version));
    const auto kind = read<std::string>(in, "model kind");
    if (kind == "knn") {
        KnnModel m;
        m.k = read<std::size_t>(in, "k");
        const auto rows = read<std::size_t>(in, "rows");
        const auto cols = read<std::size_t>(in, "cols");
        m.points = Matrix(rows, cols);
        m.labels.resize(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            m.labels[r] = read<Label>(in, "label");
            for (std::size_t c = 0; c < cols; ++c) m.points(r, c) = read_double(in, "value");
        }
        return m;
    }
    if (kind != "rf") throw DataError("model file: unknown model kind '" + kind + "'");
    RandomForestModel m;
    m.criterion = parse_criterion(read<std::string>(in, "criterion"));
    const auto trees = read<std::size_t>(in, "tree count");
    m.n_features = read<std::size_t>(in, "feature count");
    m.seed = read<std::uint64_t>(in, "seed");
    m.trees.resize(trees);
    for (auto& tree : m.trees) {
        expect(in, "tree");
        tree.nodes.resize(read<std::size_t>(in, "node count"));
        for (auto& n : tree.nodes) {
            n.feature = read<int>(in, "feature");
            n.threshold = read_double(in, "threshold");
            n.left = read<int>(in, "left");
            n.right = read<int>(in, "right");
            n.counts[0] = read<std::size_t>(in, "count0");
            n.counts[1] = read<std::size_t>(in, "count1");
            n.label = read<Label>(in, "label");
        }
    }
    return m;
}

}  // namespace nids
