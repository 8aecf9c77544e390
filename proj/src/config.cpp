#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nids/pipeline.hpp"
#include "text_util.hpp"

namespace nids {

namespace pt = boost::property_tree;

namespace {

class SectionReader {
public:
    SectionReader(const pt::ptree& section, std::string name) : section_(section), name_(std::move(name)) {
        for (const auto& [key, node] : section_) {
            if (!node.empty()) throw ConfigError("[" + name_ + "] key '" + key + "' has nested values");
        }
    }

    // Invokes `apply` with the raw value if the key is present.
    template <typename F>
    void read(const std::string& key, F&& apply) {
        known_.push_back(key);
        const auto node = section_.get_child_optional(pt::ptree::path_type(key, '\0'));
        if (!node) return;
        const std::string value(trim(node->get_value<std::string>()));
        try {
            apply(value);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("[" + name_ + "] " + key + " = '" + value + "': " + e.what());
        }
    }

    void finish() const {
        for (const auto& [key, node] : section_) {
            if (std::find(known_.begin(), known_.end(), key) == known_.end())
                throw ConfigError("unknown key '" + key + "' in section [" + name_ + "]");
        }
    }

private:
    const pt::ptree& section_;
    std::string name_;
    std::vector<std::string> known_;
};

double to_double(const std::string& v) {
    const auto x = parse_number(v);
    if (!x || !std::isfinite(*x)) throw std::invalid_argument("not a finite number");
    return *x;
}

std::size_t to_size(const std::string& v) {
    const double x = to_double(v);
    if (x < 0.0 || x != std::floor(x) || x > 9.007199254740992e15)
        throw std::invalid_argument("not a non-negative integer");
    return static_cast<std::size_t>(x);
}

std::uint64_t to_u64(const std::string& v) {
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw std::invalid_argument("not an unsigned 64-bit integer");
    return out;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw std::invalid_argument("expected true or false");
}

std::filesystem::path to_path(const std::string& v, const std::filesystem::path& base) {
    std::filesystem::path p(v);
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

}  // namespace

const char* to_string(NormalizeFit n) {
    switch (n) {
        case NormalizeFit::full: return "full";
        case NormalizeFit::train: return "train";
        case NormalizeFit::none: return "none";
    }
    return "?";
}

const char* to_string(SmoteStage s) { return s == SmoteStage::post_split ? "post_split" : "pre_split"; }

const char* to_string(SelectionStage s) { return s == SelectionStage::post_smote ? "post_smote" : "pre_smote"; }

void PipelineConfig::validate() const {
    if (data.path.empty()) throw ConfigError("[data] path is required");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("[split] train_fraction must lie in (0, 1)");
    if (smote.enabled && smote.k < 1) throw ConfigError("[smote] k must be at least 1");
    if (selection.method) {
        if (selection.policy.kind == SelectionPolicy::Kind::top_k && selection.policy.k < 1)
            throw ConfigError("[selection] top_k must be at least 1");
        if (!(selection.policy.fraction >= 0.0 && selection.policy.fraction <= 1.0))
            throw ConfigError("[selection] threshold must lie in [0, 1]");
        if (selection.discretization.bins < 2) throw ConfigError("[selection] bins must be at least 2");
    }
    try {
        model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[model] ") + e.what());
    }
    if (optimizer.enabled) {
        if (optimizer.budget < 1) throw ConfigError("[optimizer] budget must be at least 1");
        if (optimizer.cv_folds < 2) throw ConfigError("[optimizer] cv_folds must be at least 2");
        if (optimizer.pso.swarm_size < 2) throw ConfigError("[optimizer] pso_swarm must be at least 2");
        if (optimizer.pso.iterations < 1) throw ConfigError("[optimizer] pso_iterations must be at least 1");
        if (optimizer.ga.population < 2) throw ConfigError("[optimizer] ga_population must be at least 2");
        if (optimizer.ga.generations < 1) throw ConfigError("[optimizer] ga_generations must be at least 1");
        const auto rate = [](double r) { return r >= 0.0 && r <= 1.0; };
        if (!rate(optimizer.ga.crossover_rate) || !rate(optimizer.ga.mutation_rate))
            throw ConfigError("[optimizer] GA rates must lie in [0, 1]");
        if (!(optimizer.tpe.gamma > 0.0 && optimizer.tpe.gamma < 1.0))
            throw ConfigError("[optimizer] tpe_gamma must lie in (0, 1)");
        if (optimizer.gp.pool_size < 1 || optimizer.tpe.pool_size < 1)
            throw ConfigError("[optimizer] pool sizes must be at least 1");
    }
    if (learning_curve.enabled || learning_curve.reduce_training) {
        if (learning_curve.fractions.empty()) throw ConfigError("[learning_curve] fractions must not be empty");
        double prev = 0.0;
        for (double f : learning_curve.fractions) {
            if (!(f > prev && f <= 1.0))
                throw ConfigError("[learning_curve] fractions must ascend strictly within (0, 1]");
            prev = f;
        }
        if (learning_curve.folds < 2) throw ConfigError("[learning_curve] folds must be at least 2");
        if (!(learning_curve.epsilon >= 0.0)) throw ConfigError("[learning_curve] epsilon must be non-negative");
    }
    if (learning_curve.reduce_training && !learning_curve.enabled)
        throw ConfigError("[learning_curve] reduce_training requires enabled = true");
}

PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("malformed configuration: " + e.message() + " at line " + std::to_string(e.line()));
    }

    PipelineConfig cfg;
    static const std::vector<std::string> sections{"data",   "split",          "smote", "selection", "model",
                                                   "optimizer", "learning_curve", "pca", "run"};
    for (const auto& [name, node] : tree) {
        if (node.empty() && !node.data().empty())
            throw ConfigError("key '" + name + "' lies outside any section");
        if (std::find(sections.begin(), sections.end(), name) == sections.end())
            throw ConfigError("unknown section [" + name + "]");
    }
    const pt::ptree empty;
    const auto section = [&](const std::string& name) {
        const auto child = tree.get_child_optional(name);
        return SectionReader(child ? *child : empty, name);
    };

    {
        auto s = section("data");
        std::optional<std::string> label_column;
        s.read("path", [&](const std::string& v) { cfg.data.path = to_path(v, base_dir); });
        s.read("schema", [&](const std::string& v) { cfg.data.schema_path = to_path(v, base_dir); });
        s.read("label_column", [&](const std::string& v) { label_column = v; });
        s.read("sample_rows", [&](const std::string& v) { cfg.data.sample_rows = to_size(v); });
        s.finish();
        if (!cfg.data.schema_path.empty()) {
            try {
                cfg.data.schema = load_schema(cfg.data.schema_path);
            } catch (const DataError& e) {
                throw ConfigError(e.what());
            }
        }
        // An explicit label column overrides the schema adapter's.
        if (label_column) cfg.data.schema.label_column = *label_column;
    }
    {
        auto s = section("split");
        s.read("train_fraction", [&](const std::string& v) { cfg.train_fraction = to_double(v); });
        s.read("stratified", [&](const std::string& v) { cfg.stratified_split = to_bool(v); });
        s.read("normalize", [&](const std::string& v) {
            if (v == "full") cfg.normalize = NormalizeFit::full;
            else if (v == "train") cfg.normalize = NormalizeFit::train;
            else if (v == "none") cfg.normalize = NormalizeFit::none;
            else throw std::invalid_argument("expected full, train or none");
        });
        s.finish();
    }
    {
        auto s = section("smote");
        s.read("enabled", [&](const std::string& v) { cfg.smote.enabled = to_bool(v); });
        s.read("k", [&](const std::string& v) { cfg.smote.k = to_size(v); });
        s.read("target", [&](const std::string& v) { cfg.smote.target = to_size(v); });
        s.read("stage", [&](const std::string& v) {
            if (v == "post_split") cfg.smote.stage = SmoteStage::post_split;
            else if (v == "pre_split") cfg.smote.stage = SmoteStage::pre_split;
            else throw std::invalid_argument("expected post_split or pre_split");
        });
        s.finish();
    }
    {
        auto s = section("selection");
        s.read("method", [&](const std::string& v) {
            if (v == "igbfs") cfg.selection.method = SelectionMethod::igbfs;
            else if (v == "cbfs") cfg.selection.method = SelectionMethod::cbfs;
            else if (v == "none") cfg.selection.method.reset();
            else throw std::invalid_argument("expected igbfs, cbfs or none");
        });
        s.read("policy", [&](const std::string& v) {
            if (v == "top_k") cfg.selection.policy.kind = SelectionPolicy::Kind::top_k;
            else if (v == "relative_threshold") cfg.selection.policy.kind = SelectionPolicy::Kind::relative_threshold;
            else throw std::invalid_argument("expected top_k or relative_threshold");
        });
        s.read("top_k", [&](const std::string& v) { cfg.selection.policy.k = to_size(v); });
        s.read("threshold", [&](const std::string& v) { cfg.selection.policy.fraction = to_double(v); });
        s.read("bins", [&](const std::string& v) { cfg.selection.discretization.bins = to_size(v); });
        s.read("cbfs_mode", [&](const std::string& v) {
            if (v == "ranking") cfg.selection.cbfs_mode = CbfsMode::ranking;
            else if (v == "greedy") cfg.selection.cbfs_mode = CbfsMode::greedy_merit;
            else throw std::invalid_argument("expected ranking or greedy");
        });
        s.read("stage", [&](const std::string& v) {
            if (v == "post_smote") cfg.selection.stage = SelectionStage::post_smote;
            else if (v == "pre_smote") cfg.selection.stage = SelectionStage::pre_smote;
            else throw std::invalid_argument("expected post_smote or pre_smote");
        });
        s.finish();
    }
    {
        auto s = section("model");
        s.read("classifier", [&](const std::string& v) { cfg.model.variant = parse_model_kind(v); });
        s.read("k", [&](const std::string& v) { cfg.model.knn_k = to_size(v); });
        s.read("trees", [&](const std::string& v) { cfg.model.rf_trees = to_size(v); });
        s.read("criterion", [&](const std::string& v) { cfg.model.rf_criterion = parse_criterion(v); });
        s.finish();
    }
    {
        auto& o = cfg.optimizer;
        auto s = section("optimizer");
        s.read("enabled", [&](const std::string& v) { o.enabled = to_bool(v); });
        s.read("id", [&](const std::string& v) { o.id = parse_optimizer(v); });
        s.read("budget", [&](const std::string& v) { o.budget = to_size(v); });
        s.read("cv_folds", [&](const std::string& v) { o.cv_folds = to_size(v); });
        s.read("train_rows", [&](const std::string& v) { o.train_rows = to_size(v); });
        s.read("pso_swarm", [&](const std::string& v) { o.pso.swarm_size = to_size(v); });
        s.read("pso_iterations", [&](const std::string& v) { o.pso.iterations = to_size(v); });
        s.read("pso_inertia", [&](const std::string& v) { o.pso.inertia = to_double(v); });
        s.read("pso_c1", [&](const std::string& v) { o.pso.c1 = to_double(v); });
        s.read("pso_c2", [&](const std::string& v) { o.pso.c2 = to_double(v); });
        s.read("ga_population", [&](const std::string& v) { o.ga.population = to_size(v); });
        s.read("ga_generations", [&](const std::string& v) { o.ga.generations = to_size(v); });
        s.read("ga_crossover", [&](const std::string& v) { o.ga.crossover_rate = to_double(v); });
        s.read("ga_mutation", [&](const std::string& v) { o.ga.mutation_rate = to_double(v); });
        s.read("ga_patience", [&](const std::string& v) { o.ga.patience = to_size(v); });
        s.read("init_points", [&](const std::string& v) { o.gp.init_points = o.tpe.init_points = to_size(v); });
        s.read("gp_pool", [&](const std::string& v) { o.gp.pool_size = to_size(v); });
        s.read("tpe_gamma", [&](const std::string& v) { o.tpe.gamma = to_double(v); });
        s.read("tpe_pool", [&](const std::string& v) { o.tpe.pool_size = to_size(v); });
        s.finish();
    }
    {
        auto s = section("learning_curve");
        s.read("enabled", [&](const std::string& v) { cfg.learning_curve.enabled = to_bool(v); });
        s.read("fractions", [&](const std::string& v) {
            cfg.learning_curve.fractions.clear();
            for (const auto& item : split_list(v)) cfg.learning_curve.fractions.push_back(to_double(item));
        });
        s.read("folds", [&](const std::string& v) { cfg.learning_curve.folds = to_size(v); });
        s.read("epsilon", [&](const std::string& v) { cfg.learning_curve.epsilon = to_double(v); });
        s.read("reduce_training", [&](const std::string& v) { cfg.learning_curve.reduce_training = to_bool(v); });
        s.finish();
    }
    {
        auto s = section("pca");
        s.read("enabled", [&](const std::string& v) { cfg.pca.enabled = to_bool(v); });
        s.read("max_rows", [&](const std::string& v) { cfg.pca.max_rows = to_size(v); });
        s.finish();
    }
    {
        auto s = section("run");
        s.read("seed", [&](const std::string& v) { cfg.seed = to_u64(v); });
        s.read("out_dir", [&](const std::string& v) { cfg.out_dir = to_path(v, base_dir); });
        s.finish();
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file " + path.string());
    return parse_config(in, path.parent_path());
}

std::string canonical_config(const PipelineConfig& cfg) {
    std::ostringstream out;
    const auto list = [](const auto& items) {
        std::string s;
        for (const auto& x : items) s += (s.empty() ? "" : ",") + std::string(x);
        return s;
    };
    const auto& sc = cfg.data.schema;
    out << "data.path=" << cfg.data.path.generic_string() << '\n'
        << "data.label_column=" << sc.label_column << '\n'
        << "data.benign=" << list(sc.labels.benign) << '\n'
        << "data.attack=" << list(sc.labels.attack) << '\n'
        << "data.drop=" << list(sc.drop_columns) << '\n'
        << "data.non_finite=" << (sc.non_finite == NonFinitePolicy::reject ? "reject" : "drop") << '\n'
        << "data.delimiter=" << static_cast<int>(sc.delimiter) << '\n'
        << "data.sample_rows=" << cfg.data.sample_rows << '\n'
        << "split.train_fraction=" << format_number(cfg.train_fraction) << '\n'
        << "split.stratified=" << cfg.stratified_split << '\n'
        << "split.normalize=" << to_string(cfg.normalize) << '\n'
        << "smote.enabled=" << cfg.smote.enabled << '\n'
        << "smote.k=" << cfg.smote.k << '\n'
        << "smote.target=" << cfg.smote.target << '\n'
        << "smote.stage=" << to_string(cfg.smote.stage) << '\n'
        << "selection.method=" << (cfg.selection.method ? to_string(*cfg.selection.method) : "none") << '\n'
        << "selection.policy="
        << (cfg.selection.policy.kind == SelectionPolicy::Kind::top_k ? "top_k" : "relative_threshold") << '\n'
        << "selection.top_k=" << cfg.selection.policy.k << '\n'
        << "selection.threshold=" << format_number(cfg.selection.policy.fraction) << '\n'
        << "selection.bins=" << cfg.selection.discretization.bins << '\n'
        << "selection.cbfs_mode=" << (cfg.selection.cbfs_mode == CbfsMode::ranking ? "ranking" : "greedy") << '\n'
        << "selection.stage=" << to_string(cfg.selection.stage) << '\n'
        << "model.classifier=" << to_string(cfg.model.variant) << '\n'
        << "model.k=" << cfg.model.knn_k << '\n'
        << "model.trees=" << cfg.model.rf_trees << '\n'
        << "model.criterion=" << to_string(cfg.model.rf_criterion) << '\n';
    const auto& o = cfg.optimizer;
    out << "optimizer.enabled=" << o.enabled << '\n'
        << "optimizer.id=" << to_string(o.id) << '\n'
        << "optimizer.budget=" << o.budget << '\n'
        << "optimizer.cv_folds=" << o.cv_folds << '\n'
        << "optimizer.train_rows=" << o.train_rows << '\n'
        << "optimizer.pso=" << o.pso.swarm_size << ',' << o.pso.iterations << ',' << format_number(o.pso.inertia) << ','
        << format_number(o.pso.c1) << ',' << format_number(o.pso.c2) << '\n'
        << "optimizer.ga=" << o.ga.population << ',' << o.ga.generations << ',' << format_number(o.ga.crossover_rate)
        << ',' << format_number(o.ga.mutation_rate) << ',' << o.ga.patience << '\n'
        << "optimizer.gp=" << o.gp.init_points << ',' << o.gp.pool_size << '\n'
        << "optimizer.tpe=" << o.tpe.init_points << ',' << format_number(o.tpe.gamma) << ',' << o.tpe.pool_size << '\n';
    const auto& lc = cfg.learning_curve;
    std::vector<std::string> fractions;
    for (double f : lc.fractions) fractions.push_back(format_number(f));
    out << "learning_curve.enabled=" << lc.enabled << '\n'
        << "learning_curve.fractions=" << list(fractions) << '\n'
        << "learning_curve.folds=" << lc.folds << '\n'
        << "learning_curve.epsilon=" << format_number(lc.epsilon) << '\n'
        << "learning_curve.reduce_training=" << lc.reduce_training << '\n'
        << "pca.enabled=" << cfg.pca.enabled << '\n'
        << "pca.max_rows=" << cfg.pca.max_rows << '\n'
        << "run.seed=" << cfg.seed << '\n';
    return out.str();
}

std::string config_hash(const PipelineConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_config(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace nids
