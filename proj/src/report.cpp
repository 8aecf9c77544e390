#include <fstream>

#include "json.hpp"
#include "nids/pipeline.hpp"

namespace nids {

using nlohmann::ordered_json;

namespace {

std::string status_of(const RunReport& r, const std::string& stage) {
    for (const auto& [name, status] : r.stages) {
        if (name == stage) return status;
    }
    return "skipped";
}

ordered_json hyperparams_json(const HyperParams& hp) {
    ordered_json j;
    j["classifier"] = to_string(hp.variant);
    if (hp.variant == ModelKind::knn) {
        j["k"] = hp.knn_k;
    } else {
        j["trees"] = hp.rf_trees;
        j["criterion"] = to_string(hp.rf_criterion);
    }
    return j;
}

HyperParams hyperparams_from_json(const ordered_json& j) {
    HyperParams hp;
    hp.variant = parse_model_kind(j.at("classifier").get<std::string>());
    if (hp.variant == ModelKind::knn) {
        hp.knn_k = j.at("k").get<std::size_t>();
    } else {
        hp.rf_trees = j.at("trees").get<std::size_t>();
        hp.rf_criterion = parse_criterion(j.at("criterion").get<std::string>());
    }
    return hp;
}

template <typename T, typename F>
void put(ordered_json& out, const char* key, const std::optional<T>& value, const std::string& status, F&& encode) {
    out[key] = value ? encode(*value) : ordered_json(status);
}

template <typename T, typename F>
std::optional<T> take(const ordered_json& in, const char* key, F&& decode) {
    const auto& v = in.at(key);
    if (v.is_string()) return std::nullopt;
    return decode(v);
}

}  // namespace

std::string report_to_json(const RunReport& r) {
    ordered_json j;
    j["format"] = "nids-report";
    j["format_version"] = kReportFormat;
    j["version"] = kVersion;
    j["goal"] = r.goal;
    j["seed"] = r.seed;
    j["config_hash"] = r.config_hash;

    auto stages = ordered_json::array();
    for (const auto& [name, status] : r.stages) stages.push_back({{"name", name}, {"status", status}});
    j["stages"] = stages;

    j["data"] = {{"rows", r.sizes.rows},
                 {"features", r.sizes.features},
                 {"train_rows", r.sizes.train_rows},
                 {"test_rows", r.sizes.test_rows},
                 {"train_rows_after_smote", r.sizes.train_rows_after_smote},
                 {"train_minority_before", r.sizes.train_minority_before},
                 {"train_minority_after", r.sizes.train_minority_after}};

    put(j, "selection", r.selection, status_of(r, "select"), [](const SelectionSummary& s) {
        auto scores = ordered_json::array();
        for (const auto& [name, score] : s.scores) scores.push_back({{"feature", name}, {"score", score}});
        return ordered_json{{"method", s.method}, {"selected", s.selected}, {"scores", scores}};
    });

    put(j, "learning_curve", r.learning_curve, status_of(r, "learning_curve"), [](const CurveSummary& c) {
        return ordered_json{{"points", c.points},
                            {"minimum_training_size", c.minimum_size},
                            {"converged", c.converged},
                            {"epsilon", c.epsilon}};
    });

    put(j, "optimization", r.optimization, status_of(r, "optimize"), [](const OptimizationSummary& o) {
        ordered_json candidate = ordered_json::object();
        for (const auto& [name, value] : o.best_candidate) candidate[name] = value;
        return ordered_json{{"optimizer", o.optimizer},
                            {"budget", o.budget},
                            {"evaluations", o.evaluations},
                            {"objective_calls", o.objective_calls},
                            {"training_rows", o.training_rows},
                            {"cv_folds", o.cv_folds},
                            {"best", {{"candidate", candidate}, {"score", o.best_score}, {"eval_index", o.best_eval_index}}}};
    });

    put(j, "model", r.model, status_of(r, "fit"), hyperparams_json);

    if (r.confusion && r.test_metrics) {
        const auto& c = *r.confusion;
        const auto& m = *r.test_metrics;
        j["test"] = {{"confusion", {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}}},
                     {"accuracy", m.accuracy},
                     {"precision", m.precision},
                     {"recall", m.recall},
                     {"far", m.far},
                     {"precision_undefined", m.precision_undefined},
                     {"recall_undefined", m.recall_undefined},
                     {"far_undefined", m.far_undefined}};
    } else {
        j["test"] = status_of(r, "evaluate");
    }

    put(j, "pca", r.pca, status_of(r, "pca"), [](const PcaSummary& p) {
        return ordered_json{{"rows", p.rows},
                            {"explained_variance_ratio", {p.explained_variance_ratio_1, p.explained_variance_ratio_2}}};
    });

    ordered_json timings = ordered_json::object();
    for (const auto& [stage, seconds] : r.timings) timings[stage] = seconds;
    j["timings"] = timings;
    return j.dump(2) + "\n";
}

RunReport report_from_json(std::string_view text) {
    RunReport r;
    try {
        const auto j = ordered_json::parse(text);
        if (j.at("format").get<std::string>() != "nids-report") throw DataError("not a run report");
        if (j.at("format_version").get<int>() != kReportFormat) throw DataError("unsupported report format version");
        r.goal = j.at("goal").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.config_hash = j.at("config_hash").get<std::string>();
        for (const auto& s : j.at("stages"))
            r.stages.emplace_back(s.at("name").get<std::string>(), s.at("status").get<std::string>());

        const auto& d = j.at("data");
        r.sizes = {d.at("rows").get<std::size_t>(),
                   d.at("features").get<std::size_t>(),
                   d.at("train_rows").get<std::size_t>(),
                   d.at("test_rows").get<std::size_t>(),
                   d.at("train_rows_after_smote").get<std::size_t>(),
                   d.at("train_minority_before").get<std::size_t>(),
                   d.at("train_minority_after").get<std::size_t>()};

        r.selection = take<SelectionSummary>(j, "selection", [](const ordered_json& s) {
            SelectionSummary out;
            out.method = s.at("method").get<std::string>();
            out.selected = s.at("selected").get<std::vector<std::string>>();
            for (const auto& e : s.at("scores")) out.scores.emplace_back(e.at("feature").get<std::string>(), e.at("score").get<double>());
            return out;
        });
        r.learning_curve = take<CurveSummary>(j, "learning_curve", [](const ordered_json& c) {
            return CurveSummary{c.at("points").get<std::size_t>(), c.at("minimum_training_size").get<std::size_t>(),
                                c.at("converged").get<bool>(), c.at("epsilon").get<double>()};
        });
        r.optimization = take<OptimizationSummary>(j, "optimization", [](const ordered_json& o) {
            OptimizationSummary out;
            out.optimizer = o.at("optimizer").get<std::string>();
            out.budget = o.at("budget").get<std::size_t>();
            out.evaluations = o.at("evaluations").get<std::size_t>();
            out.objective_calls = o.at("objective_calls").get<std::size_t>();
            out.training_rows = o.at("training_rows").get<std::size_t>();
            out.cv_folds = o.at("cv_folds").get<std::size_t>();
            const auto& best = o.at("best");
            for (const auto& [name, value] : best.at("candidate").items())
                out.best_candidate.emplace_back(name, value.get<std::string>());
            out.best_score = best.at("score").get<double>();
            out.best_eval_index = best.at("eval_index").get<std::size_t>();
            return out;
        });
        r.model = take<HyperParams>(j, "model", hyperparams_from_json);

        const auto& t = j.at("test");
        if (!t.is_string()) {
            const auto& c = t.at("confusion");
            r.confusion = ConfusionMatrix{c.at("tp").get<std::size_t>(), c.at("tn").get<std::size_t>(),
                                          c.at("fp").get<std::size_t>(), c.at("fn").get<std::size_t>()};
            r.test_metrics = MetricsReport{t.at("accuracy").get<double>(),          t.at("precision").get<double>(),
                                           t.at("recall").get<double>(),            t.at("far").get<double>(),
                                           t.at("precision_undefined").get<bool>(), t.at("recall_undefined").get<bool>(),
                                           t.at("far_undefined").get<bool>()};
        }
        r.pca = take<PcaSummary>(j, "pca", [](const ordered_json& p) {
            const auto& ratio = p.at("explained_variance_ratio");
            return PcaSummary{p.at("rows").get<std::size_t>(), ratio.at(0).get<double>(), ratio.at(1).get<double>()};
        });
        for (const auto& [stage, seconds] : j.at("timings").items()) r.timings.emplace_back(stage, seconds.get<double>());
    } catch (const ordered_json::exception& e) {
        throw DataError(std::string("malformed run report: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("malformed run report: ") + e.what());
    }
    return r;
}

std::vector<std::filesystem::path> emit_report(const RunResult& result, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    const bool existed = fs::exists(dir, ec);
    const fs::path staging = dir / ".staging";
    std::vector<fs::path> written;
    try {
        fs::create_directories(staging);
        std::vector<std::string> names;
        const auto open = [&](const std::string& name) {
            names.push_back(name);
            std::ofstream out(staging / name, std::ios::binary);
            if (!out) throw DataError("cannot write " + (staging / name).string());
            return out;
        };
        const auto& art = result.artifacts;
        {
            auto out = open("report.json");
            out << report_to_json(result.report);
        }
        if (art.cleaned) {
            names.push_back("clean.csv");
            write_csv(*art.cleaned, staging / "clean.csv");
        }
        if (art.selection) {
            names.push_back("feature_scores.csv");
            write_scores_csv(*art.selection, staging / "feature_scores.csv");
        }
        if (art.learning_curve) {
            names.push_back("learning_curve.csv");
            write_learning_curve_csv(*art.learning_curve, staging / "learning_curve.csv");
        }
        if (art.trace && art.space) {
            {
                auto out = open("trace.csv");
                write_trace_csv(*art.trace, *art.space, out);
            }
            auto out = open("trace.jsonl");
            write_trace_jsonl(*art.trace, *art.space, out);
        }
        if (art.model) {
            auto out = open("model.txt");
            save_model(*art.model, out);
        }
        if (art.pca) {
            names.push_back("pca.csv");
            write_pca_csv(*art.pca, art.pca_labels, staging / "pca.csv");
        }
        for (const auto& name : names) {
            if (!fs::exists(staging / name)) throw DataError("failed to write " + name);
        }
        for (const auto& name : names) {
            fs::rename(staging / name, dir / name);
            written.push_back(dir / name);
        }
        fs::remove_all(staging);
    } catch (const fs::filesystem_error& e) {
        fs::remove_all(staging, ec);
        for (const auto& p : written) fs::remove(p, ec);
        if (!existed) fs::remove(dir, ec);
        throw DataError(std::string("cannot write report: ") + e.what());
    } catch (...) {
        fs::remove_all(staging, ec);
        for (const auto& p : written) fs::remove(p, ec);
        if (!existed) fs::remove(dir, ec);
        throw;
    }
    return written;
}

}  // namespace nids
