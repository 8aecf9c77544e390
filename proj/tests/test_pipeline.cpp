#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "nids/pipeline.hpp"
#include "support/pipeline_fixture.hpp"
#include "support/synthetic.hpp"

using namespace nids;
using nids::testing::TempDir;

namespace {

PipelineConfig parse(const std::string& text, const std::filesystem::path& base = "/base") {
    std::istringstream in(text);
    return parse_config(in, base);
}

std::string status(const RunReport& r, const std::string& stage) {
    for (const auto& [name, s] : r.stages) {
        if (name == stage) return s;
    }
    return "";
}

std::vector<std::string> stage_names(const RunReport& r, const std::string& only) {
    std::vector<std::string> out;
    for (const auto& [name, s] : r.stages) {
        if (s == only) out.push_back(name);
    }
    return out;
}

RunReport sample_report() {
    RunReport r;
    r.goal = "run";
    r.seed = 42;
    r.config_hash = "0123456789abcdef";
    r.stages = {{"ingest", "done"}, {"preprocess", "done"}, {"smote", "done"}, {"select", "done"},
                {"learning_curve", "disabled"}, {"optimize", "done"}, {"fit", "done"}, {"evaluate", "done"},
                {"pca", "disabled"}};
    r.timings = {{"ingest", 0.012}, {"preprocess", 0.003}, {"optimize", 1.25}};
    r.sizes = {1000, 6, 700, 300, 1260, 70, 630};
    r.selection = SelectionSummary{"igbfs", {"f1", "f0"}, {{"f1", 0.5}, {"f0", 0.25}, {"f2", 0.0}}};
    r.optimization = OptimizationSummary{"bo-tpe", 30, 30, 28, 1260, 3, {{"trees", "50"}, {"criterion", "entropy"}},
                                         0.9875, 17};
    HyperParams hp;
    hp.variant = ModelKind::random_forest;
    hp.rf_trees = 50;
    hp.rf_criterion = Criterion::entropy;
    r.model = hp;
    r.confusion = ConfusionMatrix{90, 85, 5, 10};
    r.test_metrics = metrics(*r.confusion);
    return r;
}

}  // namespace

TEST_CASE("config defaults and overrides") {
    const auto cfg = parse("[data]\npath = d.csv\n");
    CHECK(cfg.data.path == std::filesystem::path("/base/d.csv"));
    CHECK(cfg.train_fraction == 0.7);
    CHECK(cfg.smote.enabled);
    CHECK(cfg.selection.method == SelectionMethod::igbfs);
    CHECK(cfg.optimizer.id == OptimizerId::bo_tpe);
    CHECK(cfg.model.variant == ModelKind::random_forest);
    CHECK(cfg.out_dir == std::filesystem::path("out"));

    const auto custom = parse(
        "; comment\n[data]\npath = /abs/d.csv\nlabel_column = Label\n"
        "[split]\ntrain_fraction = 0.8\nstratified = true\nnormalize = train\n"
        "[smote]\nenabled = false\n[selection]\nmethod = none\n"
        "[model]\nclassifier = knn\nk = 7\n"
        "[optimizer]\nid = ga\nga_population = 6\nga_generations = 3\n"
        "[learning_curve]\nenabled = true\nfractions = 0.5, 1.0\n"
        "[run]\nseed = 99\n");
    CHECK(custom.data.path == std::filesystem::path("/abs/d.csv"));
    CHECK(custom.data.schema.label_column == "Label");
    CHECK(custom.train_fraction == 0.8);
    CHECK(custom.stratified_split);
    CHECK(custom.normalize == NormalizeFit::train);
    CHECK_FALSE(custom.smote.enabled);
    CHECK_FALSE(custom.selection.method.has_value());
    CHECK(custom.model.variant == ModelKind::knn);
    CHECK(custom.model.knn_k == 7);
    CHECK(custom.optimizer.ga.population == 6);
    CHECK(custom.learning_curve.fractions == std::vector<double>{0.5, 1.0});
    CHECK(custom.seed == 99);
}

TEST_CASE("config schema adapters") {
    TempDir dir("cfg-schema");
    dir.write("s.ini", "label_column = Label\nbenign = BENIGN\ndrop = Flow ID, Timestamp\nnon_finite = drop\n");
    const auto cfg = parse("[data]\npath = d.csv\nschema = s.ini\n", dir.path());
    CHECK(cfg.data.schema.label_column == "Label");
    CHECK(cfg.data.schema.drop_columns == std::vector<std::string>{"Flow ID", "Timestamp"});
    CHECK(cfg.data.schema.non_finite == NonFinitePolicy::drop_row);
    CHECK_THROWS_AS(parse("[data]\npath = d.csv\nschema = missing.ini\n", dir.path()), ConfigError);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse("[data]\n"), ConfigError);
    CHECK_THROWS_AS(parse("[data]\npath = d.csv\ncolour = red\n"), ConfigError);
    CHECK_THROWS_AS(parse("path = d.csv\n[data]\npath = d.csv\n"), ConfigError);
    CHECK_THROWS_AS(parse("[data]\npath = d.csv\n[extra]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[data]\npath = d.csv\n[split]\ntrain_fraction = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("[data]\npath = d.csv\n[split]\ntrain_fraction = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse("[data]\npath = d.csv\n[optimizer]\nid = grid\n"), ConfigError);
    CHECK_THROWS_AS(parse("[data]\npath = d.csv\n[selection]\nmethod = pca\n"), ConfigError);
    CHECK_THROWS_AS(parse("[data]\npath = d.csv\n[smote]\nenabled = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse("[data]\npath = d.csv\n[learning_curve]\nenabled = true\nfractions = 0.5, 0.2\n"), ConfigError);
    CHECK_THROWS_AS(parse("[data\npath = d.csv\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
    try {
        parse("[data]\npath = d.csv\n[model]\ntrees = many\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("trees") != std::string::npos);
    }
}

TEST_CASE("config hash") {
    const auto a = parse("[data]\npath = d.csv\n[run]\nseed = 1\n");
    const auto b = parse("[run]\nseed=1\n\n[data]\n  path =   d.csv\n");
    const auto c = parse("[data]\npath = d.csv\n[run]\nseed = 2\n");
    CHECK(config_hash(a).size() == 16);
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c));
    CHECK(canonical_config(a).find("optimizer.id=bo-tpe") != std::string::npos);
}

TEST_CASE("report round trip and stable bytes") {
    const auto r = sample_report();
    const auto text = report_to_json(r);
    CHECK(report_from_json(text) == r);
    CHECK(report_to_json(report_from_json(text)) == text);

    RunReport bare;
    bare.goal = "preprocess";
    bare.stages = {{"ingest", "done"}, {"select", "skipped"}};
    CHECK(report_from_json(report_to_json(bare)) == bare);

    CHECK_THROWS_AS(report_from_json("{"), DataError);
    CHECK_THROWS_AS(report_from_json("{\"format\":\"other\"}"), DataError);
}

TEST_CASE("report matches the golden file") {
    const std::filesystem::path golden = std::filesystem::path(NIDS_SOURCE_DIR) / "tests/golden/report.json";
    const auto text = report_to_json(sample_report());
    if (std::getenv("NIDS_UPDATE_GOLDEN")) {
        std::ofstream(golden, std::ios::binary) << text;
    }
    CHECK(nids::testing::read_file(golden) == text);
}

TEST_CASE("pipeline end to end on an imbalanced blob set") {
    TempDir dir("pipe-e2e");
    const auto cfg = nids::testing::small_pipeline(dir);
    const auto result = run_pipeline(cfg);
    const auto& r = result.report;
    REQUIRE(r.test_metrics);
    CHECK(r.test_metrics->accuracy >= 0.97);
    CHECK(r.sizes.rows == 600);
    CHECK(r.sizes.train_rows + r.sizes.test_rows == 600);
    CHECK(r.sizes.train_minority_after > r.sizes.train_minority_before);
    REQUIRE(r.selection);
    CHECK(r.selection->selected.size() == 4);
    REQUIRE(r.optimization);
    CHECK(r.optimization->evaluations == 3);
    CHECK(r.confusion->total() == r.sizes.test_rows);

    const std::vector<std::string> order{"ingest", "preprocess", "normalize", "split", "smote", "select",
                                         "optimize", "fit", "evaluate"};
    CHECK(stage_names(r, "done") == order);
    for (const auto& stage : order) {
        const bool timed = std::any_of(r.timings.begin(), r.timings.end(), [&](const auto& t) { return t.first == stage; });
        CHECK(timed);
    }
    CHECK(status(r, "learning_curve") == "disabled");
    CHECK(status(r, "pca") == "disabled");
}

TEST_CASE("training-only stages never see test rows") {
    TempDir dir("pipe-leak");
    auto cfg = nids::testing::small_pipeline(dir);
    cfg.learning_curve.enabled = true;
    cfg.learning_curve.fractions = {0.5, 1.0};
    cfg.learning_curve.folds = 3;

    std::set<std::vector<double>> test_rows;
    std::vector<std::string> checked;
    const auto row_set = [](const Dataset& d) {
        std::set<std::vector<double>> rows;
        for (std::size_t r = 0; r < d.rows(); ++r) rows.emplace(d.features.row(r).begin(), d.features.row(r).end());
        return rows;
    };
    std::size_t test_size = 0;
    const StageObserver observer = [&](const StageEvent& e) {
        if (e.stage == "split") {
            test_rows = row_set(*e.test);
            test_size = e.test->rows();
            return;
        }
        if (e.stage == "smote" || e.stage == "select" || e.stage == "learning_curve" || e.stage == "optimize" ||
            e.stage == "fit") {
            REQUIRE(e.input);
            // Selection projects columns, so compare only while the width is unchanged.
            if (!test_rows.empty() && e.input->cols() == test_rows.begin()->size()) {
                for (const auto& row : row_set(*e.input)) CHECK(test_rows.count(row) == 0);
            }
            CHECK(e.test->rows() == test_size);
            checked.push_back(e.stage);
        }
    };
    run_pipeline(cfg, PipelineGoal::run, observer);
    CHECK(checked == std::vector<std::string>{"smote", "select", "learning_curve", "optimize", "fit"});
}

TEST_CASE("selected training rows are disjoint from test rows after projection") {
    TempDir dir("pipe-leak2");
    const auto cfg = nids::testing::small_pipeline(dir);
    std::set<std::vector<double>> test_rows;
    std::size_t overlaps = 0;
    run_pipeline(cfg, PipelineGoal::run, [&](const StageEvent& e) {
        if (e.stage != "select") return;
        for (std::size_t r = 0; r < e.test->rows(); ++r) test_rows.emplace(e.test->features.row(r).begin(), e.test->features.row(r).end());
        for (std::size_t r = 0; r < e.train->rows(); ++r)
            overlaps += test_rows.count({e.train->features.row(r).begin(), e.train->features.row(r).end()});
    });
    CHECK(!test_rows.empty());
    CHECK(overlaps == 0);
}

TEST_CASE("pipeline is deterministic apart from timings") {
    TempDir dir("pipe-det");
    const auto cfg = nids::testing::small_pipeline(dir);
    const auto a = run_pipeline(cfg);
    const auto b = run_pipeline(cfg);
    CHECK(report_to_json(nids::testing::without_timings(a.report)) ==
          report_to_json(nids::testing::without_timings(b.report)));
    auto other = cfg;
    other.seed = 12;
    CHECK(run_pipeline(other).report.config_hash != a.report.config_hash);
}

TEST_CASE("disabled stages are marked") {
    TempDir dir("pipe-off");
    auto cfg = nids::testing::small_pipeline(dir);
    cfg.smote.enabled = false;
    cfg.selection.method.reset();
    cfg.optimizer.enabled = false;
    const auto r = run_pipeline(cfg).report;
    CHECK(status(r, "smote") == "disabled");
    CHECK(status(r, "select") == "disabled");
    CHECK(status(r, "optimize") == "disabled");
    CHECK(r.sizes.train_rows_after_smote == r.sizes.train_rows);
    CHECK_FALSE(r.selection.has_value());
    const auto text = report_to_json(r);
    CHECK(text.find("\"selection\": \"disabled\"") != std::string::npos);
}

TEST_CASE("pipeline goals stop early") {
    TempDir dir("pipe-goal");
    const auto cfg = nids::testing::small_pipeline(dir);
    const auto pre = run_pipeline(cfg, PipelineGoal::preprocess);
    REQUIRE(pre.artifacts.cleaned);
    CHECK(pre.artifacts.cleaned->rows() == 600);
    CHECK(status(pre.report, "split") == "skipped");
    CHECK(status(pre.report, "evaluate") == "skipped");

    const auto sel = run_pipeline(cfg, PipelineGoal::select);
    CHECK(sel.artifacts.selection.has_value());
    CHECK(status(sel.report, "optimize") == "skipped");

    const auto lc = run_pipeline(cfg, PipelineGoal::learning_curve);
    CHECK(lc.artifacts.learning_curve.has_value());
    CHECK(status(lc.report, "fit") == "skipped");

    const auto pca = run_pipeline(cfg, PipelineGoal::pca);
    REQUIRE(pca.artifacts.pca);
    CHECK(pca.artifacts.pca->projection.rows() == 600);
    CHECK(status(pca.report, "smote") == "skipped");
}

TEST_CASE("stage errors name the stage") {
    TempDir dir("pipe-err");
    auto cfg = nids::testing::small_pipeline(dir);
    cfg.data.path = dir / "missing.csv";
    try {
        run_pipeline(cfg);
        FAIL("expected a StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "ingest");
        CHECK(e.data_error());
        CHECK(std::string(e.what()).find("ingest") != std::string::npos);
    }

    dir.write("benign.csv", "f,label\n1,BENIGN\n2,BENIGN\n3,BENIGN\n4,BENIGN\n");
    cfg.data.path = dir / "benign.csv";
    try {
        run_pipeline(cfg);
        FAIL("expected a StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "split");
    }
}

TEST_CASE("emit_report writes the report and side files") {
    TempDir dir("pipe-emit");
    auto cfg = nids::testing::small_pipeline(dir);
    cfg.learning_curve.enabled = true;
    cfg.learning_curve.fractions = {0.5, 1.0};
    cfg.pca.enabled = true;
    const auto result = run_pipeline(cfg);
    const auto files = emit_report(result, dir / "out");
    std::set<std::string> names;
    for (const auto& f : files) names.insert(f.filename().string());
    CHECK(names == std::set<std::string>{"report.json", "feature_scores.csv", "learning_curve.csv", "trace.csv",
                                         "trace.jsonl", "model.txt", "pca.csv"});
    CHECK_FALSE(std::filesystem::exists(dir / "out" / ".staging"));

    const auto trace_csv = nids::testing::read_file(dir / "out" / "trace.csv");
    CHECK(static_cast<std::size_t>(std::count(trace_csv.begin(), trace_csv.end(), '\n')) ==
          result.artifacts.trace->trials.size() + 1);
    CHECK(report_from_json(nids::testing::read_file(dir / "out" / "report.json")) == result.report);

    std::ifstream model_in(dir / "out" / "model.txt");
    const auto model = load_model(model_in);
    CHECK(std::holds_alternative<RandomForestModel>(model));

    const auto cleaned = run_pipeline(cfg, PipelineGoal::preprocess);
    const auto clean_files = emit_report(cleaned, dir / "clean");
    CHECK(clean_files.size() == 2);
    const auto reloaded = preprocess(load_csv(dir / "clean" / "clean.csv", "label"), LabelPolicy{});
    CHECK(reloaded.rows() == 600);
}

TEST_CASE("emit_report leaves nothing behind on failure") {
    TempDir dir("pipe-emit-fail");
    const auto cfg = nids::testing::small_pipeline(dir);
    const auto result = run_pipeline(cfg);

    // A directory squatting on one of the output names blocks the final move.
    std::filesystem::create_directories(dir / "out" / "trace.jsonl" / "keep");
    CHECK_THROWS(emit_report(result, dir / "out"));
    std::vector<std::string> left;
    for (const auto& e : std::filesystem::directory_iterator(dir / "out")) left.push_back(e.path().filename().string());
    CHECK(left == std::vector<std::string>{"trace.jsonl"});

    dir.write("plain-file", "x");
    CHECK_THROWS(emit_report(result, dir / "plain-file" / "sub"));
}
