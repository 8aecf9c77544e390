#include <algorithm>
#include <chrono>
#include <cmath>

#include "nids/pipeline.hpp"
#include "nids/random.hpp"

namespace nids {

namespace {

// RNG streams derived from the master seed, one per stage.
enum Stream : std::uint64_t {
    kSampleStream = 1,
    kSplitStream,
    kSmoteStream,
    kOptimizerStream,
    kFitStream,
    kCurveStream,
    kPcaStream,
    kReduceStream,
};

class StageRunner {
public:
    StageRunner(RunReport& report, const StageObserver& observer) : report_(report), observer_(observer) {}

    template <typename F>
    auto run(const std::string& stage, F&& body) {
        const auto start = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(body())>) {
                body();
                finish(stage, start);
            } else {
                auto out = body();
                finish(stage, start);
                return out;
            }
        } catch (const StageError&) {
            throw;
        } catch (const DataError& e) {
            throw StageError(stage, e.what(), true);
        } catch (const std::exception& e) {
            throw StageError(stage, e.what(), false);
        }
    }

    void mark(const std::string& stage, const char* status) { report_.stages.emplace_back(stage, status); }

    void notify(const std::string& stage, const Dataset* input, const Dataset* train = nullptr,
                const Dataset* test = nullptr) const {
        if (observer_) observer_({stage, input, train, test});
    }

private:
    void finish(const std::string& stage, std::chrono::steady_clock::time_point start) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        report_.stages.emplace_back(stage, "done");
        report_.timings.emplace_back(stage, std::round(elapsed.count() * 1000.0) / 1000.0);
    }

    RunReport& report_;
    const StageObserver& observer_;
};

int level(PipelineGoal g) {
    switch (g) {
        case PipelineGoal::preprocess: return 0;
        case PipelineGoal::select: return 1;
        case PipelineGoal::learning_curve: return 2;
        case PipelineGoal::optimize: return 3;
        case PipelineGoal::run: return 4;
        case PipelineGoal::pca: return 0;
    }
    return 0;
}

void require_both_classes(const Dataset& d, const std::string& what) {
    if (d.count(0) == 0 || d.count(1) == 0)
        throw DataError(what + " must contain both benign and attack rows (" + std::to_string(d.count(0)) +
                        " benign, " + std::to_string(d.count(1)) + " attack)");
}

OptimizationTrace run_optimizer(const PipelineConfig::Optimizer& o, const SearchSpace& space,
                                const Objective& objective, std::uint64_t seed) {
    switch (o.id) {
        case OptimizerId::rs: return random_search(space, objective, o.budget, seed);
        case OptimizerId::pso: {
            auto cfg = o.pso;
            cfg.seed = seed;
            return pso_optimize(space, objective, cfg);
        }
        case OptimizerId::ga: {
            auto cfg = o.ga;
            cfg.seed = seed;
            return ga_optimize(space, objective, cfg);
        }
        case OptimizerId::bo_gp: return bo_gp_optimize(space, objective, o.budget, seed, o.gp);
        case OptimizerId::bo_tpe: return bo_tpe_optimize(space, objective, o.budget, seed, o.tpe);
    }
    throw std::logic_error("unhandled optimizer id");
}

}  // namespace

const char* to_string(PipelineGoal g) {
    switch (g) {
        case PipelineGoal::preprocess: return "preprocess";
        case PipelineGoal::select: return "select";
        case PipelineGoal::learning_curve: return "learning_curve";
        case PipelineGoal::optimize: return "optimize";
        case PipelineGoal::run: return "run";
        case PipelineGoal::pca: return "pca";
    }
    return "?";
}

RunResult run_pipeline(const PipelineConfig& cfg, PipelineGoal goal, const StageObserver& observer) {
    cfg.validate();
    RunResult result;
    RunReport& rep = result.report;
    RunArtifacts& art = result.artifacts;
    rep.goal = to_string(goal);
    rep.seed = cfg.seed;
    rep.config_hash = config_hash(cfg);
    StageRunner stages(rep, observer);

    const bool curve_on = cfg.learning_curve.enabled || goal == PipelineGoal::learning_curve;
    const bool pca_on = cfg.pca.enabled || goal == PipelineGoal::pca;
    const bool smote_pre = cfg.smote.enabled && cfg.smote.stage == SmoteStage::pre_split;
    const bool select_pre = cfg.selection.method && cfg.selection.stage == SelectionStage::pre_smote;
    const auto stream = [&](Stream s) { return derive_seed(cfg.seed, s); };

    // Marks every stage in `names` that has not been recorded yet.
    const auto mark_rest = [&](std::initializer_list<const char*> names, const char* status) {
        for (const char* n : names) {
            const bool recorded = std::any_of(rep.stages.begin(), rep.stages.end(),
                                              [&](const auto& s) { return s.first == n; });
            if (!recorded) stages.mark(n, status);
        }
    };
    const auto stop_here = [&]() {
        mark_rest({"normalize", "smote", "split", "select", "learning_curve", "optimize", "fit", "evaluate", "pca"},
                  "skipped");
        return result;
    };

    const auto raw = stages.run("ingest", [&] {
        return load_csv(cfg.data.path, cfg.data.schema.label_column, {cfg.data.schema.delimiter});
    });
    stages.notify("ingest", nullptr);

    Dataset data = stages.run("preprocess", [&] {
        Dataset d = preprocess(raw, cfg.data.schema.labels, {cfg.data.schema.drop_columns, cfg.data.schema.non_finite});
        if (cfg.data.sample_rows > 0 && cfg.data.sample_rows < d.rows())
            d = subset(d, stratified_sample_indices(d.labels, cfg.data.sample_rows, stream(kSampleStream)));
        d.validate();
        return d;
    });
    stages.notify("preprocess", &data);
    rep.sizes.rows = data.rows();
    rep.sizes.features = data.cols();

    if (cfg.normalize == NormalizeFit::full) {
        data = stages.run("normalize", [&] { return apply_zscore(data, fit_zscore(data)); });
        stages.notify("normalize", &data);
    } else if (cfg.normalize == NormalizeFit::none) {
        stages.mark("normalize", "disabled");
    }

    if (goal == PipelineGoal::preprocess) {
        art.cleaned = data;
        return stop_here();
    }

    const auto run_pca = [&](const Dataset& source) {
        stages.run("pca", [&] {
            Dataset input = source;
            if (cfg.pca.max_rows > 0 && cfg.pca.max_rows < input.rows())
                input = subset(input, stratified_sample_indices(input.labels, cfg.pca.max_rows, stream(kPcaStream)));
            art.pca = pca2(input);
            art.pca_labels = input.labels;
            rep.pca = PcaSummary{input.rows(), art.pca->explained_variance_ratio[0],
                                 art.pca->explained_variance_ratio[1]};
        });
        stages.notify("pca", &source);
    };

    if (goal == PipelineGoal::pca) {
        run_pca(data);
        return stop_here();
    }
    const Dataset projection_source = pca_on ? data : Dataset{};

    const auto run_smote = [&](Dataset& target) {
        const Dataset before = target;
        target = stages.run("smote", [&] {
            return oversample(before, {cfg.smote.k, cfg.smote.target, stream(kSmoteStream)});
        });
        return before;
    };

    if (smote_pre) {
        const Dataset before = run_smote(data);
        stages.notify("smote", &before);
    }

    TrainTestSplit parts = stages.run("split", [&] {
        require_both_classes(data, "the dataset");
        auto p = split_train_test(data, {cfg.train_fraction, stream(kSplitStream), cfg.stratified_split});
        require_both_classes(p.train, "the training partition");
        return p;
    });
    stages.notify("split", &data, &parts.train, &parts.test);
    Dataset& train = parts.train;
    Dataset& test = parts.test;

    if (cfg.normalize == NormalizeFit::train) {
        stages.run("normalize", [&] {
            const auto params = fit_zscore(train);
            train = apply_zscore(train, params);
            test = apply_zscore(test, params);
        });
        stages.notify("normalize", &train, &train, &test);
    }

    rep.sizes.train_rows = train.rows();
    rep.sizes.test_rows = test.rows();
    rep.sizes.train_minority_before = std::min(train.count(0), train.count(1));

    const auto run_select = [&] {
        const Dataset input = train;
        auto sel = stages.run("select", [&] {
            auto s = *cfg.selection.method == SelectionMethod::igbfs
                         ? select_igbfs(input, cfg.selection.discretization, cfg.selection.policy)
                         : select_cbfs(input, cfg.selection.cbfs_mode, cfg.selection.policy);
            if (s.selected.empty()) throw DataError("no feature passed the selection policy");
            train = project(train, s);
            test = project(test, s);
            return s;
        });
        stages.notify("select", &input, &train, &test);
        SelectionSummary summary;
        summary.method = to_string(sel.method);
        summary.selected = sel.selected_names();
        for (const auto& fs : sel.ranking()) summary.scores.emplace_back(sel.feature_names[fs.feature_index], fs.score);
        rep.selection = std::move(summary);
        art.selection = std::move(sel);
    };

    if (select_pre) run_select();

    if (cfg.smote.enabled && !smote_pre) {
        const Dataset before = run_smote(train);
        stages.notify("smote", &before, &train, &test);
    } else if (!cfg.smote.enabled) {
        stages.mark("smote", "disabled");
    }
    rep.sizes.train_rows_after_smote = train.rows();
    rep.sizes.train_minority_after = std::min(train.count(0), train.count(1));

    if (!cfg.selection.method) {
        stages.mark("select", "disabled");
    } else if (!select_pre) {
        run_select();
    }

    if (level(goal) < level(PipelineGoal::learning_curve)) return stop_here();

    std::optional<MinimumSize> minimum;
    if (curve_on) {
        const auto& lc = cfg.learning_curve;
        art.learning_curve = stages.run("learning_curve", [&] {
            return learning_curve(train, cfg.model, lc.fractions, lc.folds, stream(kCurveStream));
        });
        stages.notify("learning_curve", &train, &train, &test);
        minimum = minimum_training_size(*art.learning_curve, lc.epsilon);
        rep.learning_curve =
            CurveSummary{art.learning_curve->points.size(), minimum->train_size, minimum->converged, lc.epsilon};
    } else {
        stages.mark("learning_curve", "disabled");
    }

    if (level(goal) < level(PipelineGoal::optimize)) return stop_here();

    HyperParams hp = cfg.model;
    if (cfg.optimizer.enabled) {
        const auto& o = cfg.optimizer;
        std::size_t rows = o.train_rows;
        if (cfg.learning_curve.reduce_training && minimum) rows = rows == 0 ? minimum->train_size : std::min(rows, minimum->train_size);
        Dataset opt_train = train;
        if (rows > 0 && rows < train.rows())
            opt_train = subset(train, stratified_sample_indices(train.labels, rows, stream(kReduceStream)));

        const SearchSpace space = reference_space(cfg.model.variant);
        const std::uint64_t seed = stream(kOptimizerStream);
        auto trace = stages.run("optimize", [&] {
            const auto objective = make_cv_objective(space, cfg.model.variant, opt_train, o.cv_folds, seed);
            return run_optimizer(o, space, objective, seed);
        });
        stages.notify("optimize", &opt_train, &train, &test);
        hp = hyperparams_from(space, trace.best().candidate, cfg.model.variant);

        OptimizationSummary summary;
        summary.optimizer = trace.optimizer;
        summary.budget = trace.budget;
        summary.evaluations = trace.trials.size();
        summary.objective_calls = static_cast<std::size_t>(
            std::count_if(trace.trials.begin(), trace.trials.end(), [](const Trial& t) { return !t.cached; }));
        summary.training_rows = opt_train.rows();
        summary.cv_folds = o.cv_folds;
        for (std::size_t d = 0; d < space.dims(); ++d)
            summary.best_candidate.emplace_back(space.params()[d].name,
                                                space.params()[d].value_string(trace.best().candidate.index[d]));
        summary.best_score = trace.best().score;
        summary.best_eval_index = trace.best().eval_index;
        rep.optimization = std::move(summary);
        art.trace = std::move(trace);
        art.space = space;
    } else {
        stages.mark("optimize", "disabled");
    }

    if (level(goal) < level(PipelineGoal::run)) return stop_here();

    art.model = stages.run("fit", [&] { return fit(train, hp, stream(kFitStream)); });
    stages.notify("fit", &train, &train, &test);
    rep.model = hp;

    stages.run("evaluate", [&] {
        const auto predicted = predict(*art.model, test.features);
        const auto cm = confusion(predicted, test.labels);
        rep.confusion = cm;
        rep.test_metrics = metrics(cm);
    });
    stages.notify("evaluate", &test, &train, &test);

    if (pca_on) {
        run_pca(projection_source);
    } else {
        stages.mark("pca", "disabled");
    }
    return result;
}

}  // namespace nids
