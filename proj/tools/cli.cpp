#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <ostream>

#include "nids/pipeline.hpp"

namespace nids {

namespace {

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config, "Pipeline configuration file")->required();
    cmd->add_option("--seed", opts.seed, "Master seed (overrides [run] seed)");
    cmd->add_option("--out-dir", opts.out_dir, "Output directory (overrides [run] out_dir)");
}

void print_summary(const RunReport& r, std::ostream& out) {
    out << "goal: " << r.goal << "  seed: " << r.seed << "  config: " << r.config_hash << '\n';
    out << "rows: " << r.sizes.rows << "  features: " << r.sizes.features;
    if (r.sizes.train_rows > 0)
        out << "  train: " << r.sizes.train_rows << " (" << r.sizes.train_rows_after_smote << " after smote)"
            << "  test: " << r.sizes.test_rows;
    out << '\n';
    if (r.selection) out << "selected features: " << r.selection->selected.size() << '\n';
    if (r.learning_curve)
        out << "minimum training size: " << r.learning_curve->minimum_size
            << (r.learning_curve->converged ? "" : " (not converged)") << '\n';
    if (r.optimization) {
        out << "best (" << r.optimization->optimizer << "):";
        for (const auto& [name, value] : r.optimization->best_candidate) out << ' ' << name << '=' << value;
        out << "  cv accuracy " << r.optimization->best_score << '\n';
    }
    if (r.test_metrics) {
        const auto& m = *r.test_metrics;
        out << "test accuracy " << m.accuracy << "  precision " << m.precision << "  recall " << m.recall << "  far "
            << m.far << '\n';
    }
    if (r.pca)
        out << "pca explained variance ratio " << r.pca->explained_variance_ratio_1 << ", "
            << r.pca->explained_variance_ratio_2 << '\n';
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Network intrusion detection training pipeline", "nids"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonOptions opts;
    std::string optimizer;
    std::optional<std::size_t> budget;

    struct Command {
        const char* name;
        const char* help;
        PipelineGoal goal;
    };
    const std::vector<Command> commands{
        {"preprocess", "Clean, encode and normalize a dataset; writes clean.csv", PipelineGoal::preprocess},
        {"select-features", "Score and select features on the training split", PipelineGoal::select},
        {"learning-curve", "Training and cross-validation accuracy against training size", PipelineGoal::learning_curve},
        {"optimize", "Search classifier hyper-parameters", PipelineGoal::optimize},
        {"evaluate", "Fit the configured classifier without tuning and score it on the test split", PipelineGoal::run},
        {"run", "Full pipeline", PipelineGoal::run},
        {"pca", "Two-component projection of the preprocessed data", PipelineGoal::pca},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_common(sub, opts);
        if (std::string(c.name) == "optimize" || std::string(c.name) == "run") {
            sub->add_option("--optimizer", optimizer, "rs, pso, ga, bo-gp or bo-tpe");
            sub->add_option("--budget", budget, "Evaluation budget for rs, bo-gp and bo-tpe");
        }
        subs.push_back(sub);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const auto chosen = app.get_subcommands();
        err << (chosen.empty() ? app.help() : chosen.front()->help());
        return 1;
    }

    std::size_t which = 0;
    while (which < subs.size() && !subs[which]->parsed()) ++which;
    const Command& command = commands.at(which);

    PipelineConfig cfg;
    try {
        cfg = load_config(opts.config);
        if (opts.seed) cfg.seed = *opts.seed;
        if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
        if (!optimizer.empty()) cfg.optimizer.id = parse_optimizer(optimizer);
        if (budget) cfg.optimizer.budget = *budget;
        if (std::string(command.name) == "evaluate") cfg.optimizer.enabled = false;
        if (std::string(command.name) == "optimize") cfg.optimizer.enabled = true;
        cfg.validate();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        const auto result = run_pipeline(cfg, command.goal);
        const auto files = emit_report(result, cfg.out_dir);
        print_summary(result.report, out);
        out << "wrote " << files.size() << " file(s) to " << cfg.out_dir.string() << '\n';
        return 0;
    } catch (const StageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace nids
