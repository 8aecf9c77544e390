#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nids/classifiers.hpp"
#include "nids/dataset.hpp"
#include "nids/evaluation.hpp"
#include "nids/feature_selection.hpp"
#include "nids/hyperopt.hpp"
#include "nids/smote.hpp"

namespace nids {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kReportFormat = 1;

// Raised for malformed or inconsistent configuration files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A pipeline stage failed. `data_error` is set when the cause was a DataError.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& cause, bool data_error)
        : std::runtime_error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)), data_error_(data_error) {}

    const std::string& stage() const { return stage_; }
    bool data_error() const { return data_error_; }

private:
    std::string stage_;
    bool data_error_;
};

// ---------------------------------------------------------------------------
// Configuration

enum class NormalizeFit { full, train, none };
enum class SmoteStage { post_split, pre_split };
enum class SelectionStage { post_smote, pre_smote };

struct PipelineConfig {
    struct Data {
        std::filesystem::path path;
        std::filesystem::path schema_path;  // empty: built-in defaults
        SchemaAdapter schema;
        std::size_t sample_rows = 0;  // 0 keeps every row
    } data;

    double train_fraction = 0.7;
    bool stratified_split = false;
    NormalizeFit normalize = NormalizeFit::full;

    struct Smote {
        bool enabled = true;
        std::size_t k = 5;
        std::size_t target = 0;
        SmoteStage stage = SmoteStage::post_split;
    } smote;

    struct Selection {
        std::optional<SelectionMethod> method = SelectionMethod::igbfs;  // nullopt: none
        SelectionPolicy policy;
        DiscretizationSpec discretization;
        CbfsMode cbfs_mode = CbfsMode::ranking;
        SelectionStage stage = SelectionStage::post_smote;
    } selection;

    // Classifier variant; the remaining fields are used when the optimizer is
    // disabled.
    HyperParams model;

    struct Optimizer {
        bool enabled = true;
        OptimizerId id = OptimizerId::bo_tpe;
        std::size_t budget = 30;      // rs, bo-gp, bo-tpe
        std::size_t cv_folds = 3;
        std::size_t train_rows = 0;   // 0: whole training set
        PsoConfig pso;
        GaConfig ga;
        BoConfig gp;
        TpeConfig tpe;
    } optimizer;

    struct Curve {
        bool enabled = false;
        std::vector<double> fractions{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
        std::size_t folds = 5;
        double epsilon = 0.002;
        bool reduce_training = false;  // optimize on the minimum training size
    } learning_curve;

    struct Pca {
        bool enabled = false;
        std::size_t max_rows = 0;  // 0: every row
    } pca;

    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "out";

    void validate() const;
};

/// Reads an INI-style file with [data], [split], [smote], [selection],
/// [model], [optimizer], [learning_curve], [pca] and [run] sections. Relative
/// paths are resolved against the file's directory. Unknown keys are errors.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});

// Canonical key = value rendering of every setting that affects results.
std::string canonical_config(const PipelineConfig& cfg);
// 64-bit FNV-1a of canonical_config, as 16 hex digits.
std::string config_hash(const PipelineConfig& cfg);

const char* to_string(NormalizeFit n);
const char* to_string(SmoteStage s);
const char* to_string(SelectionStage s);

// ---------------------------------------------------------------------------
// Report

struct DataSizes {
    std::size_t rows = 0;
    std::size_t features = 0;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::size_t train_rows_after_smote = 0;
    std::size_t train_minority_before = 0;
    std::size_t train_minority_after = 0;

    friend bool operator==(const DataSizes&, const DataSizes&) = default;
};

struct SelectionSummary {
    std::string method;
    std::vector<std::string> selected;
    std::vector<std::pair<std::string, double>> scores;  // descending

    friend bool operator==(const SelectionSummary&, const SelectionSummary&) = default;
};

struct OptimizationSummary {
    std::string optimizer;
    std::size_t budget = 0;
    std::size_t evaluations = 0;
    std::size_t objective_calls = 0;
    std::size_t training_rows = 0;
    std::size_t cv_folds = 0;
    std::vector<std::pair<std::string, std::string>> best_candidate;
    double best_score = 0.0;
    std::size_t best_eval_index = 0;

    friend bool operator==(const OptimizationSummary&, const OptimizationSummary&) = default;
};

struct CurveSummary {
    std::size_t points = 0;
    std::size_t minimum_size = 0;
    bool converged = false;
    double epsilon = 0.0;

    friend bool operator==(const CurveSummary&, const CurveSummary&) = default;
};

struct PcaSummary {
    std::size_t rows = 0;
    double explained_variance_ratio_1 = 0.0;
    double explained_variance_ratio_2 = 0.0;

    friend bool operator==(const PcaSummary&, const PcaSummary&) = default;
};

struct RunReport {
    std::string goal;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<std::pair<std::string, std::string>> stages;  // name, status
    std::vector<std::pair<std::string, double>> timings;      // seconds, ms resolution
    DataSizes sizes;
    std::optional<SelectionSummary> selection;
    std::optional<OptimizationSummary> optimization;
    std::optional<HyperParams> model;
    std::optional<CurveSummary> learning_curve;
    std::optional<ConfusionMatrix> confusion;
    std::optional<MetricsReport> test_metrics;
    std::optional<PcaSummary> pca;

    friend bool operator==(const RunReport&, const RunReport&) = default;
};

// Stable key order; identical reports give identical bytes.
std::string report_to_json(const RunReport& report);
RunReport report_from_json(std::string_view text);

// ---------------------------------------------------------------------------
// Execution

// How far a run goes. Stages past the goal are reported "skipped". `run`
// executes everything; `pca` runs ingest, preprocess, normalize and pca only.
// The learning_curve and pca goals force their stage on.
enum class PipelineGoal { preprocess, select, learning_curve, optimize, run, pca };

const char* to_string(PipelineGoal g);

/// Passed to the observer after every executed stage. `input` is the data
/// the stage was fitted on; `train`/`test` are the partitions after the
/// stage, once the split has happened.
struct StageEvent {
    std::string stage;
    const Dataset* input = nullptr;
    const Dataset* train = nullptr;
    const Dataset* test = nullptr;
};

using StageObserver = std::function<void(const StageEvent&)>;

struct RunArtifacts {
    std::optional<Dataset> cleaned;
    std::optional<SelectionResult> selection;
    std::optional<LearningCurve> learning_curve;
    std::optional<OptimizationTrace> trace;
    std::optional<SearchSpace> space;
    std::optional<TrainedModel> model;
    std::optional<PcaResult> pca;
    std::vector<Label> pca_labels;
};

struct RunResult {
    RunReport report;
    RunArtifacts artifacts;
};

/// ingest -> preprocess -> normalize -> split -> smote (train only) ->
/// select (train only, projected onto both partitions) -> learning curve ->
/// optimize (train CV) -> fit (whole train) -> evaluate (test) -> pca.
RunResult run_pipeline(const PipelineConfig& cfg, PipelineGoal goal = PipelineGoal::run,
                       const StageObserver& observer = {});

/// Writes report.json plus whichever side files the artifacts support:
/// clean.csv, feature_scores.csv, learning_curve.csv, trace.csv,
/// trace.jsonl, model.txt, pca.csv. Files are staged and moved into place
/// together; on failure nothing is left behind. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const RunResult& result, const std::filesystem::path& dir);

}  // namespace nids
