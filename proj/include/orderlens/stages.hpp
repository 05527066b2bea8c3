#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orderlens/importance.hpp"
#include "orderlens/svm.hpp"
#include "orderlens/synthgen.hpp"

namespace orderlens::stages {

// Stage boundaries are files: every stage reads and writes only the
// documented formats, so any stage can be re-run or replaced on its own.

struct SplitOptions {
    std::optional<size_t> train_count;   // overrides fraction when set
    double train_fraction = 0.65;
    std::uint64_t seed = 42;
};

struct SynthOptions {
    std::string config_path;  // empty = built-in default config
    std::optional<int> n_patients;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};
void run_synth(const SynthOptions& options);

struct ValidateOptions {
    std::string events_path;
    std::string out_dir;  // optional; violations.tsv written when set
};
size_t run_validate(const ValidateOptions& options);  // returns violation count

struct SegmentOptions {
    std::string events_path;
    int anchor_minute_of_day = 8 * 60;
    int period_hours = 24;  // anchor spacing; labels always cover the next 24h
    std::string out_dir;
};
void run_segment(const SegmentOptions& options);

struct FeaturizeOptions {
    std::string events_path;
    std::string instances_path;
    SplitOptions split;  // categorical token codes follow the train split
    int jobs = 1;
    std::string out_dir;
};
void run_featurize(const FeaturizeOptions& options);

struct RankOptionsCli {
    std::string features_path;
    std::string instances_path;
    std::string decision;  // empty = all decisions
    Scope scope = Scope::all_features;
    bool all_rows = false;  // default: train rows only
    SplitOptions split;
    size_t top = 30;
    size_t min_support = 5;
    bool commission = false;
    int jobs = 1;
    std::string format = "tsv";
    std::string out_dir;
};
void run_rank(const RankOptionsCli& options);

struct HistogramOptionsCli {
    std::string features_path;
    std::string instances_path;
    Grouping grouping = Grouping::clinical5;
    Scope scope = Scope::all_features;
    DecisionMode mode = DecisionMode::lab_order;
    bool all_rows = false;
    SplitOptions split;
    size_t min_support = 5;
    int jobs = 1;
    std::string format = "tsv";
    std::string out_dir;
};
void run_histogram(const HistogramOptionsCli& options);

struct TrainOptions {
    std::string features_path;
    std::string instances_path;
    std::string decision;  // empty = all decisions
    std::vector<int> ks = {1, 3, 30};
    SplitOptions split;
    SolverConfig solver;
    bool commission = false;
    size_t min_support = 5;
    int jobs = 1;
    std::string out_dir;
};
void run_train(const TrainOptions& options);

struct EvaluateOptions {
    std::string features_path;
    std::string instances_path;
    std::string models_dir;
    std::string format = "tsv";
    std::string out_dir;
};
void run_evaluate(const EvaluateOptions& options);

struct ReportOptions {
    std::string run_dir;  // a pipeline output directory
    std::string out_dir;
};
void run_report(const ReportOptions& options);

struct PipelineOptions {
    std::string synth_config_path;  // used unless events_path is set
    std::string events_path;        // ingest an existing event file
    std::optional<int> n_patients;
    std::uint64_t seed = 42;
    SplitOptions split;             // seed defaults to the pipeline seed
    std::vector<int> ks = {1, 3, 30};
    SolverConfig solver;
    bool commission = false;
    size_t min_support = 5;
    size_t top = 30;
    int jobs = 1;
    std::string format = "tsv";
    std::string out_dir;
};
void run_pipeline(const PipelineOptions& options);

}
