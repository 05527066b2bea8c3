#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "orderlens/errors.hpp"
#include "orderlens/importance.hpp"
#include "orderlens/parallel.hpp"
#include "orderlens/stages.hpp"
#include "orderlens/version.hpp"

namespace {

using namespace orderlens;

void check_format(const std::string& value) {
    if (value != "tsv" && value != "json")
        throw ConfigError("--format must be tsv or json");
}

Scope parse_scope_or_throw(const std::string& value) {
    auto scope = parse_scope(value);
    if (!scope) throw ConfigError("--scope must be all_features, same_variable_only, or "
                                  "other_variables_only");
    return *scope;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orderlens: daily patient-state features, decision-label AUC ranking, and "
                 "top-k linear SVM prediction over clinical event streams"};
    app.name("orderlens");
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    int exit_code = 0;

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic event stream with planted rules");
    stages::SynthOptions synth_opts;
    std::uint64_t synth_seed = 42;
    int synth_patients = -1;
    synth->add_option("--synth-config", synth_opts.config_path,
                      "Synth config JSON (omit for the built-in default)");
    synth->add_option("--seed", synth_seed, "Generator seed")->default_val(42);
    synth->add_option("--n-patients", synth_patients, "Override the configured patient count");
    synth->add_option("--out", synth_opts.out_dir, "Output directory")->required();
    synth->callback([&] {
        synth_opts.seed = synth_seed;
        if (synth_patients > 0) synth_opts.n_patients = synth_patients;
        stages::run_synth(synth_opts);
    });

    // validate
    auto* validate = app.add_subcommand("validate", "Check an event file against the data model");
    stages::ValidateOptions validate_opts;
    validate->add_option("--events", validate_opts.events_path, "Event file")->required();
    validate->add_option("--out", validate_opts.out_dir, "Optional directory for violations.tsv");
    validate->callback([&] {
        if (stages::run_validate(validate_opts) > 0) exit_code = 2;
    });

    // segment
    auto* segment = app.add_subcommand("segment", "Build daily 08:00 instances with next-24h labels");
    stages::SegmentOptions segment_opts;
    std::string segment_clock = "08:00";
    segment->add_option("--events", segment_opts.events_path, "Event file")->required();
    segment->add_option("--anchor", segment_clock, "Anchor clock time, HH:MM")
        ->default_val("08:00");
    segment->add_option("--period-hours", segment_opts.period_hours,
                        "Hours between anchors (labels always cover the next 24h)")
        ->default_val(24);
    segment->add_option("--out", segment_opts.out_dir, "Output directory")->required();
    segment->callback([&] {
        unsigned hh = 0, mm = 0;
        if (segment_clock.size() != 5 || segment_clock[2] != ':' ||
            std::sscanf(segment_clock.c_str(), "%2u:%2u", &hh, &mm) != 2 || hh > 23 || mm > 59)
            throw ConfigError("--anchor must be HH:MM");
        segment_opts.anchor_minute_of_day = static_cast<int>(hh * 60 + mm);
        if (segment_opts.period_hours < 1) throw ConfigError("--period-hours must be >= 1");
        stages::run_segment(segment_opts);
    });

    // featurize
    auto* featurize = app.add_subcommand("featurize", "Materialize the per-instance feature matrix");
    stages::FeaturizeOptions feat_opts;
    featurize->add_option("--events", feat_opts.events_path, "Event file")->required();
    featurize->add_option("--instances", feat_opts.instances_path, "Instance file")->required();
    featurize->add_option("--seed", feat_opts.split.seed,
                          "Split seed (categorical codes follow the train split)")
        ->default_val(42);
    featurize->add_option("--train-fraction", feat_opts.split.train_fraction,
                          "Training fraction for the code-assignment split")
        ->default_val(0.65);
    featurize->add_option("--train-count", [&](const std::vector<std::string>& vals) {
        feat_opts.split.train_count = std::stoull(vals.at(0));
        return true;
    }, "Exact number of training patients");
    featurize->add_option("--jobs", feat_opts.jobs, "Worker threads (0 = all cores)")
        ->default_val(0);
    featurize->add_option("--out", feat_opts.out_dir, "Output directory")->required();
    featurize->callback([&] { stages::run_featurize(feat_opts); });

    // rank
    auto* rank = app.add_subcommand("rank", "Rank features by AUC for each decision");
    stages::RankOptionsCli rank_opts;
    std::string rank_scope = "all_features";
    std::string rank_rows = "train";
    rank->add_option("--features", rank_opts.features_path, "Feature matrix file")->required();
    rank->add_option("--instances", rank_opts.instances_path, "Instance file")->required();
    rank->add_option("--decision", rank_opts.decision,
                     "Single decision id (e.g. lab_order:CL01); default all");
    rank->add_option("--scope", rank_scope,
                     "Feature scope: all_features|same_variable_only|other_variables_only")
        ->default_val("all_features");
    rank->add_option("--rows", rank_rows, "Instance rows: train|all")->default_val("train");
    rank->add_option("--top", rank_opts.top, "Rows per decision in ranked output")
        ->default_val(30);
    rank->add_option("--min-support", rank_opts.min_support,
                     "Positives/negatives below this are flagged low-support")
        ->default_val(5);
    rank->add_flag("--commission", rank_opts.commission,
                   "Restrict med decisions to commission instances");
    rank->add_option("--seed", rank_opts.split.seed, "Split seed")->default_val(42);
    rank->add_option("--train-fraction", rank_opts.split.train_fraction, "Training fraction")
        ->default_val(0.65);
    rank->add_option("--train-count", [&](const std::vector<std::string>& vals) {
        rank_opts.split.train_count = std::stoull(vals.at(0));
        return true;
    }, "Exact number of training patients");
    rank->add_option("--jobs", rank_opts.jobs, "Worker threads (0 = all cores)")
        ->default_val(0);
    rank->add_option("--format", rank_opts.format, "Primary table format: tsv|json")
        ->default_val("tsv");
    rank->add_option("--out", rank_opts.out_dir, "Output directory")->required();
    rank->callback([&] {
        check_format(rank_opts.format);
        rank_opts.scope = parse_scope_or_throw(rank_scope);
        rank_opts.all_rows = rank_rows == "all";
        if (rank_rows != "all" && rank_rows != "train")
            throw ConfigError("--rows must be train or all");
        stages::run_rank(rank_opts);
    });

    // histogram
    auto* histogram =
        app.add_subcommand("histogram", "Best-feature category histogram across decisions");
    stages::HistogramOptionsCli hist_opts;
    std::string hist_grouping = "clinical5";
    std::string hist_scope = "all_features";
    std::string hist_kind = "lab_order";
    std::string hist_rows = "train";
    histogram->add_option("--features", hist_opts.features_path, "Feature matrix file")->required();
    histogram->add_option("--instances", hist_opts.instances_path, "Instance file")->required();
    histogram->add_option("--grouping", hist_grouping, "clinical5|temporal40")
        ->default_val("clinical5");
    histogram->add_option("--scope", hist_scope,
                          "all_features|same_variable_only|other_variables_only")
        ->default_val("all_features");
    histogram->add_option("--kind", hist_kind, "lab_order|med_order|med_commission")
        ->default_val("lab_order");
    histogram->add_option("--rows", hist_rows, "Instance rows: train|all")->default_val("train");
    histogram->add_option("--min-support", hist_opts.min_support, "Low-support threshold")
        ->default_val(5);
    histogram->add_option("--seed", hist_opts.split.seed, "Split seed")->default_val(42);
    histogram->add_option("--train-fraction", hist_opts.split.train_fraction, "Training fraction")
        ->default_val(0.65);
    histogram->add_option("--train-count", [&](const std::vector<std::string>& vals) {
        hist_opts.split.train_count = std::stoull(vals.at(0));
        return true;
    }, "Exact number of training patients");
    histogram->add_option("--jobs", hist_opts.jobs, "Worker threads (0 = all cores)")
        ->default_val(0);
    histogram->add_option("--format", hist_opts.format, "Primary table format: tsv|json")
        ->default_val("tsv");
    histogram->add_option("--out", hist_opts.out_dir, "Output directory")->required();
    histogram->callback([&] {
        check_format(hist_opts.format);
        auto grouping = parse_grouping(hist_grouping);
        if (!grouping) throw ConfigError("--grouping must be clinical5 or temporal40");
        auto mode = parse_decision_mode(hist_kind);
        if (!mode) throw ConfigError("--kind must be lab_order, med_order, or med_commission");
        hist_opts.grouping = *grouping;
        hist_opts.scope = parse_scope_or_throw(hist_scope);
        hist_opts.mode = *mode;
        hist_opts.all_rows = hist_rows == "all";
        if (hist_rows != "all" && hist_rows != "train")
            throw ConfigError("--rows must be train or all");
        stages::run_histogram(hist_opts);
    });

    // train
    auto* train = app.add_subcommand("train", "Train top-k linear SVM models per decision");
    stages::TrainOptions train_opts;
    std::string train_ks = "1,3,30";
    train->add_option("--features", train_opts.features_path, "Feature matrix file")->required();
    train->add_option("--instances", train_opts.instances_path, "Instance file")->required();
    train->add_option("--decision", train_opts.decision, "Single decision id; default all");
    train->add_option("--k", train_ks, "Comma-separated top-k feature counts")
        ->default_val("1,3,30");
    train->add_option("--seed", train_opts.split.seed, "Split seed")->default_val(42);
    train->add_option("--train-fraction", train_opts.split.train_fraction, "Training fraction")
        ->default_val(0.65);
    train->add_option("--train-count", [&](const std::vector<std::string>& vals) {
        train_opts.split.train_count = std::stoull(vals.at(0));
        return true;
    }, "Exact number of training patients");
    train->add_option("--C", train_opts.solver.C, "Hinge-loss cost")->default_val(1.0);
    train->add_option("--epochs", train_opts.solver.epochs, "Solver epochs")->default_val(200);
    train->add_flag("--balance", train_opts.solver.balance, "Class-frequency cost reweighting");
    train->add_flag("--commission", train_opts.commission,
                    "Restrict med decisions to commission instances");
    train->add_option("--min-support", train_opts.min_support, "Low-support threshold")
        ->default_val(5);
    train->add_option("--jobs", train_opts.jobs, "Worker threads (0 = all cores)")
        ->default_val(0);
    train->add_option("--out", train_opts.out_dir, "Output directory")->required();
    train->callback([&] {
        train_opts.ks.clear();
        std::stringstream ss(train_ks);
        std::string part;
        while (std::getline(ss, part, ','))
            if (!part.empty()) train_opts.ks.push_back(std::stoi(part));
        if (train_opts.ks.empty()) throw ConfigError("--k must list at least one value");
        stages::run_train(train_opts);
    });

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Test-split AUC for trained models");
    stages::EvaluateOptions eval_opts;
    evaluate->add_option("--features", eval_opts.features_path, "Feature matrix file")->required();
    evaluate->add_option("--instances", eval_opts.instances_path, "Instance file")->required();
    evaluate->add_option("--models", eval_opts.models_dir, "Directory of model JSON files")
        ->required();
    evaluate->add_option("--format", eval_opts.format, "Primary table format: tsv|json")
        ->default_val("tsv");
    evaluate->add_option("--out", eval_opts.out_dir, "Output directory")->required();
    evaluate->callback([&] {
        check_format(eval_opts.format);
        stages::run_evaluate(eval_opts);
    });

    // report
    auto* report = app.add_subcommand("report", "Aggregate a pipeline run into a report");
    stages::ReportOptions report_opts;
    report->add_option("--run", report_opts.run_dir, "Pipeline output directory")->required();
    report->add_option("--out", report_opts.out_dir, "Output directory")->required();
    report->callback([&] { stages::run_report(report_opts); });

    // pipeline
    auto* pipeline = app.add_subcommand(
        "pipeline", "synth/ingest -> segment -> featurize -> rank -> histogram -> train -> "
                    "evaluate -> report");
    stages::PipelineOptions pipe_opts;
    std::string pipe_ks = "1,3,30";
    pipeline->add_option("--synth-config", pipe_opts.synth_config_path,
                         "Synth config JSON (omit for default)");
    pipeline->add_option("--events", pipe_opts.events_path,
                         "Ingest this event file instead of generating one");
    pipeline->add_option("--n-patients", [&](const std::vector<std::string>& vals) {
        pipe_opts.n_patients = std::stoi(vals.at(0));
        return true;
    }, "Override the configured patient count");
    pipeline->add_option("--seed", pipe_opts.seed, "Seed for generation and splits")
        ->default_val(42);
    pipeline->add_option("--train-fraction", pipe_opts.split.train_fraction, "Training fraction")
        ->default_val(0.65);
    pipeline->add_option("--train-count", [&](const std::vector<std::string>& vals) {
        pipe_opts.split.train_count = std::stoull(vals.at(0));
        return true;
    }, "Exact number of training patients");
    pipeline->add_option("--k", pipe_ks, "Comma-separated top-k feature counts")
        ->default_val("1,3,30");
    pipeline->add_option("--C", pipe_opts.solver.C, "Hinge-loss cost")->default_val(1.0);
    pipeline->add_option("--epochs", pipe_opts.solver.epochs, "Solver epochs")->default_val(200);
    pipeline->add_flag("--balance", pipe_opts.solver.balance, "Class-frequency cost reweighting");
    pipeline->add_flag("--commission", pipe_opts.commission,
                       "Restrict med decisions to commission instances");
    pipeline->add_option("--min-support", pipe_opts.min_support, "Low-support threshold")
        ->default_val(5);
    pipeline->add_option("--top", pipe_opts.top, "Rows per decision in ranked output")
        ->default_val(30);
    pipeline->add_option("--jobs", pipe_opts.jobs, "Worker threads (0 = all cores)")
        ->default_val(0);
    pipeline->add_option("--format", pipe_opts.format, "Primary table format: tsv|json")
        ->default_val("tsv");
    pipeline->add_option("--out", pipe_opts.out_dir, "Output directory")->required();
    pipeline->callback([&] {
        check_format(pipe_opts.format);
        pipe_opts.ks.clear();
        std::stringstream ss(pipe_ks);
        std::string part;
        while (std::getline(ss, part, ','))
            if (!part.empty()) pipe_opts.ks.push_back(std::stoi(part));
        if (pipe_opts.ks.empty()) throw ConfigError("--k must list at least one value");
        pipe_opts.split.seed = pipe_opts.seed;
        stages::run_pipeline(pipe_opts);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
