#include "orderlens/stages.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "orderlens/errors.hpp"
#include "orderlens/event_io.hpp"
#include "orderlens/manifest.hpp"
#include "orderlens/matrix_io.hpp"
#include "orderlens/parallel.hpp"
#include "orderlens/tsv.hpp"
#include "orderlens/version.hpp"

namespace orderlens::stages {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string sanitize(const std::string& id) {
    std::string out = id;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
    return out;
}

struct AnalysisInputs {
    LoadedMatrix loaded;
    std::vector<PatientStateInstance> instances;
};

AnalysisInputs load_analysis_inputs(const std::string& features_path,
                                    const std::string& instances_path) {
    AnalysisInputs in;
    in.loaded = load_matrix(features_path);
    in.instances = load_instances(instances_path);
    if (in.loaded.matrix.n_rows() != in.instances.size())
        throw Error("feature matrix has " + std::to_string(in.loaded.matrix.n_rows()) +
                    " rows but instance file has " + std::to_string(in.instances.size()));
    for (size_t i = 0; i < in.instances.size(); ++i)
        if (in.loaded.matrix.row_ids()[i] != in.instances[i].instance_id())
            throw Error("row " + std::to_string(i) + ": matrix row id '" +
                        in.loaded.matrix.row_ids()[i] + "' does not match instance '" +
                        in.instances[i].instance_id() + "'");
    return in;
}

std::vector<std::string> patient_ids_of(std::span<const PatientStateInstance> instances) {
    std::vector<std::string> ids;
    for (const auto& inst : instances) ids.push_back(inst.patient_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

SplitSpec derive_split(std::span<const PatientStateInstance> instances,
                       const SplitOptions& split) {
    auto ids = patient_ids_of(instances);
    if (split.train_count)
        return split_by_patient(ids, split.train_count, std::nullopt, split.seed);
    return split_by_patient(ids, std::nullopt, split.train_fraction, split.seed);
}

std::vector<size_t> analysis_rows(std::span<const PatientStateInstance> instances,
                                  bool all_rows, const SplitOptions& split,
                                  SplitSpec* out_split) {
    if (all_rows) {
        std::vector<size_t> rows(instances.size());
        for (size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        return rows;
    }
    SplitSpec spec = derive_split(instances, split);
    auto rows = rows_for_split(instances, spec, true);
    if (out_split) *out_split = spec;
    return rows;
}

void add_split_config(RunManifest& m, const SplitOptions& split) {
    m.config["seed"] = std::to_string(split.seed);
    if (split.train_count)
        m.config["train_count"] = std::to_string(*split.train_count);
    else
        m.config["train_fraction"] = format_double(split.train_fraction);
}

std::string auc_cell(double auc) { return format_double(auc); }

int resolve_jobs(int jobs) { return jobs > 0 ? jobs : default_jobs(); }

}  // namespace

void run_synth(const SynthOptions& options) {
    SynthConfig config = options.config_path.empty()
                             ? default_synth_config()
                             : config_from_json(read_file(options.config_path));
    if (options.n_patients) config.n_patients = *options.n_patients;
    if (options.seed) config.seed = *options.seed;
    validate_config(config);

    ensure_dir(options.out_dir);
    auto records = generate(config);
    save_dataset(records, options.out_dir + "/events.tsv");
    write_file(options.out_dir + "/ground_truth.json", ground_truth_to_json(ground_truth(config)));
    write_file(options.out_dir + "/synth_config.json", config_to_json(config));

    RunManifest m;
    m.tool_version = kVersion;
    m.subcommand = "synth";
    m.config["seed"] = std::to_string(config.seed);
    m.config["n_patients"] = std::to_string(config.n_patients);
    m.config["config"] = options.config_path.empty() ? "<default>" : options.config_path;
    m.outputs = {"events.tsv", "ground_truth.json", "synth_config.json"};
    write_manifest(m, options.out_dir);
}

size_t run_validate(const ValidateOptions& options) {
    std::ifstream in(options.events_path);
    if (!in) throw IoError("cannot open '" + options.events_path + "'");
    auto parsed = parse_dataset_lenient(in);

    std::ostringstream table;
    table << "patient_id\tcode\tmessage\n";
    for (const auto& v : parsed.violations)
        table << v.patient_id << '\t' << v.code << '\t' << v.message << '\n';

    if (parsed.violations.empty())
        std::cout << "ok: " << parsed.records.size() << " patient record(s), no violations\n";
    else
        std::cout << table.str();

    if (!options.out_dir.empty()) {
        ensure_dir(options.out_dir);
        write_file(options.out_dir + "/violations.tsv", table.str());
        RunManifest m;
        m.tool_version = kVersion;
        m.subcommand = "validate";
        m.input_digests["events"] = sha256_file_hex(options.events_path);
        m.outputs = {"violations.tsv"};
        write_manifest(m, options.out_dir);
    }
    return parsed.violations.size();
}

void run_segment(const SegmentOptions& options) {
    auto records = load_dataset(options.events_path);
    SegmentationOptions seg{options.anchor_minute_of_day, options.period_hours};
    std::vector<PatientStateInstance> instances;
    for (const auto& record : records) {
        auto per_patient = build_instances(record, seg);
        instances.insert(instances.end(), per_patient.begin(), per_patient.end());
    }
    ensure_dir(options.out_dir);
    save_instances(instances, options.out_dir + "/instances.tsv");

    RunManifest m;
    m.tool_version = kVersion;
    m.subcommand = "segment";
    m.input_digests["events"] = sha256_file_hex(options.events_path);
    char clock[16];
    std::snprintf(clock, sizeof(clock), "%02d:%02d", options.anchor_minute_of_day / 60,
                  options.anchor_minute_of_day % 60);
    m.config["anchor"] = clock;
    m.config["period_hours"] = std::to_string(options.period_hours);
    m.outputs = {"instances.tsv"};
    write_manifest(m, options.out_dir);
}

void run_featurize(const FeaturizeOptions& options) {
    auto records = load_dataset(options.events_path);
    auto instances = load_instances(options.instances_path);
    auto vocabulary = build_vocabulary(records);

    std::vector<std::string> ids;
    for (const auto& r : records) ids.push_back(r.patient_id);
    std::set<std::string> train_patients;
    if (ids.size() >= 2) {
        SplitSpec split = options.split.train_count
                              ? split_by_patient(ids, options.split.train_count, std::nullopt,
                                                 options.split.seed)
                              : split_by_patient(ids, std::nullopt, options.split.train_fraction,
                                                 options.split.seed);
        train_patients.insert(split.train_patient_ids.begin(), split.train_patient_ids.end());
    }
    auto codes = build_categorical_codes(records, train_patients);
    auto matrix = build_matrix(records, instances, vocabulary, codes, resolve_jobs(options.jobs));

    ensure_dir(options.out_dir);
    save_matrix(matrix, vocabulary, codes, options.out_dir + "/features.tsv");

    RunManifest m;
    m.tool_version = kVersion;
    m.subcommand = "featurize";
    m.input_digests["events"] = sha256_file_hex(options.events_path);
    m.input_digests["instances"] = sha256_file_hex(options.instances_path);
    add_split_config(m, options.split);
    m.outputs = {"features.tsv", "features.tsv.meta.json"};
    write_manifest(m, options.out_dir);
}

void run_rank(const RankOptionsCli& options) {
    auto in = load_analysis_inputs(options.features_path, options.instances_path);
    const auto& matrix = in.loaded.matrix;

    SplitSpec split;
    auto rows = analysis_rows(in.instances, options.all_rows, options.split, &split);

    std::vector<DecisionId> decisions;
    if (!options.decision.empty()) {
        auto d = DecisionId::parse(options.decision);
        if (!d) throw ConfigError("bad decision id '" + options.decision + "'");
        decisions.push_back(*d);
    } else {
        decisions = all_decisions(in.loaded.vocabulary);
    }

    struct Outcome {
        std::vector<AucScore> ranked;
        bool low_support = false;
        std::string skip_reason;
    };
    std::vector<Outcome> outcomes(decisions.size());
    parallel_for(decisions.size(), resolve_jobs(options.jobs), [&](size_t i) {
        const auto& decision = decisions[i];
        std::vector<size_t> decision_rows = rows;
        if (options.commission && decision.kind == DecisionId::Kind::med_order)
            decision_rows = commission_rows(in.instances, decision_rows, decision.variable_id);
        auto labels = labels_for(in.instances, decision);
        size_t n_pos = 0;
        for (size_t r : decision_rows) n_pos += labels[r] ? 1 : 0;
        if (decision_rows.empty() || n_pos == 0 || n_pos == decision_rows.size()) {
            outcomes[i].skip_reason = decision_rows.empty() ? "no instances" : "single-class labels";
            return;
        }
        outcomes[i].ranked =
            rank_features(matrix, labels, decision_rows, decision,
                          {options.scope, options.min_support});
        if (outcomes[i].ranked.size() > options.top) outcomes[i].ranked.resize(options.top);
        outcomes[i].low_support =
            n_pos < options.min_support || decision_rows.size() - n_pos < options.min_support;
    });

    std::ostringstream table;
    table << "decision\trank\tfeature_id\tauc_raw\tauc_effective\tn_pos\tn_neg\tlow_support\n";
    json summary;
    summary["scope"] = to_name(options.scope);
    summary["rows"] = options.all_rows ? "all" : "train";
    json jdec = json::array();
    json jskip = json::array();
    for (size_t i = 0; i < decisions.size(); ++i) {
        const auto& outcome = outcomes[i];
        if (!outcome.skip_reason.empty()) {
            jskip.push_back({{"decision", decisions[i].to_string()},
                             {"reason", outcome.skip_reason}});
            continue;
        }
        json jranks = json::array();
        for (size_t r = 0; r < outcome.ranked.size(); ++r) {
            const auto& s = outcome.ranked[r];
            table << s.decision.to_string() << '\t' << r + 1 << '\t' << s.feature_id << '\t'
                  << auc_cell(s.auc_raw) << '\t' << auc_cell(s.auc_effective) << '\t' << s.n_pos
                  << '\t' << s.n_neg << '\t' << (outcome.low_support ? 1 : 0) << '\n';
            jranks.push_back({{"rank", r + 1},
                              {"feature_id", s.feature_id},
                              {"auc_raw", s.auc_raw},
                              {"auc_effective", s.auc_effective}});
        }
        jdec.push_back({{"decision", decisions[i].to_string()},
                        {"n_pos", outcome.ranked.empty() ? 0 : outcome.ranked[0].n_pos},
                        {"n_neg", outcome.ranked.empty() ? 0 : outcome.ranked[0].n_neg},
                        {"low_support", outcome.low_support},
                        {"top", jranks}});
    }
    summary["decisions"] = jdec;
    summary["skipped"] = jskip;

    ensure_dir(options.out_dir);
    std::vector<std::string> outputs;
    if (options.format != "json") {
        write_file(options.out_dir + "/ranks.tsv", table.str());
        outputs.push_back("ranks.tsv");
    }
    write_file(options.out_dir + "/ranks.json", summary.dump(2) + "\n");
    outputs.push_back("ranks.json");

    RunManifest m;
    m.tool_version = kVersion;
    m.subcommand = "rank";
    m.input_digests["features"] = sha256_file_hex(options.features_path);
    m.input_digests["instances"] = sha256_file_hex(options.instances_path);
    m.config["scope"] = to_name(options.scope);
    m.config["rows"] = options.all_rows ? "all" : "train";
    m.config["top"] = std::to_string(options.top);
    m.config["min_support"] = std::to_string(options.min_support);
    m.config["commission"] = options.commission ? "true" : "false";
    if (!options.decision.empty()) m.config["decision"] = options.decision;
    m.config["format"] = options.format;
    add_split_config(m, options.split);
    m.outputs = std::move(outputs);
    write_manifest(m, options.out_dir);
}

namespace {

std::string histogram_file_name(const HistogramReport& report) {
    return std::string("histogram_") + to_name(report.grouping) + "_" + to_name(report.scope) +
           "_" + to_name(report.mode) + ".tsv";
}

std::string histogram_table(const HistogramReport& report) {
    std::ostringstream table;
    table << "category\tcount\n";
    for (const auto& [category, count] : report.counts)
        table << category << '\t' << count << '\n';
    return table.str();
}

json histogram_json(const HistogramReport& report) {
    json j;
    j["grouping"] = to_name(report.grouping);
    j["scope"] = to_name(report.scope);
    j["mode"] = to_name(report.mode);
    j["analyzed"] = report.analyzed;
    j["counts"] = report.counts;
    json jskip = json::array();
    for (const auto& s : report.skipped)
        jskip.push_back({{"decision", s.decision.to_string()}, {"reason", s.reason}});
    j["skipped"] = jskip;
    json jbest = json::object();
    for (const auto& [decision, ranking] : report.best_by_decision)
        jbest[decision] = {{"feature_id", ranking.best.feature_id},
                           {"auc_raw", ranking.best.auc_raw},
                           {"auc_effective", ranking.best.auc_effective},
                           {"low_support", ranking.low_support}};
    j["best_by_decision"] = jbest;
    return j;
}

HistogramReport compute_histogram(const AnalysisInputs& in, std::span<const size_t> rows,
                                  Grouping grouping, Scope scope, DecisionMode mode,
                                  size_t min_support, int jobs) {
    auto decisions = all_decisions(in.loaded.vocabulary);
    HistogramOptions opts;
    opts.grouping = grouping;
    opts.scope = scope;
    opts.mode = mode;
    opts.min_support = min_support;
    opts.jobs = jobs;
    return best_feature_histogram(in.loaded.matrix, in.instances, rows, decisions, opts);
}

}  // namespace

void run_histogram(const HistogramOptionsCli& options) {
    auto in = load_analysis_inputs(options.features_path, options.instances_path);
    auto rows = analysis_rows(in.instances, options.all_rows, options.split, nullptr);
    auto report = compute_histogram(in, rows, options.grouping, options.scope, options.mode,
                                    options.min_support, resolve_jobs(options.jobs));

    ensure_dir(options.out_dir);
    std::vector<std::string> outputs;
    std::string name = histogram_file_name(report);
    if (options.format != "json") {
        write_file(options.out_dir + "/" + name, histogram_table(report));
        outputs.push_back(name);
    }
    std::string json_name = name.substr(0, name.size() - 4) + ".json";
    write_file(options.out_dir + "/" + json_name, histogram_json(report).dump(2) + "\n");
    outputs.push_back(json_name);

    RunManifest m;
    m.tool_version = kVersion;
    m.subcommand = "histogram";
    m.input_digests["features"] = sha256_file_hex(options.features_path);
    m.input_digests["instances"] = sha256_file_hex(options.instances_path);
    m.config["grouping"] = to_name(options.grouping);
    m.config["scope"] = to_name(options.scope);
    m.config["kind"] = to_name(options.mode);
    m.config["rows"] = options.all_rows ? "all" : "train";
    m.config["min_support"] = std::to_string(options.min_support);
    m.config["format"] = options.format;
    add_split_config(m, options.split);
    m.outputs = std::move(outputs);
    write_manifest(m, options.out_dir);
}

void run_train(const TrainOptions& options) {
    auto in = load_analysis_inputs(options.features_path, options.instances_path);
    const auto& matrix = in.loaded.matrix;

    SplitSpec split = derive_split(in.instances, options.split);
    auto train_rows = rows_for_split(in.instances, split, true);

    std::vector<DecisionId> decisions;
    if (!options.decision.empty()) {
        auto d = DecisionId::parse(options.decision);
        if (!d) throw ConfigError("bad decision id '" + options.decision + "'");
        decisions.push_back(*d);
    } else {
        decisions = all_decisions(in.loaded.vocabulary);
    }
    std::vector<int> ks = options.ks;
    std::sort(ks.begin(), ks.end());

    struct Outcome {
        std::vector<LinearModel> models;
        std::string skip_reason;
    };
    std::vector<Outcome> outcomes(decisions.size());
    parallel_for(decisions.size(), resolve_jobs(options.jobs), [&](size_t i) {
        const auto& decision = decisions[i];
        std::vector<size_t> rows = train_rows;
        if (options.commission && decision.kind == DecisionId::Kind::med_order)
            rows = commission_rows(in.instances, rows, decision.variable_id);
        auto labels = labels_for(in.instances, decision);
        size_t n_pos = 0;
        for (size_t r : rows) n_pos += labels[r] ? 1 : 0;
        if (rows.empty() || n_pos == 0 || n_pos == rows.size()) {
            outcomes[i].skip_reason = rows.empty() ? "no instances" : "single-class labels";
            return;
        }
        size_t k_max = static_cast<size_t>(ks.back());
        auto selected = select_top_k(matrix, labels, rows, decision, k_max);
        for (int k : ks) {
            std::span<const std::string> prefix(selected.data(),
                                                std::min(selected.size(), static_cast<size_t>(k)));
            auto model = train_linear_svm(matrix, labels, rows, decision, k, prefix,
                                          options.solver);
            model.commission = options.commission;
            outcomes[i].models.push_back(std::move(model));
        }
    });

    ensure_dir(options.out_dir);
    ensure_dir(options.out_dir + "/models");
    json index;
    index["split"] = {{"seed", split.seed},
                      {"n_train", split.train_patient_ids.size()},
                      {"n_test", split.test_patient_ids.size()}};
    json jmodels = json::array();
    json jskip = json::array();
    std::vector<std::string> outputs = {"models_index.json"};
    for (size_t i = 0; i < decisions.size(); ++i) {
        if (!outcomes[i].skip_reason.empty()) {
            jskip.push_back({{"decision", decisions[i].to_string()},
                             {"reason", outcomes[i].skip_reason}});
            continue;
        }
        for (const auto& model : outcomes[i].models) {
            std::string name =
                "models/" + sanitize(model.decision.to_string()) + ".k" + std::to_string(model.k) +
                ".json";
            write_file(options.out_dir + "/" + name, model_to_json(model, split));
            jmodels.push_back({{"decision", model.decision.to_string()},
                               {"k", model.k},
                               {"file", name},
                               {"n_features", model.selected_features.size()}});
            outputs.push_back(name);
        }
    }
    index["models"] = jmodels;
    index["skipped"] = jskip;
    write_file(options.out_dir + "/models_index.json", index.dump(2) + "\n");

    RunManifest m;
    m.tool_version = kVersion;
    m.subcommand = "train";
    m.input_digests["features"] = sha256_file_hex(options.features_path);
    m.input_digests["instances"] = sha256_file_hex(options.instances_path);
    std::string k_list;
    for (int k : ks) k_list += (k_list.empty() ? "" : ",") + std::to_string(k);
    m.config["k"] = k_list;
    m.config["C"] = format_double(options.solver.C);
    m.config["epochs"] = std::to_string(options.solver.epochs);
    m.config["balance"] = options.solver.balance ? "true" : "false";
    m.config["commission"] = options.commission ? "true" : "false";
    m.config["min_support"] = std::to_string(options.min_support);
    add_split_config(m, options.split);
    m.outputs = std::move(outputs);
    std::sort(m.outputs.begin(), m.outputs.end());
    write_manifest(m, options.out_dir);
}

void run_evaluate(const EvaluateOptions& options) {
    auto in = load_analysis_inputs(options.features_path, options.instances_path);
    const auto& matrix = in.loaded.matrix;

    std::vector<std::string> model_files;
    for (const auto& entry : fs::directory_iterator(options.models_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            model_files.push_back(entry.path().string());
    std::sort(model_files.begin(), model_files.end());
    if (model_files.empty())
        throw IoError("no model files (*.json) in '" + options.models_dir + "'");

    struct Entry {
        LinearModel model;
        SplitSpec split;
    };
    std::vector<Entry> entries;
    for (const auto& file : model_files) {
        Entry e;
        e.model = model_from_json(read_file(file), &e.split);
        entries.push_back(std::move(e));
    }

    // decision -> k -> result
    std::map<std::string, std::map<int, std::string>> cells;
    std::set<int> ks;
    json jresults = json::array();
    for (auto& e : entries) {
        ks.insert(e.model.k);
        auto test_rows = rows_for_split(in.instances, e.split, false);
        if (e.model.commission)
            test_rows = commission_rows(in.instances, test_rows, e.model.decision.variable_id);
        auto labels = labels_for(in.instances, e.model.decision);
        size_t n_pos = 0;
        for (size_t r : test_rows) n_pos += labels[r] ? 1 : 0;
        std::string cell;
        if (test_rows.empty() || n_pos == 0 || n_pos == test_rows.size()) {
            cell = "NA";
            jresults.push_back({{"decision", e.model.decision.to_string()},
                                {"k", e.model.k},
                                {"skipped", "single-class test labels"}});
        } else {
            auto result = evaluate_model(e.model, matrix, labels, test_rows);
            cell = auc_cell(result.auc);
            jresults.push_back({{"decision", e.model.decision.to_string()},
                                {"k", e.model.k},
                                {"auc", result.auc},
                                {"n_pos", result.n_pos},
                                {"n_neg", result.n_neg}});
        }
        cells[e.model.decision.to_string()][e.model.k] = cell;
    }

    std::ostringstream table;
    table << "decision";
    for (int k : ks) table << "\ttop" << k;
    table << '\n';
    for (const auto& [decision, row] : cells) {
        table << decision;
        for (int k : ks) {
            auto it = row.find(k);
            table << '\t' << (it == row.end() ? "NA" : it->second);
        }
        table << '\n';
    }

    ensure_dir(options.out_dir);
    std::vector<std::string> outputs;
    if (options.format != "json") {
        write_file(options.out_dir + "/eval.tsv", table.str());
        outputs.push_back("eval.tsv");
    }
    write_file(options.out_dir + "/eval.json", json{{"results", jresults}}.dump(2) + "\n");
    outputs.push_back("eval.json");

    RunManifest m;
    m.tool_version = kVersion;
    m.subcommand = "evaluate";
    m.input_digests["features"] = sha256_file_hex(options.features_path);
    m.input_digests["instances"] = sha256_file_hex(options.instances_path);
    m.config["format"] = options.format;
    m.outputs = std::move(outputs);
    write_manifest(m, options.out_dir);
}

void run_report(const ReportOptions& options) {
    ensure_dir(options.out_dir);
    json report;
    std::vector<std::string> outputs;

    std::string eval_table_path = options.run_dir + "/eval/eval.tsv";
    if (fs::exists(eval_table_path)) {
        write_file(options.out_dir + "/report.tsv", read_file(eval_table_path));
        outputs.push_back("report.tsv");
    }
    std::string eval_json_path = options.run_dir + "/eval/eval.json";
    if (fs::exists(eval_json_path))
        report["eval"] = json::parse(read_file(eval_json_path));
    json histograms = json::object();
    std::string hist_dir = options.run_dir + "/histogram";
    if (fs::exists(hist_dir)) {
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(hist_dir))
            if (entry.path().extension() == ".json" &&
                entry.path().filename().string().rfind("histogram_", 0) == 0)
                files.push_back(entry.path().string());
        std::sort(files.begin(), files.end());
        for (const auto& file : files)
            histograms[fs::path(file).stem().string()] = json::parse(read_file(file));
    }
    report["histograms"] = histograms;
    if (fs::exists(options.run_dir + "/synth/ground_truth.json"))
        report["ground_truth"] =
            json::parse(read_file(options.run_dir + "/synth/ground_truth.json"));

    write_file(options.out_dir + "/report.json", report.dump(2) + "\n");
    outputs.push_back("report.json");

    RunManifest m;
    m.tool_version = kVersion;
    m.subcommand = "report";
    m.outputs = std::move(outputs);
    std::sort(m.outputs.begin(), m.outputs.end());
    write_manifest(m, options.out_dir);
}

void run_pipeline(const PipelineOptions& options) {
    ensure_dir(options.out_dir);

    std::string events_path = options.events_path;
    if (events_path.empty()) {
        SynthOptions synth;
        synth.config_path = options.synth_config_path;
        synth.n_patients = options.n_patients;
        synth.seed = options.seed;
        synth.out_dir = options.out_dir + "/synth";
        run_synth(synth);
        events_path = synth.out_dir + "/events.tsv";
    }

    SegmentOptions segment;
    segment.events_path = events_path;
    segment.out_dir = options.out_dir + "/segment";
    run_segment(segment);
    std::string instances_path = segment.out_dir + "/instances.tsv";

    FeaturizeOptions featurize;
    featurize.events_path = events_path;
    featurize.instances_path = instances_path;
    featurize.split = options.split;
    featurize.jobs = options.jobs;
    featurize.out_dir = options.out_dir + "/features";
    run_featurize(featurize);
    std::string features_path = featurize.out_dir + "/features.tsv";

    RankOptionsCli rank;
    rank.features_path = features_path;
    rank.instances_path = instances_path;
    rank.split = options.split;
    rank.top = options.top;
    rank.min_support = options.min_support;
    rank.jobs = options.jobs;
    rank.format = options.format;
    rank.out_dir = options.out_dir + "/rank";
    run_rank(rank);

    // The standard histogram set emitted by every pipeline run.
    struct Combo {
        Grouping grouping;
        Scope scope;
        DecisionMode mode;
    };
    const Combo combos[] = {
        {Grouping::clinical5, Scope::all_features, DecisionMode::lab_order},
        {Grouping::temporal40, Scope::same_variable_only, DecisionMode::lab_order},
        {Grouping::temporal40, Scope::other_variables_only, DecisionMode::lab_order},
        {Grouping::clinical5, Scope::all_features, DecisionMode::med_commission},
        {Grouping::temporal40, Scope::all_features, DecisionMode::med_commission},
        {Grouping::temporal40, Scope::other_variables_only, DecisionMode::med_order},
    };
    {
        auto in = load_analysis_inputs(features_path, instances_path);
        auto rows = analysis_rows(in.instances, false, options.split, nullptr);
        ensure_dir(options.out_dir + "/histogram");
        std::vector<std::string> outputs;
        for (const auto& combo : combos) {
            auto report = compute_histogram(in, rows, combo.grouping, combo.scope, combo.mode,
                                            options.min_support, resolve_jobs(options.jobs));
            std::string name = histogram_file_name(report);
            if (options.format != "json") {
                write_file(options.out_dir + "/histogram/" + name, histogram_table(report));
                outputs.push_back(name);
            }
            std::string json_name = name.substr(0, name.size() - 4) + ".json";
            write_file(options.out_dir + "/histogram/" + json_name,
                       histogram_json(report).dump(2) + "\n");
            outputs.push_back(json_name);
        }
        RunManifest m;
        m.tool_version = kVersion;
        m.subcommand = "histogram";
        m.input_digests["features"] = sha256_file_hex(features_path);
        m.input_digests["instances"] = sha256_file_hex(instances_path);
        m.config["set"] = "standard";
        add_split_config(m, options.split);
        m.outputs = std::move(outputs);
        std::sort(m.outputs.begin(), m.outputs.end());
        write_manifest(m, options.out_dir + "/histogram");
    }

    TrainOptions train;
    train.features_path = features_path;
    train.instances_path = instances_path;
    train.ks = options.ks;
    train.split = options.split;
    train.solver = options.solver;
    train.commission = options.commission;
    train.min_support = options.min_support;
    train.jobs = options.jobs;
    train.out_dir = options.out_dir + "/train";
    run_train(train);

    EvaluateOptions evaluate;
    evaluate.features_path = features_path;
    evaluate.instances_path = instances_path;
    evaluate.models_dir = train.out_dir + "/models";
    evaluate.format = options.format;
    evaluate.out_dir = options.out_dir + "/eval";
    run_evaluate(evaluate);

    ReportOptions report{options.out_dir, options.out_dir + "/report"};
    run_report(report);

    RunManifest m;
    m.tool_version = kVersion;
    m.subcommand = "pipeline";
    m.config["seed"] = std::to_string(options.seed);
    m.config["commission"] = options.commission ? "true" : "false";
    m.config["format"] = options.format;
    add_split_config(m, options.split);
    if (!options.events_path.empty())
        m.input_digests["events"] = sha256_file_hex(options.events_path);
    m.outputs = {"synth", "segment", "features", "rank", "histogram", "train", "eval", "report"};
    if (!options.events_path.empty()) m.outputs.erase(m.outputs.begin());
    write_manifest(m, options.out_dir);
}

}
