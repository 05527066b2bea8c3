#include "orderlens/importance.hpp"

#include <algorithm>
#include <stdexcept>

#include "orderlens/auc.hpp"
#include "orderlens/parallel.hpp"

namespace orderlens {

std::optional<Scope> parse_scope(std::string_view text) {
    if (text == "all_features") return Scope::all_features;
    if (text == "same_variable_only") return Scope::same_variable_only;
    if (text == "other_variables_only") return Scope::other_variables_only;
    return std::nullopt;
}

const char* to_name(Scope scope) {
    switch (scope) {
        case Scope::all_features: return "all_features";
        case Scope::same_variable_only: return "same_variable_only";
        case Scope::other_variables_only: return "other_variables_only";
    }
    return "?";
}

std::optional<Grouping> parse_grouping(std::string_view text) {
    if (text == "clinical5") return Grouping::clinical5;
    if (text == "temporal40") return Grouping::temporal40;
    return std::nullopt;
}

const char* to_name(Grouping grouping) {
    return grouping == Grouping::clinical5 ? "clinical5" : "temporal40";
}

std::optional<DecisionMode> parse_decision_mode(std::string_view text) {
    if (text == "lab_order") return DecisionMode::lab_order;
    if (text == "med_order") return DecisionMode::med_order;
    if (text == "med_commission") return DecisionMode::med_commission;
    return std::nullopt;
}

const char* to_name(DecisionMode mode) {
    switch (mode) {
        case DecisionMode::lab_order: return "lab_order";
        case DecisionMode::med_order: return "med_order";
        case DecisionMode::med_commission: return "med_commission";
    }
    return "?";
}

std::vector<std::uint8_t> labels_for(std::span<const PatientStateInstance> instances,
                                     const DecisionId& decision) {
    std::vector<std::uint8_t> labels(instances.size());
    for (size_t i = 0; i < instances.size(); ++i)
        labels[i] = instances[i].label(decision) ? 1 : 0;
    return labels;
}

std::vector<DecisionId> all_decisions(const Vocabulary& vocab) {
    std::vector<DecisionId> decisions;
    for (const auto& [lab, kind] : vocab.labs)
        decisions.push_back({DecisionId::Kind::lab_order, lab});
    for (const auto& med : vocab.meds)
        decisions.push_back({DecisionId::Kind::med_order, med});
    return decisions;
}

namespace {

ClinicalCategory decision_category(const DecisionId& decision) {
    return decision.kind == DecisionId::Kind::lab_order ? ClinicalCategory::lab
                                                        : ClinicalCategory::med;
}

bool in_scope(const FeatureDescriptor& d, const DecisionId& decision, Scope scope) {
    switch (scope) {
        case Scope::all_features:
            return true;
        case Scope::same_variable_only:
            return d.source_variable == decision.variable_id;
        case Scope::other_variables_only:
            return d.clinical_category == decision_category(decision) &&
                   d.source_variable != decision.variable_id;
    }
    return false;
}

}  // namespace

std::vector<AucScore> rank_features(const FeatureMatrix& matrix,
                                    std::span<const std::uint8_t> labels,
                                    std::span<const size_t> rows, const DecisionId& decision,
                                    const RankOptions& options) {
    std::vector<std::uint8_t> row_labels(rows.size());
    size_t n_pos = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        row_labels[i] = labels[rows[i]];
        n_pos += row_labels[i] ? 1 : 0;
    }
    if (n_pos == 0 || n_pos == rows.size())
        throw std::invalid_argument("rank_features: decision " + decision.to_string() +
                                    " is single-class on the given rows");

    std::vector<AucScore> scores;
    std::vector<double> column(rows.size());
    for (size_t c = 0; c < matrix.n_cols(); ++c) {
        const auto& d = matrix.descriptors()[c];
        if (!in_scope(d, decision, options.scope)) continue;
        for (size_t i = 0; i < rows.size(); ++i) column[i] = matrix.at(rows[i], c);
        double raw = auc_midrank(column, row_labels);
        AucScore s;
        s.decision = decision;
        s.feature_id = d.feature_id;
        s.auc_raw = raw;
        s.auc_effective = std::max(raw, 1.0 - raw);
        s.n_pos = n_pos;
        s.n_neg = rows.size() - n_pos;
        scores.push_back(std::move(s));
    }
    std::sort(scores.begin(), scores.end(), [](const AucScore& a, const AucScore& b) {
        if (a.auc_effective != b.auc_effective) return a.auc_effective > b.auc_effective;
        return a.feature_id < b.feature_id;
    });
    return scores;
}

HistogramReport best_feature_histogram(const FeatureMatrix& matrix,
                                       std::span<const PatientStateInstance> instances,
                                       std::span<const size_t> rows,
                                       std::span<const DecisionId> decisions,
                                       const HistogramOptions& options) {
    HistogramReport report;
    report.grouping = options.grouping;
    report.scope = options.scope;
    report.mode = options.mode;

    std::vector<DecisionId> selected;
    for (const auto& d : decisions) {
        bool is_lab = d.kind == DecisionId::Kind::lab_order;
        if (options.mode == DecisionMode::lab_order ? is_lab : !is_lab)
            selected.push_back(d);
    }

    struct Outcome {
        std::optional<AucScore> best;
        bool low_support = false;
        std::string skip_reason;
    };
    std::vector<Outcome> outcomes(selected.size());

    std::map<std::string, size_t> column_of;
    for (size_t c = 0; c < matrix.n_cols(); ++c)
        column_of[matrix.descriptors()[c].feature_id] = c;

    parallel_for(selected.size(), options.jobs, [&](size_t i) {
        const auto& decision = selected[i];
        std::vector<size_t> decision_rows(rows.begin(), rows.end());
        if (options.mode == DecisionMode::med_commission)
            decision_rows = commission_rows(instances, decision_rows, decision.variable_id);
        if (decision_rows.empty()) {
            outcomes[i].skip_reason = "no instances in scope";
            return;
        }
        auto labels = labels_for(instances, decision);
        size_t n_pos = 0;
        for (size_t r : decision_rows) n_pos += labels[r] ? 1 : 0;
        if (n_pos == 0 || n_pos == decision_rows.size()) {
            outcomes[i].skip_reason = "single-class labels";
            return;
        }
        RankOptions rank_opts{options.scope, options.min_support};
        auto ranked = rank_features(matrix, labels, decision_rows, decision, rank_opts);
        if (ranked.empty()) {
            outcomes[i].skip_reason = "no features in scope";
            return;
        }
        outcomes[i].best = ranked.front();
        outcomes[i].low_support = n_pos < options.min_support ||
                                  decision_rows.size() - n_pos < options.min_support;
    });

    for (size_t i = 0; i < selected.size(); ++i) {
        const auto& outcome = outcomes[i];
        if (!outcome.best) {
            report.skipped.push_back({selected[i], outcome.skip_reason});
            continue;
        }
        const auto& d = matrix.descriptors()[column_of.at(outcome.best->feature_id)];
        std::string category = options.grouping == Grouping::clinical5
                                   ? std::string(to_name(d.clinical_category))
                                   : d.temporal_category;
        ++report.counts[category];
        ++report.analyzed;
        report.best_by_decision[selected[i].to_string()] = {*outcome.best, outcome.low_support};
    }
    return report;
}

}
