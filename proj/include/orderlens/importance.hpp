#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orderlens/featurize.hpp"
#include "orderlens/segmentation.hpp"

namespace orderlens {

enum class Scope { all_features, same_variable_only, other_variables_only };
enum class Grouping { clinical5, temporal40 };
enum class DecisionMode { lab_order, med_order, med_commission };

std::optional<Scope> parse_scope(std::string_view text);
const char* to_name(Scope scope);
std::optional<Grouping> parse_grouping(std::string_view text);
const char* to_name(Grouping grouping);
std::optional<DecisionMode> parse_decision_mode(std::string_view text);
const char* to_name(DecisionMode mode);

struct AucScore {
    DecisionId decision;
    std::string feature_id;
    double auc_raw = 0.0;        // directional Mann-Whitney estimate
    double auc_effective = 0.0;  // max(auc, 1-auc): strength regardless of direction
    size_t n_pos = 0;
    size_t n_neg = 0;
};

struct RankOptions {
    Scope scope = Scope::all_features;
    size_t min_support = 5;  // below this, scores are flagged, not dropped
};

// Label column for a decision, aligned with the matrix rows.
std::vector<std::uint8_t> labels_for(std::span<const PatientStateInstance> instances,
                                     const DecisionId& decision);

// All decisions implied by the vocabulary, lab orders first.
std::vector<DecisionId> all_decisions(const Vocabulary& vocabulary);

// Scores every in-scope feature on the given rows, sorted by descending
// effective strength with lexicographic feature-id tie-breaks.
// Throws std::invalid_argument when the labels are single-class on `rows`.
std::vector<AucScore> rank_features(const FeatureMatrix& matrix,
                                    std::span<const std::uint8_t> labels,
                                    std::span<const size_t> rows, const DecisionId& decision,
                                    const RankOptions& options = {});

struct SkippedDecision {
    DecisionId decision;
    std::string reason;
};

struct DecisionRanking {
    AucScore best;
    bool low_support = false;
};

struct HistogramReport {
    Grouping grouping = Grouping::clinical5;
    Scope scope = Scope::all_features;
    DecisionMode mode = DecisionMode::lab_order;
    std::map<std::string, size_t> counts;  // category -> #decisions whose best feature is in it
    size_t analyzed = 0;
    std::vector<SkippedDecision> skipped;
    std::map<std::string, DecisionRanking> best_by_decision;  // keyed by decision string
};

struct HistogramOptions {
    Grouping grouping = Grouping::clinical5;
    Scope scope = Scope::all_features;
    DecisionMode mode = DecisionMode::lab_order;
    size_t min_support = 5;
    int jobs = 1;
};

HistogramReport best_feature_histogram(const FeatureMatrix& matrix,
                                       std::span<const PatientStateInstance> instances,
                                       std::span<const size_t> rows,
                                       std::span<const DecisionId> decisions,
                                       const HistogramOptions& options);

}
