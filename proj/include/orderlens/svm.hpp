#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orderlens/featurize.hpp"
#include "orderlens/segmentation.hpp"

namespace orderlens {

struct SplitSpec {
    std::vector<std::string> train_patient_ids;  // sorted
    std::vector<std::string> test_patient_ids;   // sorted
    std::uint64_t seed = 0;

    bool is_train(const std::string& patient_id) const;
};

// Patient-level split: no patient contributes instances to both sides.
// Exactly one of train_count / train_fraction must be set.
SplitSpec split_by_patient(std::vector<std::string> patient_ids,
                           std::optional<size_t> train_count,
                           std::optional<double> train_fraction, std::uint64_t seed);

// Row indices whose instance belongs to a train (or test) patient.
std::vector<size_t> rows_for_split(std::span<const PatientStateInstance> instances,
                                   const SplitSpec& split, bool train);

struct SolverConfig {
    double C = 1.0;
    int epochs = 200;
    std::uint64_t shuffle_seed = 1;
    bool balance = false;           // class-frequency cost reweighting
    double averaging_fraction = 0.25;  // tail fraction of epochs averaged
};

struct LinearModel {
    DecisionId decision;
    int k = 0;
    std::vector<std::string> selected_features;  // constant columns dropped
    std::vector<double> weights;                 // per selected feature
    double bias = 0.0;
    std::vector<double> means;    // training standardization
    std::vector<double> stds;     // all > 0
    std::vector<double> medians;  // training imputation for missing
    SolverConfig config;
    std::vector<std::string> dropped_constant;  // requested but constant in training
    bool commission = false;  // trained/evaluated on commission instances only
};

// First k entries of the all-features AUC ranking on the training rows.
std::vector<std::string> select_top_k(const FeatureMatrix& matrix,
                                      std::span<const std::uint8_t> labels,
                                      std::span<const size_t> train_rows,
                                      const DecisionId& decision, size_t k);

// Deterministic epoch-based subgradient descent on
//   0.5*||w||^2 + C * sum_i hinge(y_i * (w.x_i + b))
// over median-imputed, standardized training columns.
LinearModel train_linear_svm(const FeatureMatrix& matrix,
                             std::span<const std::uint8_t> labels,
                             std::span<const size_t> train_rows,
                             const DecisionId& decision, int k,
                             std::span<const std::string> selected_features,
                             const SolverConfig& config);

double model_score(const LinearModel& model, const FeatureMatrix& matrix, size_t row);

struct EvalResult {
    DecisionId decision;
    int k = 0;
    double auc = 0.0;
    size_t n_pos = 0;
    size_t n_neg = 0;
};

// Test AUC of the model's decision scores (same estimator as the ranking).
EvalResult evaluate_model(const LinearModel& model, const FeatureMatrix& matrix,
                          std::span<const std::uint8_t> labels,
                          std::span<const size_t> test_rows);

std::string model_to_json(const LinearModel& model, const SplitSpec& split);
LinearModel model_from_json(const std::string& text, SplitSpec* split = nullptr);

}
