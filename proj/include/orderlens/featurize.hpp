#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "orderlens/catalog.hpp"
#include "orderlens/record.hpp"
#include "orderlens/segmentation.hpp"

namespace orderlens {

// Missing is NaN in memory and the literal "NA" in persisted matrices.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

// Summary of one continuous lab's history up to (and including) the anchor.
struct ContinuousLabSnapshot {
    // Values and result times; missing when there are too few results.
    double last = kMissing;          // A
    double second_last = kMissing;   // B
    double first = kMissing;         // F
    double nadir = kMissing;         // D (ties resolve to most recent)
    double horizon = kMissing;       // H (ties resolve to most recent)
    TimePoint t_last, t_second_last, t_first, t_nadir, t_horizon;

    std::vector<std::pair<TimePoint, double>> results_24h;  // within [anchor-24h, anchor]
    size_t result_count = 0;
    double mean = kMissing;
    double stddev = kMissing;  // population

    bool has_order = false;
    TimePoint last_order_time, first_order_time;
    bool pending = false;  // an order at or before the anchor without a result by the anchor

    static ContinuousLabSnapshot build(std::span<const LabEvent> events, TimePoint anchor);
};

std::array<double, 40> featurize_continuous_lab(const ContinuousLabSnapshot& snapshot,
                                                TimePoint anchor);

// Tokens are integer-coded through a per-lab vocabulary (see
// CategoricalCodes); slots C01-C03 hold codes, not raw tokens.
struct TokenCodeMap {
    std::vector<std::string> tokens;  // index = code

    int code(const std::string& token) const {
        for (size_t i = 0; i < tokens.size(); ++i)
            if (tokens[i] == token) return static_cast<int>(i);
        return -1;
    }
};

std::array<double, 7> featurize_categorical_lab(std::span<const LabEvent> events,
                                                TimePoint anchor, const TokenCodeMap& codes);

std::array<double, 4> featurize_medication(std::span<const MedStatusEvent> events,
                                           TimePoint anchor);

std::array<double, 4> featurize_procedure(std::span<const ProcedureEvent> events,
                                          TimePoint anchor);

double featurize_device(std::span<const DeviceInterval> intervals, TimePoint anchor);

struct FeatureDescriptor {
    std::string feature_id;         // "<variable>.<slot>", e.g. "GLU.F19"
    ClinicalCategory clinical_category = ClinicalCategory::lab;
    std::string temporal_category;  // slot id, e.g. "F19"
    std::string source_variable;

    bool operator==(const FeatureDescriptor&) const = default;
};

class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::vector<std::string> row_ids, std::vector<FeatureDescriptor> descriptors)
        : row_ids_(std::move(row_ids)),
          descriptors_(std::move(descriptors)),
          values_(row_ids_.size() * descriptors_.size(), kMissing) {}

    size_t n_rows() const { return row_ids_.size(); }
    size_t n_cols() const { return descriptors_.size(); }

    double at(size_t row, size_t col) const { return values_[row * n_cols() + col]; }
    void set(size_t row, size_t col, double v) { values_[row * n_cols() + col] = v; }

    std::span<double> row(size_t r) { return {values_.data() + r * n_cols(), n_cols()}; }
    std::span<const double> row(size_t r) const {
        return {values_.data() + r * n_cols(), n_cols()};
    }
    std::vector<double> column(size_t c) const {
        std::vector<double> out(n_rows());
        for (size_t r = 0; r < n_rows(); ++r) out[r] = at(r, c);
        return out;
    }

    const std::vector<std::string>& row_ids() const { return row_ids_; }
    const std::vector<FeatureDescriptor>& descriptors() const { return descriptors_; }
    // Index of a feature id, or npos.
    size_t column_index(const std::string& feature_id) const;

    bool operator==(const FeatureMatrix& other) const;

private:
    std::vector<std::string> row_ids_;
    std::vector<FeatureDescriptor> descriptors_;
    std::vector<double> values_;  // row-major, NaN = missing
};

struct CategoricalCodes {
    std::map<std::string, TokenCodeMap> by_lab;
};

// Integer codes assigned by chronological first appearance, training
// patients' results first. An empty train set means "code over everyone".
CategoricalCodes build_categorical_codes(std::span<const PatientRecord> records,
                                         const std::set<std::string>& train_patients = {});

// Deterministic column order: source variable id, then slot position.
std::vector<FeatureDescriptor> catalog_descriptors(const Vocabulary& vocabulary);

FeatureMatrix build_matrix(std::span<const PatientRecord> records,
                           std::span<const PatientStateInstance> instances,
                           const Vocabulary& vocabulary, const CategoricalCodes& codes,
                           int jobs = 1);

}
