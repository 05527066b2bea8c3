#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "orderlens/catalog.hpp"
#include "orderlens/record.hpp"
#include "orderlens/segmentation.hpp"

namespace orderlens {

// Rules plant dependencies whose expected best-feature category is known,
// so pipeline output can be checked against ground truth.

// Lab ordered on a fixed schedule; expected signal: own F19.
struct RoutineLabRule {
    std::string lab_id;
    double period_hours = 48.0;
};

// High value of one lab prompts an order of another; expected signal:
// source lab's F01 among other-variable features.
struct ValueTriggerRule {
    std::string source_lab;
    double threshold = 13.0;
    std::string target_lab;
    double delay_min_hours = 2.0;
    double delay_max_hours = 10.0;
};

// A medication follows a procedure; expected signal: the procedure's P01.
struct ProcedureTriggerRule {
    std::string proc_id;
    std::string target_med;
    double delay_min_hours = 26.0;
    double delay_max_hours = 46.0;
};

// Companion medication started shortly after its partner; expected signal:
// partner's M01/M02.
struct MedPairRule {
    std::string med_a;
    std::string med_b;
    double co_prob = 0.9;
};

using Rule = std::variant<RoutineLabRule, ValueTriggerRule, ProcedureTriggerRule, MedPairRule>;

struct SynthConfig {
    int n_patients = 200;
    std::uint64_t seed = 42;

    // Truncated-geometric stay length in days.
    int stay_min_days = 2;
    int stay_max_days = 14;
    double stay_continue_prob = 0.75;

    int n_cont_labs = 10;
    int n_cat_labs = 2;
    int n_meds = 10;
    int n_procs = 7;
    int n_devices = 2;

    std::vector<Rule> rules;

    // Master knob for deviation from the rules: skip probability per rule
    // opportunity. noise = 0 also disables routine-schedule timing jitter,
    // making rules exact.
    double noise = 0.05;
    double routine_jitter_hours = 3.0;

    TimePoint admission_base = TimePoint::from_civil(2024, 1, 1, 0, 0);
    int admission_spread_days = 365;
};

// The config used by `synth --default` and the acceptance runs: five routine
// labs, two value triggers, six procedure triggers, one med pair, plus
// unruled background variables.
SynthConfig default_synth_config();

std::string config_to_json(const SynthConfig& config);
SynthConfig config_from_json(const std::string& text);

// Throws ConfigError naming the offending field.
void validate_config(const SynthConfig& config);

std::vector<PatientRecord> generate(const SynthConfig& config);

struct ExpectedBest {
    ClinicalCategory clinical_category = ClinicalCategory::lab;
    std::string temporal_category;              // primary expected slot
    std::vector<std::string> temporal_alternates;
    std::string source_variable;                // variable carrying the signal
    std::string rule_kind;
};

std::map<DecisionId, ExpectedBest> ground_truth(const SynthConfig& config);

std::string ground_truth_to_json(const std::map<DecisionId, ExpectedBest>& truth);
std::map<DecisionId, ExpectedBest> ground_truth_from_json(const std::string& text);

}
