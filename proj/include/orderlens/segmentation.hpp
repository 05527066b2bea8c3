#pragma once

#include <compare>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "orderlens/record.hpp"

namespace orderlens {

struct DecisionId {
    enum class Kind { lab_order, med_order };

    Kind kind = Kind::lab_order;
    std::string variable_id;

    auto operator<=>(const DecisionId&) const = default;

    std::string to_string() const;
    static std::optional<DecisionId> parse(std::string_view text);
};

// One patient snapshot at a daily anchor, labeled with next-24h decisions.
// Label maps are stored sparsely: ids absent from the sets are false.
struct PatientStateInstance {
    std::string patient_id;
    TimePoint anchor_time;
    int day_index = 0;  // 1-based anchor index within the stay
    std::set<std::string> labs_ordered;   // lab order in (anchor, anchor+24h]
    std::set<std::string> meds_given;     // med on-interval overlaps (anchor, anchor+24h]
    std::set<std::string> meds_on_before; // any med_on at or before the anchor

    bool operator==(const PatientStateInstance&) const = default;

    bool label(const DecisionId& d) const {
        return d.kind == DecisionId::Kind::lab_order ? labs_ordered.count(d.variable_id) > 0
                                                     : meds_given.count(d.variable_id) > 0;
    }
    std::string instance_id() const {
        return patient_id + ":" + std::to_string(day_index);
    }
};

struct SegmentationOptions {
    int anchor_minute_of_day = 8 * 60;
    int period_hours = 24;
};

// All anchor times t with clock = 08:00 and first_event < t <= end_time.
std::vector<TimePoint> anchors_for(const PatientRecord& record,
                                   const SegmentationOptions& opts = {});

std::vector<PatientStateInstance> build_instances(const PatientRecord& record,
                                                  const SegmentationOptions& opts = {});

// Keeps only instances whose anchor precedes the first med_on for med_id
// (the patient was never on the medication up to the anchor).
std::vector<PatientStateInstance> commission_instances(
    std::span<const PatientStateInstance> instances, const PatientRecord& record,
    const std::string& med_id);

// Same filter driven by the persisted meds_on_before flags, for stages that
// work from instance files rather than records.
std::vector<size_t> commission_rows(std::span<const PatientStateInstance> instances,
                                    std::span<const size_t> rows, const std::string& med_id);

inline constexpr const char* kInstanceFileHeader = "#orderlens-instances v1";

void write_instances(std::span<const PatientStateInstance> instances, std::ostream& out);
void save_instances(std::span<const PatientStateInstance> instances, const std::string& path);
std::vector<PatientStateInstance> read_instances(std::istream& in);
std::vector<PatientStateInstance> load_instances(const std::string& path);

}
