#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "orderlens/time.hpp"

namespace orderlens {

enum class Sex { female, male, unknown };
enum class Race { white, black, asian, hispanic, other, unknown };

inline constexpr std::array<const char*, 3> kSexCodes = {"F", "M", "U"};
inline constexpr std::array<const char*, 6> kRaceCodes = {"WHITE", "BLACK",  "ASIAN",
                                                          "HISPANIC", "OTHER", "UNKNOWN"};

std::optional<Sex> parse_sex(std::string_view code);
std::optional<Race> parse_race(std::string_view code);
const char* to_code(Sex s);
const char* to_code(Race r);

struct Demographics {
    double age_years = 0.0;
    Sex sex = Sex::unknown;
    Race race = Race::unknown;

    bool operator==(const Demographics&) const = default;
};

enum class ValueKind { continuous, categorical };

// A real result for continuous labs, a token for categorical ones.
using LabValue = std::variant<double, std::string>;

// One lab order, optionally carrying its result.
struct LabEvent {
    std::string lab_id;
    TimePoint order_time;
    std::optional<TimePoint> result_time;
    std::optional<LabValue> value;
    ValueKind value_kind = ValueKind::continuous;

    bool operator==(const LabEvent&) const = default;
};

struct MedStatusEvent {
    std::string med_id;
    TimePoint time;
    bool on = false;

    bool operator==(const MedStatusEvent&) const = default;
};

struct ProcedureEvent {
    std::string proc_id;
    TimePoint time;

    bool operator==(const ProcedureEvent&) const = default;
};

struct DeviceInterval {
    std::string device_id;
    TimePoint start;
    std::optional<TimePoint> end;  // absent = ongoing

    bool operator==(const DeviceInterval&) const = default;
};

struct PatientRecord {
    std::string patient_id;
    Demographics demographics;
    std::vector<LabEvent> lab_events;              // sorted by order_time
    std::vector<MedStatusEvent> med_status_events; // sorted by time
    std::vector<ProcedureEvent> procedure_events;  // sorted by time
    std::vector<DeviceInterval> device_intervals;  // sorted by start
    std::optional<TimePoint> discharge_time;

    bool operator==(const PatientRecord&) const = default;

    std::optional<TimePoint> first_event_time() const;
    std::optional<TimePoint> last_event_time() const;
    // discharge_time when present, otherwise the last event time.
    std::optional<TimePoint> end_time() const;
};

struct Violation {
    std::string patient_id;
    std::string code;     // stable identifier, e.g. "med.alternation"
    std::string message;

    bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

// Checks the per-record invariants; violations are data, not failures.
ValidationReport validate(const PatientRecord& record);

// Per-record checks plus dataset-level ones (id uniqueness, cross-record
// value-kind consistency).
ValidationReport validate_dataset(std::span<const PatientRecord> records);

struct Vocabulary {
    std::map<std::string, ValueKind> labs;
    std::set<std::string> meds;
    std::set<std::string> procedures;
    std::set<std::string> devices;
};

Vocabulary build_vocabulary(std::span<const PatientRecord> records);

}
