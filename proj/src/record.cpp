#include "orderlens/record.hpp"

#include <algorithm>

namespace orderlens {

std::optional<Sex> parse_sex(std::string_view code) {
    if (code == "F") return Sex::female;
    if (code == "M") return Sex::male;
    if (code == "U") return Sex::unknown;
    return std::nullopt;
}

std::optional<Race> parse_race(std::string_view code) {
    for (size_t i = 0; i < kRaceCodes.size(); ++i)
        if (code == kRaceCodes[i]) return static_cast<Race>(i);
    return std::nullopt;
}

const char* to_code(Sex s) { return kSexCodes[static_cast<size_t>(s)]; }
const char* to_code(Race r) { return kRaceCodes[static_cast<size_t>(r)]; }

std::optional<TimePoint> PatientRecord::first_event_time() const {
    std::optional<TimePoint> t;
    auto update = [&](TimePoint c) {
        if (!t || c < *t) t = c;
    };
    for (const auto& e : lab_events) update(e.order_time);
    for (const auto& e : med_status_events) update(e.time);
    for (const auto& e : procedure_events) update(e.time);
    for (const auto& e : device_intervals) update(e.start);
    return t;
}

std::optional<TimePoint> PatientRecord::last_event_time() const {
    std::optional<TimePoint> t;
    auto update = [&](TimePoint c) {
        if (!t || c > *t) t = c;
    };
    for (const auto& e : lab_events) {
        update(e.order_time);
        if (e.result_time) update(*e.result_time);
    }
    for (const auto& e : med_status_events) update(e.time);
    for (const auto& e : procedure_events) update(e.time);
    for (const auto& e : device_intervals) {
        update(e.start);
        if (e.end) update(*e.end);
    }
    return t;
}

std::optional<TimePoint> PatientRecord::end_time() const {
    if (discharge_time) return discharge_time;
    return last_event_time();
}

namespace {

void check_sorted(const PatientRecord& r, ValidationReport& report) {
    auto add = [&](const char* code, const std::string& msg) {
        report.push_back({r.patient_id, code, msg});
    };
    if (!std::is_sorted(r.lab_events.begin(), r.lab_events.end(),
                        [](const auto& a, const auto& b) { return a.order_time < b.order_time; }))
        add("lab.order", "lab events not in chronological order");
    if (!std::is_sorted(r.med_status_events.begin(), r.med_status_events.end(),
                        [](const auto& a, const auto& b) { return a.time < b.time; }))
        add("med.order", "medication status events not in chronological order");
    if (!std::is_sorted(r.procedure_events.begin(), r.procedure_events.end(),
                        [](const auto& a, const auto& b) { return a.time < b.time; }))
        add("proc.order", "procedure events not in chronological order");
    if (!std::is_sorted(r.device_intervals.begin(), r.device_intervals.end(),
                        [](const auto& a, const auto& b) { return a.start < b.start; }))
        add("dev.order", "device intervals not in chronological order");
}

}  // namespace

ValidationReport validate(const PatientRecord& r) {
    ValidationReport report;
    auto add = [&](const char* code, const std::string& msg) {
        report.push_back({r.patient_id, code, msg});
    };

    if (r.patient_id.empty()) add("patient.id", "empty patient id");
    if (!(r.demographics.age_years >= 0.0)) add("demo.age", "negative age");

    check_sorted(r, report);

    std::map<std::string, ValueKind> lab_kinds;
    for (const auto& e : r.lab_events) {
        if (e.result_time && *e.result_time < e.order_time)
            add("lab.result_precedes_order",
                "result precedes order for lab " + e.lab_id + " at " + e.order_time.to_string());
        if (e.result_time.has_value() != e.value.has_value())
            add("lab.value_result_mismatch",
                "value must be present exactly when a result time is, lab " + e.lab_id);
        if (e.value) {
            bool numeric = std::holds_alternative<double>(*e.value);
            if (numeric != (e.value_kind == ValueKind::continuous))
                add("lab.value_kind", "value type inconsistent with value kind, lab " + e.lab_id);
        }
        auto [it, inserted] = lab_kinds.emplace(e.lab_id, e.value_kind);
        if (!inserted && it->second != e.value_kind)
            add("lab.kind_conflict", "value kind differs across events of lab " + e.lab_id);
    }

    std::map<std::string, bool> med_last_on;
    for (const auto& e : r.med_status_events) {
        auto it = med_last_on.find(e.med_id);
        if (it == med_last_on.end()) {
            if (!e.on)
                add("med.alternation",
                    "first status event for med " + e.med_id + " is 'off'");
            med_last_on[e.med_id] = e.on;
        } else {
            if (it->second == e.on)
                add("med.alternation",
                    "consecutive '" + std::string(e.on ? "on" : "off") +
                        "' events for med " + e.med_id + " at " + e.time.to_string());
            it->second = e.on;
        }
    }

    std::map<std::string, const DeviceInterval*> dev_last;
    for (const auto& d : r.device_intervals) {
        if (d.end && *d.end < d.start)
            add("dev.end_before_start",
                "device " + d.device_id + " interval ends before it starts");
        auto it = dev_last.find(d.device_id);
        if (it != dev_last.end()) {
            const DeviceInterval* prev = it->second;
            if (!prev->end || d.start < *prev->end)
                add("dev.overlap", "overlapping intervals for device " + d.device_id);
        }
        dev_last[d.device_id] = &d;
    }

    if (r.discharge_time) {
        auto last = r.last_event_time();
        if (last && *last > *r.discharge_time)
            add("discharge.events_after", "events recorded after discharge");
    }
    return report;
}

ValidationReport validate_dataset(std::span<const PatientRecord> records) {
    ValidationReport report;
    std::set<std::string> seen;
    std::map<std::string, ValueKind> lab_kinds;
    for (const auto& r : records) {
        auto per_record = validate(r);
        report.insert(report.end(), per_record.begin(), per_record.end());
        if (!seen.insert(r.patient_id).second)
            report.push_back({r.patient_id, "patient.duplicate", "duplicate patient id"});
        for (const auto& e : r.lab_events) {
            auto [it, inserted] = lab_kinds.emplace(e.lab_id, e.value_kind);
            if (!inserted && it->second != e.value_kind)
                report.push_back({r.patient_id, "lab.kind_conflict",
                                  "value kind of lab " + e.lab_id +
                                      " differs from other patients"});
        }
    }
    return report;
}

Vocabulary build_vocabulary(std::span<const PatientRecord> records) {
    Vocabulary v;
    for (const auto& r : records) {
        for (const auto& e : r.lab_events) v.labs.emplace(e.lab_id, e.value_kind);
        for (const auto& e : r.med_status_events) v.meds.insert(e.med_id);
        for (const auto& e : r.procedure_events) v.procedures.insert(e.proc_id);
        for (const auto& e : r.device_intervals) v.devices.insert(e.device_id);
    }
    return v;
}

}
