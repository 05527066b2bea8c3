#include "orderlens/segmentation.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "orderlens/errors.hpp"
#include "orderlens/tsv.hpp"

namespace orderlens {

std::string DecisionId::to_string() const {
    return (kind == Kind::lab_order ? "lab_order:" : "med_order:") + variable_id;
}

std::optional<DecisionId> DecisionId::parse(std::string_view text) {
    size_t colon = text.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    auto kind_str = text.substr(0, colon);
    auto id = text.substr(colon + 1);
    if (id.empty()) return std::nullopt;
    if (kind_str == "lab_order") return DecisionId{Kind::lab_order, std::string(id)};
    if (kind_str == "med_order") return DecisionId{Kind::med_order, std::string(id)};
    return std::nullopt;
}

std::vector<TimePoint> anchors_for(const PatientRecord& record,
                                   const SegmentationOptions& opts) {
    std::vector<TimePoint> anchors;
    auto first = record.first_event_time();
    auto end = record.end_time();
    if (!first || !end || *end < *first) return anchors;

    // First anchor strictly after the first event.
    std::int64_t day_start = *first >= TimePoint(0)
                                 ? first->minutes() / 1440
                                 : (first->minutes() - 1439) / 1440;
    TimePoint candidate(day_start * 1440 + opts.anchor_minute_of_day);
    while (candidate <= *first) candidate = candidate.plus_hours(opts.period_hours);
    for (; candidate <= *end; candidate = candidate.plus_hours(opts.period_hours))
        anchors.push_back(candidate);
    return anchors;
}

std::vector<PatientStateInstance> build_instances(const PatientRecord& record,
                                                  const SegmentationOptions& opts) {
    std::vector<PatientStateInstance> instances;
    auto anchors = anchors_for(record, opts);
    instances.reserve(anchors.size());

    for (size_t i = 0; i < anchors.size(); ++i) {
        PatientStateInstance inst;
        inst.patient_id = record.patient_id;
        inst.anchor_time = anchors[i];
        inst.day_index = static_cast<int>(i) + 1;
        TimePoint window_end = anchors[i].plus_hours(24);

        for (const auto& e : record.lab_events)
            if (e.order_time > anchors[i] && e.order_time <= window_end)
                inst.labs_ordered.insert(e.lab_id);

        // A med is "given" if an on-interval overlaps the window: either an
        // on event falls inside it, or the med is already on at the anchor.
        std::map<std::string, bool> on_at_anchor;
        for (const auto& e : record.med_status_events) {
            if (e.time <= anchors[i]) {
                on_at_anchor[e.med_id] = e.on;
                if (e.on) inst.meds_on_before.insert(e.med_id);
            } else if (e.time <= window_end && e.on) {
                inst.meds_given.insert(e.med_id);
            }
        }
        for (const auto& [med, on] : on_at_anchor)
            if (on) inst.meds_given.insert(med);

        instances.push_back(std::move(inst));
    }
    return instances;
}

std::vector<PatientStateInstance> commission_instances(
    std::span<const PatientStateInstance> instances, const PatientRecord& record,
    const std::string& med_id) {
    std::optional<TimePoint> first_on;
    for (const auto& e : record.med_status_events)
        if (e.on && e.med_id == med_id && (!first_on || e.time < *first_on))
            first_on = e.time;

    std::vector<PatientStateInstance> kept;
    for (const auto& inst : instances)
        if (!first_on || inst.anchor_time < *first_on) kept.push_back(inst);
    return kept;
}

std::vector<size_t> commission_rows(std::span<const PatientStateInstance> instances,
                                    std::span<const size_t> rows,
                                    const std::string& med_id) {
    std::vector<size_t> kept;
    for (size_t r : rows)
        if (!instances[r].meds_on_before.count(med_id)) kept.push_back(r);
    return kept;
}

void write_instances(std::span<const PatientStateInstance> instances, std::ostream& out) {
    out << kInstanceFileHeader << '\n';
    for (const auto& inst : instances) {
        out << inst.patient_id << '\t' << inst.anchor_time.to_string() << '\t'
            << inst.day_index;
        for (const auto& lab : inst.labs_ordered) out << "\tlab_order:" << lab << "=1";
        for (const auto& med : inst.meds_given) out << "\tmed_order:" << med << "=1";
        for (const auto& med : inst.meds_on_before) out << "\tprior:" << med << "=1";
        out << '\n';
    }
}

void save_instances(std::span<const PatientStateInstance> instances, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_instances(instances, out);
}

std::vector<PatientStateInstance> read_instances(std::istream& in) {
    std::string line;
    size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty stream: missing header");
    ++line_no;
    if (std::string(strip_cr(line)) != kInstanceFileHeader)
        throw ParseError("unsupported instance file header '" + line + "'");

    std::vector<PatientStateInstance> instances;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = strip_cr(line);
        if (sv.empty()) continue;
        auto fields = split_tabs(sv);
        if (fields.size() < 3)
            throw ParseError("line " + std::to_string(line_no) + ": expected at least 3 fields");
        PatientStateInstance inst;
        inst.patient_id = std::string(fields[0]);
        auto ts = TimePoint::parse(fields[1]);
        if (!ts) throw ParseError("line " + std::to_string(line_no) + ": bad anchor timestamp");
        inst.anchor_time = *ts;
        auto day = parse_int(fields[2]);
        if (!day || *day < 1)
            throw ParseError("line " + std::to_string(line_no) + ": bad day index");
        inst.day_index = static_cast<int>(*day);
        for (size_t i = 3; i < fields.size(); ++i) {
            auto f = fields[i];
            if (f.size() < 3 || f.substr(f.size() - 2) != "=1")
                throw ParseError("line " + std::to_string(line_no) + ": bad label field '" +
                                 std::string(f) + "'");
            auto key = f.substr(0, f.size() - 2);
            if (key.rfind("lab_order:", 0) == 0)
                inst.labs_ordered.insert(std::string(key.substr(10)));
            else if (key.rfind("med_order:", 0) == 0)
                inst.meds_given.insert(std::string(key.substr(10)));
            else if (key.rfind("prior:", 0) == 0)
                inst.meds_on_before.insert(std::string(key.substr(6)));
            else
                throw ParseError("line " + std::to_string(line_no) + ": unknown label kind in '" +
                                 std::string(f) + "'");
        }
        instances.push_back(std::move(inst));
    }
    return instances;
}

std::vector<PatientStateInstance> load_instances(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_instances(in);
}

}
