#include "orderlens/event_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "orderlens/errors.hpp"
#include "orderlens/tsv.hpp"

namespace orderlens {

namespace {

[[noreturn]] void fail(size_t line_no, const std::string& msg) {
    throw ParseError("line " + std::to_string(line_no) + ": " + msg);
}

bool valid_token(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                  (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '+' || c == '-';
        if (!ok) return false;
    }
    return true;
}

struct PendingResult {
    std::string lab_id;
    TimePoint result_time;
    std::string raw_value;
    std::optional<TimePoint> order_ref;
    size_t line_no;
};

struct Builder {
    PatientRecord record;
    std::vector<PendingResult> results;
    std::vector<size_t> open_device;  // indices of open intervals, per append order
    bool has_demo = false;
    bool has_discharge = false;
};

class KeyValues {
public:
    KeyValues(std::span<const std::string_view> fields, size_t line_no)
        : line_no_(line_no) {
        for (auto f : fields) {
            size_t eq = f.find('=');
            if (eq == std::string_view::npos || eq == 0)
                fail(line_no, "expected key=value, got '" + std::string(f) + "'");
            auto key = f.substr(0, eq);
            if (!kv_.emplace(std::string(key), f.substr(eq + 1)).second)
                fail(line_no, "duplicate key '" + std::string(key) + "'");
        }
    }

    std::string_view require(const char* key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) fail(line_no_, std::string("missing key '") + key + "'");
        used_.insert(key);
        return it->second;
    }

    std::optional<std::string_view> get(const char* key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return std::nullopt;
        used_.insert(key);
        return it->second;
    }

    void check_no_extras() const {
        for (const auto& [k, v] : kv_)
            if (!used_.count(k)) fail(line_no_, "unknown key '" + k + "'");
    }

private:
    size_t line_no_;
    std::map<std::string, std::string_view, std::less<>> kv_;
    std::set<std::string, std::less<>> used_;
};

void attach_results(Builder& b, ValidationReport& violations) {
    auto& labs = b.record.lab_events;
    std::stable_sort(labs.begin(), labs.end(), [](const auto& x, const auto& y) {
        return x.order_time < y.order_time;
    });
    std::stable_sort(b.results.begin(), b.results.end(), [](const auto& x, const auto& y) {
        return x.result_time < y.result_time;
    });
    for (const auto& res : b.results) {
        LabEvent* target = nullptr;
        for (auto& e : labs) {
            if (e.lab_id != res.lab_id || e.result_time) continue;
            if (res.order_ref) {
                if (e.order_time == *res.order_ref) {
                    target = &e;
                    break;
                }
            } else if (e.order_time <= res.result_time) {
                target = &e;  // keep scanning: latest pending order wins
            }
        }
        if (!target) {
            violations.push_back(
                {b.record.patient_id, "lab.result_unmatched",
                 "result for lab " + res.lab_id + " (line " + std::to_string(res.line_no) +
                     ") has no pending order"});
            continue;
        }
        target->result_time = res.result_time;
        if (target->value_kind == ValueKind::continuous) {
            auto v = parse_double(res.raw_value);
            if (!v) fail(res.line_no, "continuous lab value '" + res.raw_value + "' is not a number");
            target->value = *v;
        } else {
            if (!valid_token(res.raw_value))
                fail(res.line_no, "invalid categorical token '" + res.raw_value + "'");
            target->value = res.raw_value;
        }
    }
}

}  // namespace

ParsedDataset parse_dataset_lenient(std::istream& in) {
    std::string line;
    size_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError("empty stream: missing header");
    ++line_no;
    if (std::string(strip_cr(line)) != kEventFileHeader)
        throw ParseError("unsupported event file header '" + line + "' (expected '" +
                         std::string(kEventFileHeader) + "')");

    std::map<std::string, Builder> builders;
    ValidationReport violations;

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = strip_cr(line);
        if (sv.empty()) continue;
        auto fields = split_tabs(sv);
        if (fields.size() < 3) fail(line_no, "expected at least 3 tab-separated fields");

        std::string patient_id(fields[0]);
        if (patient_id.empty()) fail(line_no, "empty patient id");
        std::string_view kind = fields[1];
        auto ts = TimePoint::parse(fields[2]);
        if (!ts) fail(line_no, "bad timestamp '" + std::string(fields[2]) + "'");

        auto& b = builders[patient_id];
        b.record.patient_id = patient_id;
        KeyValues kv(std::span<const std::string_view>(fields).subspan(3), line_no);

        if (kind == "demo") {
            if (b.has_demo) {
                violations.push_back({patient_id, "demo.duplicate", "duplicate demo line"});
            }
            auto age = parse_double(kv.require("age"));
            if (!age) fail(line_no, "bad age");
            auto sex = parse_sex(kv.require("sex"));
            if (!sex) fail(line_no, "unknown sex code");
            auto race = parse_race(kv.require("race"));
            if (!race) fail(line_no, "unknown race code");
            b.record.demographics = {*age, *sex, *race};
            b.has_demo = true;
        } else if (kind == "lab_order") {
            LabEvent e;
            e.lab_id = std::string(kv.require("lab"));
            e.order_time = *ts;
            auto k = kv.require("kind");
            if (k == "continuous") e.value_kind = ValueKind::continuous;
            else if (k == "categorical") e.value_kind = ValueKind::categorical;
            else fail(line_no, "bad lab kind '" + std::string(k) + "'");
            b.record.lab_events.push_back(std::move(e));
        } else if (kind == "lab_result") {
            PendingResult r;
            r.lab_id = std::string(kv.require("lab"));
            r.result_time = *ts;
            r.raw_value = std::string(kv.require("value"));
            if (auto ref = kv.get("order")) {
                auto ot = TimePoint::parse(*ref);
                if (!ot) fail(line_no, "bad order timestamp reference");
                r.order_ref = *ot;
            }
            r.line_no = line_no;
            b.results.push_back(std::move(r));
        } else if (kind == "med_on" || kind == "med_off") {
            b.record.med_status_events.push_back(
                {std::string(kv.require("med")), *ts, kind == "med_on"});
        } else if (kind == "proc") {
            b.record.procedure_events.push_back({std::string(kv.require("proc")), *ts});
        } else if (kind == "dev_on") {
            std::string dev(kv.require("dev"));
            for (size_t idx : b.open_device) {
                if (b.record.device_intervals[idx].device_id == dev)
                    violations.push_back({patient_id, "dev.reopen",
                                          "device " + dev + " switched on while already on"});
            }
            b.open_device.push_back(b.record.device_intervals.size());
            b.record.device_intervals.push_back({dev, *ts, std::nullopt});
        } else if (kind == "dev_off") {
            std::string dev(kv.require("dev"));
            bool closed = false;
            for (auto it = b.open_device.rbegin(); it != b.open_device.rend(); ++it) {
                auto& interval = b.record.device_intervals[*it];
                if (interval.device_id == dev) {
                    interval.end = *ts;
                    b.open_device.erase(std::next(it).base());
                    closed = true;
                    break;
                }
            }
            if (!closed)
                violations.push_back({patient_id, "dev.close_unopened",
                                      "device " + dev + " switched off but was not on"});
        } else if (kind == "discharge") {
            if (b.has_discharge)
                violations.push_back({patient_id, "discharge.duplicate", "duplicate discharge"});
            b.record.discharge_time = *ts;
            b.has_discharge = true;
        } else {
            fail(line_no, "unknown event kind '" + std::string(kind) + "'");
        }
        kv.check_no_extras();
    }

    ParsedDataset out;
    for (auto& [id, b] : builders) {
        attach_results(b, violations);
        auto& r = b.record;
        std::stable_sort(r.med_status_events.begin(), r.med_status_events.end(),
                         [](const auto& x, const auto& y) { return x.time < y.time; });
        std::stable_sort(r.procedure_events.begin(), r.procedure_events.end(),
                         [](const auto& x, const auto& y) { return x.time < y.time; });
        std::stable_sort(r.device_intervals.begin(), r.device_intervals.end(),
                         [](const auto& x, const auto& y) { return x.start < y.start; });
        out.records.push_back(std::move(r));
    }
    auto dataset_violations = validate_dataset(out.records);
    violations.insert(violations.end(), dataset_violations.begin(), dataset_violations.end());
    out.violations = std::move(violations);
    return out;
}

std::vector<PatientRecord> parse_dataset(std::istream& in) {
    auto parsed = parse_dataset_lenient(in);
    if (!parsed.violations.empty()) {
        std::string msg = "dataset has " + std::to_string(parsed.violations.size()) +
                          " validation violation(s):";
        size_t shown = 0;
        for (const auto& v : parsed.violations) {
            if (shown++ == 20) {
                msg += "\n  ...";
                break;
            }
            msg += "\n  [" + v.patient_id + "] " + v.code + ": " + v.message;
        }
        throw ValidationError(msg);
    }
    return std::move(parsed.records);
}

std::vector<PatientRecord> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_dataset(in);
}

namespace {

struct Line {
    TimePoint time;
    int rank;
    std::string text;

    bool operator<(const Line& other) const {
        if (time != other.time) return time < other.time;
        if (rank != other.rank) return rank < other.rank;
        return text < other.text;
    }
};

std::string value_to_string(const LabValue& v) {
    if (const double* d = std::get_if<double>(&v)) return format_double(*d);
    return std::get<std::string>(v);
}

}  // namespace

void serialize_dataset(std::span<const PatientRecord> records, std::ostream& out) {
    out << kEventFileHeader << '\n';
    std::vector<const PatientRecord*> sorted;
    sorted.reserve(records.size());
    for (const auto& r : records) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto* a, const auto* b) { return a->patient_id < b->patient_id; });

    for (const PatientRecord* rp : sorted) {
        const PatientRecord& r = *rp;
        TimePoint demo_time = r.first_event_time().value_or(TimePoint(0));
        out << r.patient_id << "\tdemo\t" << demo_time.to_string()
            << "\tage=" << format_double(r.demographics.age_years)
            << "\tsex=" << to_code(r.demographics.sex)
            << "\trace=" << to_code(r.demographics.race) << '\n';

        std::vector<Line> lines;
        for (const auto& e : r.lab_events) {
            lines.push_back({e.order_time, 1,
                             "lab_order\t" + e.order_time.to_string() + "\tlab=" + e.lab_id +
                                 "\tkind=" +
                                 (e.value_kind == ValueKind::continuous ? "continuous"
                                                                        : "categorical")});
            if (e.result_time)
                lines.push_back({*e.result_time, 2,
                                 "lab_result\t" + e.result_time->to_string() + "\tlab=" +
                                     e.lab_id + "\tvalue=" + value_to_string(*e.value) +
                                     "\torder=" + e.order_time.to_string()});
        }
        for (const auto& e : r.med_status_events)
            lines.push_back({e.time, 3,
                             std::string(e.on ? "med_on" : "med_off") + "\t" +
                                 e.time.to_string() + "\tmed=" + e.med_id});
        for (const auto& e : r.procedure_events)
            lines.push_back({e.time, 4, "proc\t" + e.time.to_string() + "\tproc=" + e.proc_id});
        for (const auto& d : r.device_intervals) {
            lines.push_back({d.start, 5, "dev_on\t" + d.start.to_string() + "\tdev=" + d.device_id});
            if (d.end)
                lines.push_back({*d.end, 5, "dev_off\t" + d.end->to_string() + "\tdev=" + d.device_id});
        }
        if (r.discharge_time)
            lines.push_back({*r.discharge_time, 9, "discharge\t" + r.discharge_time->to_string()});

        std::sort(lines.begin(), lines.end());
        for (const auto& l : lines) out << r.patient_id << '\t' << l.text << '\n';
    }
}

void save_dataset(std::span<const PatientRecord> records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    serialize_dataset(records, out);
}

}
