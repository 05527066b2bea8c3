#include "orderlens/featurize.hpp"

#include <algorithm>
#include <unordered_map>

#include "orderlens/errors.hpp"
#include "orderlens/parallel.hpp"

namespace orderlens {

namespace {

double safe_div(double num, double den) {
    if (den == 0.0) return kMissing;
    return num / den;
}

}  // namespace

ContinuousLabSnapshot ContinuousLabSnapshot::build(std::span<const LabEvent> events,
                                                   TimePoint anchor) {
    ContinuousLabSnapshot s;
    std::vector<std::pair<TimePoint, double>> results;
    for (const auto& e : events) {
        if (e.order_time <= anchor) {
            if (!s.has_order) {
                s.first_order_time = s.last_order_time = e.order_time;
                s.has_order = true;
            } else {
                s.first_order_time = std::min(s.first_order_time, e.order_time);
                s.last_order_time = std::max(s.last_order_time, e.order_time);
            }
            if (!e.result_time || *e.result_time > anchor) s.pending = true;
        }
        if (e.result_time && *e.result_time <= anchor && e.value)
            results.emplace_back(*e.result_time, std::get<double>(*e.value));
    }
    std::stable_sort(results.begin(), results.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    s.result_count = results.size();
    if (results.empty()) return s;

    s.last = results.back().second;
    s.t_last = results.back().first;
    s.first = results.front().second;
    s.t_first = results.front().first;
    if (results.size() >= 2) {
        s.second_last = results[results.size() - 2].second;
        s.t_second_last = results[results.size() - 2].first;
    }

    // Ties for nadir/horizon resolve to the most recent occurrence.
    s.nadir = s.horizon = results.front().second;
    s.t_nadir = s.t_horizon = results.front().first;
    double sum = 0.0;
    for (const auto& [t, v] : results) {
        if (v <= s.nadir) {
            s.nadir = v;
            s.t_nadir = t;
        }
        if (v >= s.horizon) {
            s.horizon = v;
            s.t_horizon = t;
        }
        sum += v;
        if (hours_between(t, anchor) <= 24.0) s.results_24h.emplace_back(t, v);
    }
    s.mean = sum / static_cast<double>(results.size());
    double ss = 0.0;
    for (const auto& [t, v] : results) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(results.size()));
    return s;
}

std::array<double, 40> featurize_continuous_lab(const ContinuousLabSnapshot& s,
                                                TimePoint anchor) {
    std::array<double, 40> f;
    f.fill(kMissing);

    const bool v1 = s.result_count >= 1;
    const bool v2 = s.result_count >= 2;
    const double A = s.last, B = s.second_last, F = s.first, D = s.nadir, H = s.horizon;

    if (v1) {
        f[0] = A;
        f[2] = F;
        f[3] = D;
        f[4] = H;
        f[8] = F - A;
        if (F != 0.0) f[9] = (F - A) / F;
        f[10] = safe_div(F - A, hours_between(s.t_last, s.t_first));
        f[11] = A - D;
        if (D != 0.0) f[12] = (A - D) / D;
        f[13] = safe_div(A - D, hours_between(s.t_nadir, s.t_last));
        f[14] = H - A;
        if (H != 0.0) f[15] = (H - A) / H;
        f[16] = safe_div(H - A, hours_between(s.t_last, s.t_horizon));
        f[17] = hours_between(s.t_last, anchor);   // F18
        f[20] = hours_between(s.t_nadir, anchor);  // F21
        f[21] = hours_between(s.t_horizon, anchor);
        f[37] = H - D;                             // F38
        f[38] = hours_between(s.t_first, anchor);  // F39
        f[39] = static_cast<double>(s.result_count) / std::max(f[38], 1.0) * 24.0;
    }
    if (v2) {
        f[1] = B;
        f[5] = B - A;
        if (B != 0.0) f[6] = (B - A) / B;
        f[7] = safe_div(B - A, hours_between(s.t_last, s.t_second_last));
        f[25] = A > B ? 1.0 : 0.0;
        f[26] = A < B ? 1.0 : 0.0;
    }
    if (s.has_order) {
        f[18] = hours_between(s.last_order_time, anchor);   // F19
        f[19] = hours_between(s.first_order_time, anchor);  // F20
    }
    f[22] = s.pending ? 1.0 : 0.0;  // F23
    f[23] = v1 ? 1.0 : 0.0;
    f[24] = v2 ? 1.0 : 0.0;

    f[27] = static_cast<double>(s.results_24h.size());  // F28
    if (!s.results_24h.empty()) {
        double sum = 0.0, lo = s.results_24h.front().second, hi = lo;
        for (const auto& [t, v] : s.results_24h) {
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        f[28] = sum / static_cast<double>(s.results_24h.size());
        f[29] = lo;
        f[30] = hi;
        f[31] = hi - lo;
        const auto& earliest = s.results_24h.front();
        f[32] = A - earliest.second;
        f[33] = safe_div(A - earliest.second, hours_between(earliest.first, s.t_last));
    }
    if (v1) {
        f[34] = static_cast<double>(s.result_count);  // F35
        f[35] = s.mean;
        f[36] = s.stddev;
    } else {
        f[34] = 0.0;
    }
    return f;
}

std::array<double, 7> featurize_categorical_lab(std::span<const LabEvent> events,
                                                TimePoint anchor, const TokenCodeMap& codes) {
    std::array<double, 7> f;
    f.fill(kMissing);

    std::vector<std::pair<TimePoint, const std::string*>> results;
    bool has_order = false, pending = false;
    TimePoint last_order;
    for (const auto& e : events) {
        if (e.order_time <= anchor) {
            if (!has_order || e.order_time > last_order) last_order = e.order_time;
            has_order = true;
            if (!e.result_time || *e.result_time > anchor) pending = true;
        }
        if (e.result_time && *e.result_time <= anchor && e.value)
            results.emplace_back(*e.result_time, &std::get<std::string>(*e.value));
    }
    std::stable_sort(results.begin(), results.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    auto code_of = [&](const std::string& token) {
        int c = codes.code(token);
        if (c < 0) throw Error("categorical token '" + token + "' missing from code map");
        return static_cast<double>(c);
    };
    if (!results.empty()) {
        f[0] = code_of(*results.back().second);
        f[2] = code_of(*results.front().second);
    }
    if (results.size() >= 2) f[1] = code_of(*results[results.size() - 2].second);
    if (has_order) f[3] = hours_between(last_order, anchor);
    f[4] = pending ? 1.0 : 0.0;
    f[5] = results.empty() ? 0.0 : 1.0;
    f[6] = results.size() >= 2 ? 1.0 : 0.0;
    return f;
}

std::array<double, 4> featurize_medication(std::span<const MedStatusEvent> events,
                                           TimePoint anchor) {
    std::array<double, 4> f;
    f.fill(kMissing);

    bool on = false, ever_on = false, any = false;
    TimePoint first_on, last_event, last_off;
    bool has_off_after_on = false;
    for (const auto& e : events) {
        if (e.time > anchor) break;
        any = true;
        last_event = e.time;
        if (e.on) {
            if (!ever_on) first_on = e.time;
            ever_on = true;
        } else if (ever_on) {
            last_off = e.time;
            has_off_after_on = true;
        }
        on = e.on;
    }
    f[0] = on ? 1.0 : 0.0;
    if (on)
        f[1] = 0.0;
    else if (has_off_after_on)
        f[1] = hours_between(last_off, anchor);
    if (ever_on) f[2] = hours_between(first_on, anchor);
    if (any) f[3] = hours_between(last_event, anchor);
    return f;
}

std::array<double, 4> featurize_procedure(std::span<const ProcedureEvent> events,
                                          TimePoint anchor) {
    std::array<double, 4> f;
    f.fill(kMissing);

    bool any = false;
    TimePoint first, last;
    for (const auto& e : events) {
        if (e.time > anchor) break;
        if (!any) first = e.time;
        last = e.time;
        any = true;
    }
    if (any) {
        f[0] = hours_between(last, anchor);
        f[1] = hours_between(first, anchor);
        f[2] = f[0] <= 24.0 ? 1.0 : 0.0;
        f[3] = 1.0;
    } else {
        f[2] = 0.0;
        f[3] = 0.0;
    }
    return f;
}

double featurize_device(std::span<const DeviceInterval> intervals, TimePoint anchor) {
    for (const auto& d : intervals)
        if (d.start <= anchor && (!d.end || *d.end >= anchor)) return 1.0;
    return 0.0;
}

size_t FeatureMatrix::column_index(const std::string& feature_id) const {
    for (size_t c = 0; c < descriptors_.size(); ++c)
        if (descriptors_[c].feature_id == feature_id) return c;
    return static_cast<size_t>(-1);
}

bool FeatureMatrix::operator==(const FeatureMatrix& other) const {
    if (row_ids_ != other.row_ids_ || descriptors_ != other.descriptors_) return false;
    if (values_.size() != other.values_.size()) return false;
    for (size_t i = 0; i < values_.size(); ++i) {
        if (is_missing(values_[i]) != is_missing(other.values_[i])) return false;
        if (!is_missing(values_[i]) && values_[i] != other.values_[i]) return false;
    }
    return true;
}

CategoricalCodes build_categorical_codes(std::span<const PatientRecord> records,
                                         const std::set<std::string>& train_patients) {
    CategoricalCodes codes;
    // Chronological first appearance within each group, training group first.
    auto visit = [&](bool train_pass) {
        struct Seen {
            TimePoint time;
            const std::string* patient;
            const LabEvent* event;
        };
        std::vector<Seen> results;
        for (const auto& r : records) {
            bool is_train = train_patients.empty() || train_patients.count(r.patient_id) > 0;
            if (train_pass != is_train) continue;
            for (const auto& e : r.lab_events)
                if (e.value_kind == ValueKind::categorical && e.result_time && e.value)
                    results.push_back({*e.result_time, &r.patient_id, &e});
        }
        std::stable_sort(results.begin(), results.end(), [](const Seen& a, const Seen& b) {
            if (a.time != b.time) return a.time < b.time;
            return *a.patient < *b.patient;
        });
        for (const auto& seen : results) {
            auto& map = codes.by_lab[seen.event->lab_id];
            const auto& token = std::get<std::string>(*seen.event->value);
            if (map.code(token) < 0) map.tokens.push_back(token);
        }
    };
    visit(true);
    if (!train_patients.empty()) visit(false);
    return codes;
}

std::vector<FeatureDescriptor> catalog_descriptors(const Vocabulary& vocab) {
    std::vector<FeatureDescriptor> desc;
    auto add = [&](const std::string& variable, ClinicalCategory cat, const SlotDef& slot) {
        desc.push_back({variable + "." + slot.id, cat, slot.id, variable});
    };
    for (const auto& [lab, kind] : vocab.labs) {
        if (kind == ValueKind::continuous)
            for (const auto& slot : kContinuousLabSlots) add(lab, ClinicalCategory::lab, slot);
        else
            for (const auto& slot : kCategoricalLabSlots) add(lab, ClinicalCategory::lab, slot);
    }
    for (const auto& med : vocab.meds)
        for (const auto& slot : kMedSlots) add(med, ClinicalCategory::med, slot);
    for (const auto& proc : vocab.procedures)
        for (const auto& slot : kProcSlots) add(proc, ClinicalCategory::procedure, slot);
    for (const auto& dev : vocab.devices)
        for (const auto& slot : kDeviceSlots) add(dev, ClinicalCategory::device, slot);
    for (const auto& slot : kDemographicSlots)
        desc.push_back({std::string("DEMO.") + slot.id, ClinicalCategory::demographic, slot.id,
                        "DEMO"});
    std::sort(desc.begin(), desc.end(), [](const auto& a, const auto& b) {
        return a.feature_id < b.feature_id;
    });
    return desc;
}

FeatureMatrix build_matrix(std::span<const PatientRecord> records,
                           std::span<const PatientStateInstance> instances,
                           const Vocabulary& vocab, const CategoricalCodes& codes, int jobs) {
    std::unordered_map<std::string, const PatientRecord*> by_id;
    for (const auto& r : records) by_id[r.patient_id] = &r;

    // Check the instances only reference known variables.
    for (const auto& inst : instances) {
        if (!by_id.count(inst.patient_id))
            throw Error("instance references unknown patient '" + inst.patient_id + "'");
        for (const auto& lab : inst.labs_ordered)
            if (!vocab.labs.count(lab))
                throw Error("instance references unknown lab '" + lab + "'");
        for (const auto& med : inst.meds_given)
            if (!vocab.meds.count(med))
                throw Error("instance references unknown med '" + med + "'");
    }

    auto descriptors = catalog_descriptors(vocab);
    std::vector<std::string> row_ids;
    row_ids.reserve(instances.size());
    for (const auto& inst : instances) row_ids.push_back(inst.instance_id());
    FeatureMatrix matrix(std::move(row_ids), descriptors);

    // Per-variable event slices, grouped once per patient.
    struct Slices {
        std::map<std::string, std::vector<LabEvent>> labs;
        std::map<std::string, std::vector<MedStatusEvent>> meds;
        std::map<std::string, std::vector<ProcedureEvent>> procs;
        std::map<std::string, std::vector<DeviceInterval>> devs;
    };
    std::unordered_map<std::string, Slices> sliced;
    for (const auto& r : records) {
        auto& s = sliced[r.patient_id];
        for (const auto& e : r.lab_events) s.labs[e.lab_id].push_back(e);
        for (const auto& e : r.med_status_events) s.meds[e.med_id].push_back(e);
        for (const auto& e : r.procedure_events) s.procs[e.proc_id].push_back(e);
        for (const auto& e : r.device_intervals) s.devs[e.device_id].push_back(e);
    }

    // Column layout is sorted by feature id, so each variable's slots are
    // contiguous; find the start column per variable once.
    std::map<std::string, size_t> first_col;
    for (size_t c = 0; c < descriptors.size(); ++c)
        first_col.emplace(descriptors[c].source_variable, c);

    const std::vector<LabEvent> no_labs;
    const std::vector<MedStatusEvent> no_meds;
    const std::vector<ProcedureEvent> no_procs;
    const std::vector<DeviceInterval> no_devs;

    parallel_for(instances.size(), jobs, [&](size_t i) {
        const auto& inst = instances[i];
        const auto& patient = sliced.at(inst.patient_id);
        const auto& record = *by_id.at(inst.patient_id);
        TimePoint anchor = inst.anchor_time;
        auto row = matrix.row(i);

        auto write = [&](const std::string& variable, std::span<const double> values) {
            size_t c0 = first_col.at(variable);
            for (size_t k = 0; k < values.size(); ++k) row[c0 + k] = values[k];
        };

        for (const auto& [lab, kind] : vocab.labs) {
            auto it = patient.labs.find(lab);
            const auto& events = it == patient.labs.end() ? no_labs : it->second;
            if (kind == ValueKind::continuous) {
                auto snapshot = ContinuousLabSnapshot::build(events, anchor);
                write(lab, featurize_continuous_lab(snapshot, anchor));
            } else {
                static const TokenCodeMap empty_codes;
                auto cit = codes.by_lab.find(lab);
                const auto& map = cit == codes.by_lab.end() ? empty_codes : cit->second;
                write(lab, featurize_categorical_lab(events, anchor, map));
            }
        }
        for (const auto& med : vocab.meds) {
            auto it = patient.meds.find(med);
            write(med, featurize_medication(it == patient.meds.end() ? no_meds : it->second,
                                            anchor));
        }
        for (const auto& proc : vocab.procedures) {
            auto it = patient.procs.find(proc);
            write(proc, featurize_procedure(it == patient.procs.end() ? no_procs : it->second,
                                            anchor));
        }
        for (const auto& dev : vocab.devices) {
            auto it = patient.devs.find(dev);
            double v = featurize_device(it == patient.devs.end() ? no_devs : it->second, anchor);
            write(dev, std::span<const double>(&v, 1));
        }
        const auto& demo = record.demographics;
        double demo_values[3] = {demo.age_years, static_cast<double>(demo.race),
                                 static_cast<double>(demo.sex)};
        write("DEMO", demo_values);
    });
    return matrix;
}

}
