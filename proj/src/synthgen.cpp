#include "orderlens/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "orderlens/errors.hpp"
#include "orderlens/rng.hpp"

namespace orderlens {

using json = nlohmann::json;

namespace {

std::string var_id(const char* prefix, int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%s%02d", prefix, index + 1);
    return buf;
}

constexpr double kValueFloor = 0.1;  // keeps percentage features defined

TimePoint at_hours(TimePoint base, double hours) {
    return base.plus_minutes(static_cast<std::int64_t>(std::llround(hours * 60.0)));
}

}  // namespace

SynthConfig default_synth_config() {
    SynthConfig c;
    c.rules = {
        RoutineLabRule{var_id("CL", 0), 36.0},
        RoutineLabRule{var_id("CL", 1), 48.0},
        RoutineLabRule{var_id("CL", 2), 48.0},
        RoutineLabRule{var_id("CL", 3), 60.0},
        RoutineLabRule{var_id("CL", 4), 72.0},
        ValueTriggerRule{var_id("CL", 5), 13.0, var_id("CL", 6), 2.0, 10.0},
        ValueTriggerRule{var_id("CL", 7), 13.0, var_id("CL", 8), 2.0, 10.0},
        ProcedureTriggerRule{var_id("PR", 0), var_id("MD", 0), 26.0, 46.0},
        ProcedureTriggerRule{var_id("PR", 1), var_id("MD", 1), 26.0, 46.0},
        ProcedureTriggerRule{var_id("PR", 2), var_id("MD", 2), 26.0, 46.0},
        ProcedureTriggerRule{var_id("PR", 3), var_id("MD", 3), 26.0, 46.0},
        ProcedureTriggerRule{var_id("PR", 4), var_id("MD", 4), 26.0, 46.0},
        ProcedureTriggerRule{var_id("PR", 5), var_id("MD", 5), 26.0, 46.0},
        MedPairRule{var_id("MD", 6), var_id("MD", 7), 0.9},
    };
    return c;
}

void validate_config(const SynthConfig& c) {
    auto require = [](bool ok, const char* field, const std::string& why) {
        if (!ok) throw ConfigError(std::string("synth config: ") + field + ": " + why);
    };
    require(c.n_patients >= 1, "n_patients", "must be >= 1");
    require(c.stay_min_days >= 1, "stay_min_days", "must be >= 1");
    require(c.stay_max_days >= c.stay_min_days, "stay_max_days", "must be >= stay_min_days");
    require(c.stay_continue_prob >= 0.0 && c.stay_continue_prob <= 1.0, "stay_continue_prob",
            "must be a probability");
    require(c.noise >= 0.0 && c.noise <= 1.0, "noise", "must be a probability");
    require(c.n_cont_labs >= 0 && c.n_cat_labs >= 0 && c.n_meds >= 0 && c.n_procs >= 0 &&
                c.n_devices >= 0,
            "vocabulary", "sizes must be non-negative");
    require(c.routine_jitter_hours >= 0.0, "routine_jitter_hours", "must be >= 0");
    require(c.admission_spread_days >= 1, "admission_spread_days", "must be >= 1");

    std::set<std::string> cont_labs, meds, procs;
    for (int i = 0; i < c.n_cont_labs; ++i) cont_labs.insert(var_id("CL", i));
    for (int i = 0; i < c.n_meds; ++i) meds.insert(var_id("MD", i));
    for (int i = 0; i < c.n_procs; ++i) procs.insert(var_id("PR", i));

    for (const auto& rule : c.rules) {
        if (const auto* r = std::get_if<RoutineLabRule>(&rule)) {
            require(cont_labs.count(r->lab_id) > 0, "rules.routine_lab.lab_id",
                    "'" + r->lab_id + "' not in the continuous lab vocabulary");
            require(r->period_hours > 0.0, "rules.routine_lab.period_hours", "must be > 0");
        } else if (const auto* r = std::get_if<ValueTriggerRule>(&rule)) {
            require(cont_labs.count(r->source_lab) > 0, "rules.value_trigger.source_lab",
                    "'" + r->source_lab + "' not in the continuous lab vocabulary");
            require(cont_labs.count(r->target_lab) > 0, "rules.value_trigger.target_lab",
                    "'" + r->target_lab + "' not in the continuous lab vocabulary");
            require(r->source_lab != r->target_lab, "rules.value_trigger.target_lab",
                    "source and target must differ");
            require(r->delay_min_hours >= 0.0 && r->delay_max_hours >= r->delay_min_hours &&
                        r->delay_max_hours <= 24.0,
                    "rules.value_trigger.delay", "must satisfy 0 <= min <= max <= 24");
        } else if (const auto* r = std::get_if<ProcedureTriggerRule>(&rule)) {
            require(procs.count(r->proc_id) > 0, "rules.procedure_trigger.proc_id",
                    "'" + r->proc_id + "' not in the procedure vocabulary");
            require(meds.count(r->target_med) > 0, "rules.procedure_trigger.target_med",
                    "'" + r->target_med + "' not in the medication vocabulary");
            require(r->delay_min_hours >= 0.0 && r->delay_max_hours >= r->delay_min_hours,
                    "rules.procedure_trigger.delay", "must satisfy 0 <= min <= max");
        } else if (const auto* r = std::get_if<MedPairRule>(&rule)) {
            require(meds.count(r->med_a) > 0, "rules.med_pair.med_a",
                    "'" + r->med_a + "' not in the medication vocabulary");
            require(meds.count(r->med_b) > 0, "rules.med_pair.med_b",
                    "'" + r->med_b + "' not in the medication vocabulary");
            require(r->med_a != r->med_b, "rules.med_pair.med_b", "meds must differ");
            require(r->co_prob >= 0.0 && r->co_prob <= 1.0, "rules.med_pair.co_prob",
                    "must be a probability");
        }
    }
}

namespace {

struct PatientPlan {
    TimePoint admission;
    TimePoint discharge;
    int stay_days = 0;
};

// Mean-reverting positive random walk.
class ValueWalk {
public:
    ValueWalk(Rng& rng, double mu) : mu_(mu) {
        v_ = std::max(kValueFloor, mu_ * (1.0 + rng.uniform(-0.15, 0.15)));
    }
    double next(Rng& rng) {
        v_ += 0.35 * (mu_ - v_) + rng.normal(0.0, 0.08 * mu_);
        v_ = std::max(kValueFloor, v_);
        return v_;
    }

private:
    double mu_;
    double v_;
};

struct PatientGen {
    const SynthConfig& cfg;
    Rng rng;
    PatientRecord record;
    PatientPlan plan;

    bool rule_fires() { return !rng.bernoulli(cfg.noise); }

    void add_lab(const std::string& lab, TimePoint order, std::optional<TimePoint> result,
                 std::optional<LabValue> value, ValueKind kind) {
        record.lab_events.push_back({lab, order, result, std::move(value), kind});
    }

    void add_continuous_result(const std::string& lab, TimePoint order, double delay_hours,
                               double value) {
        TimePoint result = at_hours(order, delay_hours);
        if (result <= plan.discharge)
            add_lab(lab, order, result, LabValue(value), ValueKind::continuous);
        else
            add_lab(lab, order, std::nullopt, std::nullopt, ValueKind::continuous);
    }

    void med_episode(const std::string& med, TimePoint on, double duration_hours) {
        record.med_status_events.push_back({med, on, true});
        TimePoint off = at_hours(on, duration_hours);
        if (off < plan.discharge) record.med_status_events.push_back({med, off, false});
    }
};

void gen_routine_lab(PatientGen& g, const RoutineLabRule& rule) {
    double jitter = g.cfg.noise > 0.0 ? g.cfg.routine_jitter_hours : 0.0;
    double scheduled = g.rng.uniform(1.0, rule.period_hours);
    ValueWalk walk(g.rng, g.rng.uniform(4.0, 12.0));
    double stay_hours = hours_between(g.plan.admission, g.plan.discharge);
    while (scheduled <= stay_hours) {
        double jittered = scheduled + (jitter > 0.0 ? g.rng.uniform(-jitter, jitter) : 0.0);
        double delay = g.rng.uniform(0.5, 3.0);
        double value = walk.next(g.rng);
        if (jittered > 0.0 && jittered <= stay_hours && g.rule_fires()) {
            TimePoint order = at_hours(g.plan.admission, jittered);
            g.add_continuous_result(rule.lab_id, order, delay, value);
        }
        scheduled += rule.period_hours;
    }
}

void gen_value_trigger(PatientGen& g, const ValueTriggerRule& rule) {
    // The source lab is sampled every morning before the 08:00 anchor; each
    // above-threshold result prompts a target order later the same day.
    ValueWalk target_walk(g.rng, g.rng.uniform(4.0, 12.0));
    bool high = false;
    const double mu = 10.0;

    std::int64_t first_day = g.plan.admission.minutes() / 1440;
    std::int64_t last_day = g.plan.discharge.minutes() / 1440;
    for (std::int64_t day = first_day; day <= last_day; ++day) {
        TimePoint order = TimePoint(day * 1440)
                              .plus_minutes(300 + static_cast<std::int64_t>(g.rng.next_below(90)));
        double result_delay = g.rng.uniform(0.4, 1.2);
        high = high ? g.rng.bernoulli(0.5) : g.rng.bernoulli(0.22);
        double value = high ? mu * (1.0 + g.rng.uniform(0.45, 0.9))
                            : mu * (1.0 + g.rng.uniform(-0.15, 0.15));
        double trigger_delay = g.rng.uniform(rule.delay_min_hours, rule.delay_max_hours);
        double target_result_delay = g.rng.uniform(0.5, 2.0);
        double target_value = target_walk.next(g.rng);
        bool fires = g.rule_fires();

        if (order < g.plan.admission || order > g.plan.discharge) continue;
        TimePoint result = at_hours(order, result_delay);
        if (result > g.plan.discharge) {
            g.add_lab(rule.source_lab, order, std::nullopt, std::nullopt, ValueKind::continuous);
            continue;
        }
        g.add_lab(rule.source_lab, order, result, LabValue(value), ValueKind::continuous);
        if (value >= rule.threshold && fires) {
            TimePoint target_order = at_hours(result, trigger_delay);
            if (target_order <= g.plan.discharge)
                g.add_continuous_result(rule.target_lab, target_order, target_result_delay,
                                        target_value);
        }
    }
}

void gen_background_cont_lab(PatientGen& g, const std::string& lab) {
    ValueWalk walk(g.rng, g.rng.uniform(4.0, 12.0));
    std::int64_t first_day = g.plan.admission.minutes() / 1440;
    std::int64_t last_day = g.plan.discharge.minutes() / 1440;
    for (std::int64_t day = first_day; day <= last_day; ++day) {
        bool emit = g.rng.bernoulli(0.5);
        TimePoint order =
            TimePoint(day * 1440).plus_minutes(static_cast<std::int64_t>(g.rng.next_below(1440)));
        double delay = g.rng.uniform(0.5, 3.0);
        double value = walk.next(g.rng);
        if (!emit || order < g.plan.admission || order > g.plan.discharge) continue;
        g.add_continuous_result(lab, order, delay, value);
    }
}

void gen_categorical_lab(PatientGen& g, const std::string& lab) {
    std::int64_t first_day = g.plan.admission.minutes() / 1440;
    std::int64_t last_day = g.plan.discharge.minutes() / 1440;
    for (std::int64_t day = first_day; day <= last_day; ++day) {
        bool emit = g.rng.bernoulli(0.45);
        TimePoint order =
            TimePoint(day * 1440).plus_minutes(static_cast<std::int64_t>(g.rng.next_below(1440)));
        double delay = g.rng.uniform(0.5, 2.0);
        double u = g.rng.next_double();
        const char* token = u < 0.7 ? "NEG" : (u < 0.9 ? "POS" : "IND");
        if (!emit || order < g.plan.admission || order > g.plan.discharge) continue;
        TimePoint result = at_hours(order, delay);
        if (result <= g.plan.discharge)
            g.add_lab(lab, order, result, LabValue(std::string(token)), ValueKind::categorical);
        else
            g.add_lab(lab, order, std::nullopt, std::nullopt, ValueKind::categorical);
    }
}

void gen_procedure_trigger(PatientGen& g, const ProcedureTriggerRule& rule) {
    // Planted procedures go to longer stays so the delayed medication lands
    // before discharge often enough.
    bool has_proc = g.plan.stay_days >= 4 && g.rng.bernoulli(0.35);
    TimePoint proc_time = at_hours(g.plan.admission, g.rng.uniform(2.0, 20.0));
    double delay = g.rng.uniform(rule.delay_min_hours, rule.delay_max_hours);
    double duration = g.rng.uniform(24.0, 72.0);
    bool fires = g.rule_fires();
    if (!has_proc) return;
    g.record.procedure_events.push_back({rule.proc_id, proc_time});
    if (!fires) return;
    TimePoint on = at_hours(proc_time, delay);
    if (on <= g.plan.discharge) g.med_episode(rule.target_med, on, duration);
}

void gen_med_pair(PatientGen& g, const MedPairRule& rule) {
    bool has_a = g.plan.stay_days >= 3 && g.rng.bernoulli(0.5);
    double on_hours = g.rng.uniform(12.0, std::max(13.0, g.plan.stay_days * 24.0 * 0.6));
    double duration_a = g.rng.uniform(24.0, 96.0);
    bool pair_fires = g.rng.bernoulli(rule.co_prob) && g.rule_fires();
    double pair_delay = g.rng.uniform(2.0, 22.0);
    double duration_b = g.rng.uniform(24.0, 96.0);
    if (!has_a) return;
    TimePoint on_a = at_hours(g.plan.admission, on_hours);
    if (on_a >= g.plan.discharge) return;
    g.med_episode(rule.med_a, on_a, duration_a);
    if (!pair_fires) return;
    TimePoint on_b = at_hours(on_a, pair_delay);
    if (on_b < g.plan.discharge) g.med_episode(rule.med_b, on_b, duration_b);
}

void gen_background_med(PatientGen& g, const std::string& med) {
    bool has = g.plan.stay_days >= 2 && g.rng.bernoulli(0.4);
    double stay_hours = hours_between(g.plan.admission, g.plan.discharge);
    double on_hours = g.rng.uniform(1.0, std::max(2.0, stay_hours - 6.0));
    double duration = g.rng.uniform(12.0, 72.0);
    if (!has) return;
    g.med_episode(med, at_hours(g.plan.admission, on_hours), duration);
}

void gen_background_proc(PatientGen& g, const std::string& proc) {
    bool has = g.rng.bernoulli(0.2);
    double stay_hours = hours_between(g.plan.admission, g.plan.discharge);
    double at = g.rng.uniform(0.5, std::max(1.0, stay_hours - 1.0));
    if (has) g.record.procedure_events.push_back({proc, at_hours(g.plan.admission, at)});
}

void gen_device(PatientGen& g, const std::string& dev, double prob) {
    bool has = g.rng.bernoulli(prob);
    double start_hours = g.rng.uniform(0.0, 24.0);
    double duration = g.rng.uniform(24.0, 96.0);
    if (!has) return;
    TimePoint start = at_hours(g.plan.admission, start_hours);
    if (start >= g.plan.discharge) return;
    TimePoint end = at_hours(start, duration);
    if (end.plus_hours(1) >= g.plan.discharge)
        g.record.device_intervals.push_back({dev, start, std::nullopt});  // ongoing at discharge
    else
        g.record.device_intervals.push_back({dev, start, end});
}

}  // namespace

std::vector<PatientRecord> generate(const SynthConfig& cfg) {
    validate_config(cfg);
    Rng master(cfg.seed);

    int id_width = std::max(4, static_cast<int>(std::to_string(cfg.n_patients).size()));
    std::vector<PatientRecord> records;
    records.reserve(cfg.n_patients);

    std::set<std::string> ruled_labs, ruled_meds, ruled_procs, trigger_sources;
    for (const auto& rule : cfg.rules) {
        if (const auto* r = std::get_if<RoutineLabRule>(&rule)) {
            ruled_labs.insert(r->lab_id);
        } else if (const auto* r = std::get_if<ValueTriggerRule>(&rule)) {
            ruled_labs.insert(r->source_lab);
            ruled_labs.insert(r->target_lab);
            trigger_sources.insert(r->source_lab);
        } else if (const auto* r = std::get_if<ProcedureTriggerRule>(&rule)) {
            ruled_meds.insert(r->target_med);
            ruled_procs.insert(r->proc_id);
        } else if (const auto* r = std::get_if<MedPairRule>(&rule)) {
            ruled_meds.insert(r->med_a);
            ruled_meds.insert(r->med_b);
        }
    }

    for (int p = 0; p < cfg.n_patients; ++p) {
        PatientGen g{cfg, master.fork(static_cast<std::uint64_t>(p) + 1), {}, {}};
        char buf[32];
        std::snprintf(buf, sizeof(buf), "P%0*d", std::min(id_width, 12), p + 1);
        g.record.patient_id = buf;

        g.plan.admission = cfg.admission_base.plus_minutes(static_cast<std::int64_t>(
            g.rng.next_below(static_cast<std::uint64_t>(cfg.admission_spread_days) * 1440)));
        int stay = cfg.stay_min_days;
        while (stay < cfg.stay_max_days && g.rng.bernoulli(cfg.stay_continue_prob)) ++stay;
        g.plan.stay_days = stay;
        g.plan.discharge = at_hours(g.plan.admission, stay * 24.0 + g.rng.uniform(0.0, 10.0));

        g.record.demographics.age_years = std::floor(g.rng.uniform(35.0, 92.0) * 10.0) / 10.0;
        g.record.demographics.sex = g.rng.bernoulli(0.5) ? Sex::female : Sex::male;
        double ur = g.rng.next_double();
        g.record.demographics.race = ur < 0.60   ? Race::white
                                     : ur < 0.75 ? Race::black
                                     : ur < 0.83 ? Race::asian
                                     : ur < 0.93 ? Race::hispanic
                                     : ur < 0.98 ? Race::other
                                                 : Race::unknown;

        // Admission panel: one early result per continuous lab pins the
        // admission time and gives every lab a baseline. Trigger-source
        // labs are exempt: their only results are the scheduled morning
        // samples, which keeps their 24h-window slots exact duplicates of
        // the last value.
        for (int i = 0; i < cfg.n_cont_labs; ++i) {
            std::string lab = var_id("CL", i);
            TimePoint order = at_hours(g.plan.admission, g.rng.uniform(0.25, 2.0));
            double delay = g.rng.uniform(0.4, 1.5);
            double value = std::max(kValueFloor, g.rng.uniform(4.0, 12.0) *
                                                     (1.0 + g.rng.normal(0.0, 0.08)));
            if (trigger_sources.count(lab)) continue;
            g.add_continuous_result(lab, order, delay, value);
        }

        for (const auto& rule : cfg.rules) {
            if (const auto* r = std::get_if<RoutineLabRule>(&rule)) gen_routine_lab(g, *r);
            else if (const auto* r = std::get_if<ValueTriggerRule>(&rule)) gen_value_trigger(g, *r);
            else if (const auto* r = std::get_if<ProcedureTriggerRule>(&rule))
                gen_procedure_trigger(g, *r);
            else if (const auto* r = std::get_if<MedPairRule>(&rule)) gen_med_pair(g, *r);
        }
        for (int i = 0; i < cfg.n_cont_labs; ++i) {
            std::string lab = var_id("CL", i);
            if (!ruled_labs.count(lab)) gen_background_cont_lab(g, lab);
        }
        for (int i = 0; i < cfg.n_cat_labs; ++i) gen_categorical_lab(g, var_id("KL", i));
        for (int i = 0; i < cfg.n_meds; ++i) {
            std::string med = var_id("MD", i);
            if (!ruled_meds.count(med)) gen_background_med(g, med);
        }
        for (int i = 0; i < cfg.n_procs; ++i) {
            std::string proc = var_id("PR", i);
            if (!ruled_procs.count(proc)) gen_background_proc(g, proc);
        }
        for (int i = 0; i < cfg.n_devices; ++i)
            gen_device(g, var_id("DV", i), i == 0 ? 0.3 : 0.15);

        auto& r = g.record;
        std::stable_sort(r.lab_events.begin(), r.lab_events.end(),
                         [](const auto& a, const auto& b) { return a.order_time < b.order_time; });
        std::stable_sort(r.med_status_events.begin(), r.med_status_events.end(),
                         [](const auto& a, const auto& b) { return a.time < b.time; });
        std::stable_sort(r.procedure_events.begin(), r.procedure_events.end(),
                         [](const auto& a, const auto& b) { return a.time < b.time; });
        std::stable_sort(r.device_intervals.begin(), r.device_intervals.end(),
                         [](const auto& a, const auto& b) { return a.start < b.start; });
        r.discharge_time = g.plan.discharge;
        records.push_back(std::move(r));
    }
    return records;
}

std::map<DecisionId, ExpectedBest> ground_truth(const SynthConfig& cfg) {
    std::map<DecisionId, ExpectedBest> truth;
    for (const auto& rule : cfg.rules) {
        if (const auto* r = std::get_if<RoutineLabRule>(&rule)) {
            truth[{DecisionId::Kind::lab_order, r->lab_id}] =
                {ClinicalCategory::lab, "F19", {}, r->lab_id, "routine_lab"};
        } else if (const auto* r = std::get_if<ValueTriggerRule>(&rule)) {
            truth[{DecisionId::Kind::lab_order, r->target_lab}] =
                {ClinicalCategory::lab, "F01", {}, r->source_lab, "value_trigger"};
        } else if (const auto* r = std::get_if<ProcedureTriggerRule>(&rule)) {
            truth[{DecisionId::Kind::med_order, r->target_med}] =
                {ClinicalCategory::procedure, "P01", {"P02", "P04"}, r->proc_id,
                 "procedure_trigger"};
        } else if (const auto* r = std::get_if<MedPairRule>(&rule)) {
            truth[{DecisionId::Kind::med_order, r->med_b}] =
                {ClinicalCategory::med, "M01", {"M02", "M03", "M04"}, r->med_a, "med_pair"};
        }
    }
    return truth;
}

namespace {

json rule_to_json(const Rule& rule) {
    if (const auto* r = std::get_if<RoutineLabRule>(&rule))
        return json{{"kind", "routine_lab"}, {"lab_id", r->lab_id},
                    {"period_hours", r->period_hours}};
    if (const auto* r = std::get_if<ValueTriggerRule>(&rule))
        return json{{"kind", "value_trigger"},   {"source_lab", r->source_lab},
                    {"threshold", r->threshold}, {"target_lab", r->target_lab},
                    {"delay_min_hours", r->delay_min_hours},
                    {"delay_max_hours", r->delay_max_hours}};
    if (const auto* r = std::get_if<ProcedureTriggerRule>(&rule))
        return json{{"kind", "procedure_trigger"},
                    {"proc_id", r->proc_id},
                    {"target_med", r->target_med},
                    {"delay_min_hours", r->delay_min_hours},
                    {"delay_max_hours", r->delay_max_hours}};
    const auto& r = std::get<MedPairRule>(rule);
    return json{{"kind", "med_pair"}, {"med_a", r.med_a}, {"med_b", r.med_b},
                {"co_prob", r.co_prob}};
}

Rule rule_from_json(const json& j) {
    auto kind = j.at("kind").get<std::string>();
    if (kind == "routine_lab")
        return RoutineLabRule{j.at("lab_id").get<std::string>(),
                              j.at("period_hours").get<double>()};
    if (kind == "value_trigger")
        return ValueTriggerRule{j.at("source_lab").get<std::string>(),
                                j.at("threshold").get<double>(),
                                j.at("target_lab").get<std::string>(),
                                j.at("delay_min_hours").get<double>(),
                                j.at("delay_max_hours").get<double>()};
    if (kind == "procedure_trigger")
        return ProcedureTriggerRule{j.at("proc_id").get<std::string>(),
                                    j.at("target_med").get<std::string>(),
                                    j.at("delay_min_hours").get<double>(),
                                    j.at("delay_max_hours").get<double>()};
    if (kind == "med_pair")
        return MedPairRule{j.at("med_a").get<std::string>(), j.at("med_b").get<std::string>(),
                           j.at("co_prob").get<double>()};
    throw ConfigError("synth config: rules.kind: unknown rule kind '" + kind + "'");
}

}  // namespace

std::string config_to_json(const SynthConfig& c) {
    json j;
    j["n_patients"] = c.n_patients;
    j["seed"] = c.seed;
    j["stay"] = {{"min_days", c.stay_min_days},
                 {"max_days", c.stay_max_days},
                 {"continue_prob", c.stay_continue_prob}};
    j["vocabulary"] = {{"continuous_labs", c.n_cont_labs},
                       {"categorical_labs", c.n_cat_labs},
                       {"meds", c.n_meds},
                       {"procedures", c.n_procs},
                       {"devices", c.n_devices}};
    json rules = json::array();
    for (const auto& rule : c.rules) rules.push_back(rule_to_json(rule));
    j["rules"] = rules;
    j["noise"] = c.noise;
    j["routine_jitter_hours"] = c.routine_jitter_hours;
    j["admission"] = {{"base", c.admission_base.to_string()},
                      {"spread_days", c.admission_spread_days}};
    return j.dump(2) + "\n";
}

SynthConfig config_from_json(const std::string& text) {
    json j = json::parse(text);
    SynthConfig c;
    c.n_patients = j.value("n_patients", c.n_patients);
    c.seed = j.value("seed", c.seed);
    if (j.contains("stay")) {
        c.stay_min_days = j["stay"].value("min_days", c.stay_min_days);
        c.stay_max_days = j["stay"].value("max_days", c.stay_max_days);
        c.stay_continue_prob = j["stay"].value("continue_prob", c.stay_continue_prob);
    }
    if (j.contains("vocabulary")) {
        const auto& v = j["vocabulary"];
        c.n_cont_labs = v.value("continuous_labs", c.n_cont_labs);
        c.n_cat_labs = v.value("categorical_labs", c.n_cat_labs);
        c.n_meds = v.value("meds", c.n_meds);
        c.n_procs = v.value("procedures", c.n_procs);
        c.n_devices = v.value("devices", c.n_devices);
    }
    if (j.contains("rules")) {
        c.rules.clear();
        for (const auto& rj : j["rules"]) c.rules.push_back(rule_from_json(rj));
    } else {
        c.rules = default_synth_config().rules;
    }
    c.noise = j.value("noise", c.noise);
    c.routine_jitter_hours = j.value("routine_jitter_hours", c.routine_jitter_hours);
    if (j.contains("admission")) {
        auto base = TimePoint::parse(j["admission"].value("base", std::string("2024-01-01T00:00")));
        if (!base) throw ConfigError("synth config: admission.base: bad timestamp");
        c.admission_base = *base;
        c.admission_spread_days = j["admission"].value("spread_days", c.admission_spread_days);
    }
    validate_config(c);
    return c;
}

std::string ground_truth_to_json(const std::map<DecisionId, ExpectedBest>& truth) {
    json decisions = json::object();
    for (const auto& [decision, expected] : truth) {
        decisions[decision.to_string()] = {
            {"clinical_category", to_name(expected.clinical_category)},
            {"temporal_category", expected.temporal_category},
            {"temporal_alternates", expected.temporal_alternates},
            {"source_variable", expected.source_variable},
            {"rule", expected.rule_kind}};
    }
    return json{{"decisions", decisions}}.dump(2) + "\n";
}

std::map<DecisionId, ExpectedBest> ground_truth_from_json(const std::string& text) {
    json j = json::parse(text);
    std::map<DecisionId, ExpectedBest> truth;
    for (const auto& [key, value] : j.at("decisions").items()) {
        auto decision = DecisionId::parse(key);
        if (!decision) throw ParseError("bad decision id '" + key + "' in ground truth");
        ExpectedBest expected;
        auto cat = value.at("clinical_category").get<std::string>();
        bool found = false;
        for (size_t i = 0; i < kClinicalCategoryNames.size(); ++i) {
            if (cat == kClinicalCategoryNames[i]) {
                expected.clinical_category = static_cast<ClinicalCategory>(i);
                found = true;
            }
        }
        if (!found) throw ParseError("bad clinical category '" + cat + "' in ground truth");
        expected.temporal_category = value.at("temporal_category").get<std::string>();
        expected.temporal_alternates =
            value.at("temporal_alternates").get<std::vector<std::string>>();
        expected.source_variable = value.at("source_variable").get<std::string>();
        expected.rule_kind = value.at("rule").get<std::string>();
        truth[*decision] = std::move(expected);
    }
    return truth;
}

}
