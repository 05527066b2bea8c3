#pragma once

#include <array>
#include <cstddef>
#include <string>

namespace orderlens {

enum class ClinicalCategory { lab, med, demographic, procedure, device };

inline constexpr std::array<const char*, 5> kClinicalCategoryNames = {
    "LAB", "MED", "DEMOGRAPHIC", "PROCEDURE", "DEVICE"};

inline const char* to_name(ClinicalCategory c) {
    return kClinicalCategoryNames[static_cast<size_t>(c)];
}

struct SlotDef {
    const char* id;    // stable slot id, e.g. "F19"
    const char* name;  // human-readable description
};

// Frozen slot catalog, version 1. Analyses cite slot ids, so the ordering
// and meaning of entries here must never change within a catalog version.
inline constexpr const char* kCatalogVersion = "1";

// Continuous labs: A/B/F/D/H are the last, second-last, first, minimum and
// maximum results up to the anchor; t_X their result times. Durations in
// hours. Undefined inputs (too few results, zero denominator or time gap)
// make a slot missing.
inline constexpr std::array<SlotDef, 40> kContinuousLabSlots = {{
    {"F01", "last value"},
    {"F02", "second-last value"},
    {"F03", "first value"},
    {"F04", "nadir (minimum) value"},
    {"F05", "horizon (maximum) value"},
    {"F06", "last difference (B-A)"},
    {"F07", "last pct change (B-A)/B"},
    {"F08", "last slope (B-A)/(tB-tA)"},
    {"F09", "drop from baseline (F-A)"},
    {"F10", "pct drop from baseline (F-A)/F"},
    {"F11", "baseline slope (F-A)/(tF-tA)"},
    {"F12", "nadir difference (A-D)"},
    {"F13", "nadir pct difference (A-D)/D"},
    {"F14", "nadir slope (A-D)/(tA-tD)"},
    {"F15", "horizon difference (H-A)"},
    {"F16", "horizon pct difference (H-A)/H"},
    {"F17", "horizon slope (H-A)/(tH-tA)"},
    {"F18", "hours since last result"},
    {"F19", "hours since last order"},
    {"F20", "hours since first order"},
    {"F21", "hours since nadir"},
    {"F22", "hours since horizon"},
    {"F23", "order pending flag"},
    {"F24", "value known flag"},
    {"F25", "trend known flag"},
    {"F26", "increasing flag (A>B)"},
    {"F27", "decreasing flag (A<B)"},
    {"F28", "result count in last 24h"},
    {"F29", "24h average"},
    {"F30", "24h minimum"},
    {"F31", "24h maximum"},
    {"F32", "24h range"},
    {"F33", "24h difference (A - earliest in window)"},
    {"F34", "24h slope over window endpoints"},
    {"F35", "total result count"},
    {"F36", "total mean"},
    {"F37", "total std (population)"},
    {"F38", "total range (H-D)"},
    {"F39", "hours since first result"},
    {"F40", "results per day (count / max(age of series, 1h))"},
}};

inline constexpr std::array<SlotDef, 7> kCategoricalLabSlots = {{
    {"C01", "last value code"},
    {"C02", "second-last value code"},
    {"C03", "first value code"},
    {"C04", "hours since last order"},
    {"C05", "order pending flag"},
    {"C06", "value known flag"},
    {"C07", "trend known flag"},
}};

inline constexpr std::array<SlotDef, 4> kMedSlots = {{
    {"M01", "currently on flag"},
    {"M02", "hours since last on (0 if on)"},
    {"M03", "hours since first on"},
    {"M04", "hours since last status change"},
}};

inline constexpr std::array<SlotDef, 4> kProcSlots = {{
    {"P01", "hours since last occurrence"},
    {"P02", "hours since first occurrence"},
    {"P03", "done in last 24h flag"},
    {"P04", "ever done flag"},
}};

inline constexpr std::array<SlotDef, 1> kDeviceSlots = {{
    {"D01", "currently in use flag"},
}};

// Kept in lexicographic slot order so a variable's columns stay contiguous
// and in-slot-order under the matrix's feature-id column sort.
inline constexpr std::array<SlotDef, 3> kDemographicSlots = {{
    {"AGE", "age in years"},
    {"RACE", "race code"},
    {"SEX", "sex code"},
}};

}
