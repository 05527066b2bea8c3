#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "orderlens/record.hpp"

namespace orderlens {

// Line-oriented event file, one event per line, tab-separated:
//   patient_id <TAB> kind <TAB> timestamp <TAB> key=value ...
// with a mandatory "#orderlens-events v1" header. See docs/FORMATS.md.
inline constexpr const char* kEventFileHeader = "#orderlens-events v1";

struct ParsedDataset {
    std::vector<PatientRecord> records;  // sorted by patient_id
    ValidationReport violations;
};

// Lenient parse: malformed lines still throw ParseError (with line numbers),
// but data-model violations are collected instead of thrown.
ParsedDataset parse_dataset_lenient(std::istream& in);

// Strict parse: throws ValidationError if any violation is found.
std::vector<PatientRecord> parse_dataset(std::istream& in);

std::vector<PatientRecord> load_dataset(const std::string& path);

void serialize_dataset(std::span<const PatientRecord> records, std::ostream& out);
void save_dataset(std::span<const PatientRecord> records, const std::string& path);

}
