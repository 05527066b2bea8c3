#pragma once

#include <iosfwd>
#include <string>

#include "orderlens/featurize.hpp"

namespace orderlens {

inline constexpr const char* kMatrixFileHeader = "#orderlens-matrix v1";

void write_matrix(const FeatureMatrix& matrix, std::ostream& out);
FeatureMatrix read_matrix(std::istream& in);

// Writes <path> (TSV) and <path>.meta.json (descriptors, vocabulary,
// categorical code maps, catalog version).
void save_matrix(const FeatureMatrix& matrix, const Vocabulary& vocabulary,
                 const CategoricalCodes& codes, const std::string& path);

struct LoadedMatrix {
    FeatureMatrix matrix;
    Vocabulary vocabulary;
    CategoricalCodes codes;
};

LoadedMatrix load_matrix(const std::string& path);

}
