#pragma once

#include <cstdint>
#include <span>

namespace orderlens {

// Mann-Whitney AUC with midrank tie handling: the probability that a random
// positive's value exceeds a random negative's, ties counting 1/2.
// Missing values (NaN) rank below every real value and tie with each other.
// Throws std::invalid_argument when labels are single-class.
double auc_midrank(std::span<const double> values, std::span<const std::uint8_t> labels);

}
