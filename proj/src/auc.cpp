#include "orderlens/auc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace orderlens {

double auc_midrank(std::span<const double> values, std::span<const std::uint8_t> labels) {
    if (values.size() != labels.size())
        throw std::invalid_argument("auc: values and labels differ in length");
    const size_t n = values.size();

    size_t n_pos = 0;
    for (auto l : labels) n_pos += l ? 1 : 0;
    size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("auc: labels are single-class");

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto lower = [&](std::uint32_t a, std::uint32_t b) {
        bool ma = std::isnan(values[a]), mb = std::isnan(values[b]);
        if (ma != mb) return ma;  // missing sorts first
        if (ma) return false;     // missing ties with missing
        return values[a] < values[b];
    };
    std::sort(order.begin(), order.end(), lower);

    // Midranks over tie groups; the missing block is one tie group.
    double rank_sum_pos = 0.0;
    size_t i = 0;
    while (i < n) {
        size_t j = i + 1;
        while (j < n && !lower(order[i], order[j]) && !lower(order[j], order[i])) ++j;
        double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (size_t k = i; k < j; ++k)
            if (labels[order[k]]) rank_sum_pos += midrank;
        i = j;
    }

    double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

}
