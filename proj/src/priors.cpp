#include "magenta/priors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "magenta/core_types.hpp"

namespace magenta {

ClassPriorTable build_priors(std::span<const long long> counts, LogBase log_base) {
    if (counts.empty()) throw ValidationError("prior table needs at least one class");
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] < 1) {
            throw ValidationError("class " + std::to_string(c) + " has count " + std::to_string(counts[c]) +
                                  "; clamp it to >= 1 or exclude the class before building priors");
        }
    }

    ClassPriorTable table;
    table.counts.assign(counts.begin(), counts.end());
    table.log_base = log_base;

    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    const double max_count = static_cast<double>(*hi);
    table.ir = max_count / static_cast<double>(*lo);
    const double log_ir = log_base == LogBase::natural ? std::log(table.ir) : std::log10(table.ir);
    table.gamma = log_ir / (1.0 + log_ir);

    const std::size_t num_classes = counts.size();
    table.pi.resize(num_classes);
    if (table.gamma == 0.0) {
        // Balanced: every raw weight is 1 exactly.
        std::fill(table.pi.begin(), table.pi.end(), 1.0);
    } else {
        double sum = 0.0;
        for (std::size_t c = 0; c < num_classes; ++c) {
            table.pi[c] = std::pow(max_count / static_cast<double>(counts[c]), table.gamma);
            sum += table.pi[c];
        }
        const double mean = sum / static_cast<double>(num_classes);
        for (double& p : table.pi) p /= mean;
    }

    table.w.resize(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) table.w[c] = 1.0 / (1.0 + table.pi[c]);
    return table;
}

double inactive_weight(const ClassPriorTable& table, std::size_t c) {
    if (c >= table.w.size()) {
        throw std::out_of_range("class index " + std::to_string(c) + " out of range for " +
                                std::to_string(table.w.size()) + " classes");
    }
    return table.w[c];
}

}  // namespace magenta
