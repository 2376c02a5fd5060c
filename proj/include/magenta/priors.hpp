#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace magenta {

enum class LogBase { natural, base10 };

// Rarity statistics frozen from the training split's active-frame counts.
struct ClassPriorTable {
    std::vector<long long> counts;
    double ir = 1.0;     // max(counts) / min(counts)
    double gamma = 0.0;  // log(ir) / (1 + log(ir))
    LogBase log_base = LogBase::natural;
    std::vector<double> pi;  // mean 1, larger for rarer classes
    std::vector<double> w;   // 1 / (1 + pi)

    std::size_t num_classes() const noexcept { return counts.size(); }
};

// Throws ValidationError for an empty list or any count < 1; zero counts
// must be clamped or excluded by the caller.
ClassPriorTable build_priors(std::span<const long long> counts, LogBase log_base = LogBase::natural);

// Weight of the inactive-frame penalty for class c. Throws
// std::out_of_range for a bad index.
double inactive_weight(const ClassPriorTable& table, std::size_t c);

}  // namespace magenta
