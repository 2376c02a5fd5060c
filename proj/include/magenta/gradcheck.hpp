#pragma once

#include <cstdint>
#include <vector>

#include "magenta/losses.hpp"

namespace magenta {

struct GradCheckOptions {
    std::uint64_t seed = 7;
    std::size_t num_cells = 1000;  // per variant
    double step = 1e-6;            // central-difference step
    double tolerance = 1e-5;       // max allowed relative error
    double kink_margin = 1e-3;     // keep |a-1|, |r-1| and r above this
    LogBase log_base = LogBase::natural;
    // Added to every analytic gradient component; non-zero only to
    // exercise the failure path.
    double fault_injection = 0.0;
};

struct VariantCheck {
    Variant variant;
    double max_relative_error = 0.0;
    std::size_t cells = 0;
    bool passed = false;
};

// Random smooth-region cells, grouped into small batches so that the
// whole total_loss / grad_total_loss path is differenced, not just the
// per-cell formulas.
std::vector<VariantCheck> run_grad_check(const GradCheckOptions& options);

// |g - ref| / max(|g|, |ref|, 1e-12)
double relative_error(const Vec3& g, const Vec3& ref) noexcept;

}  // namespace magenta
