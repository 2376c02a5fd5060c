#pragma once

#include <json.hpp>

#include "magenta/bench.hpp"
#include "magenta/gradcheck.hpp"
#include "magenta/losses.hpp"
#include "magenta/metrics.hpp"
#include "magenta/priors.hpp"

// JSON views of the library's result types. Keys are emitted in a fixed
// order (ordered_json) so output diffs cleanly between runs. Non-finite
// numbers become null.
namespace magenta::report {

using Json = nlohmann::ordered_json;

Json to_json(const ClassPriorTable& table, const std::vector<std::string>& names);
Json to_json(const LossBreakdown& loss, const LossConfig& config);
Json to_json(const SeldMetrics& metrics);
Json to_json(const bench::BenchResult& result);
Json to_json(const std::vector<VariantCheck>& checks, double tolerance);

std::string_view log_base_label(LogBase base) noexcept;

}  // namespace magenta::report
