#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "magenta/core_types.hpp"

namespace magenta {

// Localization error assigned to a class that is never correctly detected.
inline constexpr double kMissedClassErrorDeg = 180.0;

struct ClassMetrics {
    double er20 = 0.0;
    double f20 = 0.0;
    double le_cd = kMissedClassErrorDeg;  // degrees
    double lr_cd = 0.0;

    // Raw frame-level tallies behind the numbers above.
    long long reference_frames = 0;  // N
    long long true_positives = 0;    // same class, within the angular gate
    long long false_positives = 0;   // predicted, not matched within the gate
    long long false_negatives = 0;   // reference, not matched within the gate
    long long class_matches = 0;     // predicted and reference, any angle
};

struct SeldMetrics {
    double er20 = 0.0;
    double f20 = 0.0;
    double le_cd = 0.0;
    double lr_cd = 0.0;
    double e_seld = 0.0;
    std::vector<std::string> class_names;
    std::vector<ClassMetrics> per_class;
    // Classes with no reference frames are reported but left out of the
    // macro averages.
    std::vector<bool> scored;
};

struct DecodedEvent {
    long long t = 0;
    std::size_t c = 0;
    Vec3 doa;  // unit vector
};

struct EvalOptions {
    double threshold_deg = 20.0;
    double activity_threshold = 0.5;
};

// A class is predicted active when |p_hat| > activity_threshold; its DOA
// is p_hat / |p_hat|. Throws ContractError unless the threshold is in (0, 1).
std::vector<DecodedEvent> decode_predictions(const Dataset& dataset, double activity_threshold = 0.5);

// Frame-level scoring, macro-averaged over classes. Throws ValidationError
// when no reference frame is active anywhere.
SeldMetrics evaluate(const Dataset& dataset, const EvalOptions& options = {});

// (ER + (1 - F) + LE / 180 + (1 - LR)) / 4. Throws ContractError when an
// argument is outside its domain.
double aggregate_seld_error(double er20, double f20, double le_cd_deg, double lr_cd);

// CSV with header `class,ER20,F20,LE_CD,LR_CD`, one row per class followed
// by a `macro` row. Throws ValidationError for an empty class list and
// IoError when the file cannot be written.
void save_report(const SeldMetrics& metrics, const std::filesystem::path& path);

}  // namespace magenta
