#include "magenta/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "magenta/geometry.hpp"

namespace magenta {

std::vector<DecodedEvent> decode_predictions(const Dataset& dataset, double activity_threshold) {
    if (!(activity_threshold > 0.0 && activity_threshold < 1.0)) {
        throw ContractError("activity threshold must lie in (0, 1), got " + format_real(activity_threshold));
    }
    std::vector<DecodedEvent> events;
    for (const auto& frame : dataset.frames) {
        for (std::size_t c = 0; c < frame.predictions.size(); ++c) {
            const Vec3& p = frame.predictions[c];
            const double r = norm(p);
            if (r > activity_threshold) events.push_back({frame.frame_index, c, p * (1.0 / r)});
        }
    }
    return events;
}

double aggregate_seld_error(double er20, double f20, double le_cd_deg, double lr_cd) {
    if (!(er20 >= 0.0) || !std::isfinite(er20)) throw ContractError("ER20 must be finite and >= 0");
    if (!(f20 >= 0.0 && f20 <= 1.0)) throw ContractError("F20 must lie in [0, 1]");
    if (!(le_cd_deg >= 0.0 && le_cd_deg <= kMissedClassErrorDeg)) throw ContractError("LE_CD must lie in [0, 180]");
    if (!(lr_cd >= 0.0 && lr_cd <= 1.0)) throw ContractError("LR_CD must lie in [0, 1]");
    return (er20 + (1.0 - f20) + le_cd_deg / kMissedClassErrorDeg + (1.0 - lr_cd)) / 4.0;
}

SeldMetrics evaluate(const Dataset& dataset, const EvalOptions& options) {
    if (!(options.threshold_deg >= 0.0 && options.threshold_deg <= 180.0)) {
        throw ContractError("angular threshold must lie in [0, 180] degrees");
    }
    if (!(options.activity_threshold > 0.0 && options.activity_threshold < 1.0)) {
        throw ContractError("activity threshold must lie in (0, 1)");
    }
    if (dataset.frames.empty()) throw ValidationError("cannot evaluate an empty dataset");
    const std::size_t num_classes = dataset.frames.front().targets.size();

    SeldMetrics m;
    m.class_names = dataset.class_names;
    if (m.class_names.size() != num_classes) {
        m.class_names.clear();
        for (std::size_t c = 0; c < num_classes; ++c) m.class_names.push_back("class_" + std::to_string(c));
    }
    m.per_class.assign(num_classes, ClassMetrics{});
    m.scored.assign(num_classes, false);

    std::vector<double> error_sum(num_classes, 0.0);
    for (const auto& frame : dataset.frames) {
        for (std::size_t c = 0; c < num_classes; ++c) {
            ClassMetrics& cm = m.per_class[c];
            const bool reference = frame.is_active(c);
            const Vec3& pred = frame.predictions[c];
            const bool predicted = norm(pred) > options.activity_threshold;

            if (reference) ++cm.reference_frames;
            if (reference && predicted) {
                ++cm.class_matches;
                const double angle = angular_distance_deg(frame.targets[c], pred);
                error_sum[c] += angle;
                if (angle <= options.threshold_deg) {
                    ++cm.true_positives;
                } else {
                    ++cm.false_positives;
                    ++cm.false_negatives;
                }
            } else if (reference) {
                ++cm.false_negatives;
            } else if (predicted) {
                ++cm.false_positives;
            }
        }
    }

    std::size_t scored = 0;
    double er = 0.0, f = 0.0, le = 0.0, lr = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        ClassMetrics& cm = m.per_class[c];
        if (cm.reference_frames == 0) {
            constexpr double nan = std::numeric_limits<double>::quiet_NaN();
            cm.er20 = cm.f20 = cm.le_cd = cm.lr_cd = nan;
            continue;
        }
        const auto n = static_cast<double>(cm.reference_frames);
        const auto tp = static_cast<double>(cm.true_positives);
        const auto fp = static_cast<double>(cm.false_positives);
        const auto fn = static_cast<double>(cm.false_negatives);
        cm.er20 = (fn + fp) / n;
        cm.f20 = 2.0 * tp / (2.0 * tp + fp + fn);
        cm.lr_cd = static_cast<double>(cm.class_matches) / n;
        cm.le_cd = cm.class_matches > 0 ? error_sum[c] / static_cast<double>(cm.class_matches) : kMissedClassErrorDeg;

        m.scored[c] = true;
        ++scored;
        er += cm.er20;
        f += cm.f20;
        le += cm.le_cd;
        lr += cm.lr_cd;
    }
    if (scored == 0) throw ValidationError("no active reference frames; metrics are undefined");

    const auto k = static_cast<double>(scored);
    m.er20 = er / k;
    m.f20 = f / k;
    m.le_cd = le / k;
    m.lr_cd = lr / k;
    m.e_seld = aggregate_seld_error(m.er20, m.f20, m.le_cd, m.lr_cd);
    return m;
}

void save_report(const SeldMetrics& metrics, const std::filesystem::path& path) {
    if (metrics.per_class.empty()) throw ValidationError("report needs at least one class");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");

    out << "class,ER20,F20,LE_CD,LR_CD\n";
    for (std::size_t c = 0; c < metrics.per_class.size(); ++c) {
        const ClassMetrics& cm = metrics.per_class[c];
        const std::string name = c < metrics.class_names.size() ? metrics.class_names[c] : "class_" + std::to_string(c);
        out << name << ',' << format_real(cm.er20) << ',' << format_real(cm.f20) << ',' << format_real(cm.le_cd) << ','
            << format_real(cm.lr_cd) << '\n';
    }
    out << "macro," << format_real(metrics.er20) << ',' << format_real(metrics.f20) << ','
        << format_real(metrics.le_cd) << ',' << format_real(metrics.lr_cd) << '\n';
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace magenta
