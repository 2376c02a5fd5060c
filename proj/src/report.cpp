#include "magenta/report.hpp"

#include <cmath>

namespace magenta::report {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json config_json(const LossConfig& config) {
    Json j;
    j["variant"] = std::string(to_string(config.variant));
    j["decomposed"] = config.decomposed;
    j["angular"] = config.angular == AngularTerm::perp ? "perp" : "mia";
    j["use_rarity"] = config.use_rarity;
    j["use_inactive_weight"] = config.use_inactive_weight;
    j["use_saturation"] = config.use_saturation;
    j["log_base"] = std::string(log_base_label(config.log_base));
    return j;
}

}  // namespace

std::string_view log_base_label(LogBase base) noexcept { return base == LogBase::natural ? "e" : "10"; }

Json to_json(const ClassPriorTable& table, const std::vector<std::string>& names) {
    Json j;
    j["log_base"] = std::string(log_base_label(table.log_base));
    j["ir"] = number(table.ir);
    j["gamma"] = number(table.gamma);
    Json classes = Json::array();
    for (std::size_t c = 0; c < table.num_classes(); ++c) {
        Json row;
        row["class"] = c;
        row["name"] = c < names.size() ? names[c] : "class_" + std::to_string(c);
        row["count"] = table.counts[c];
        row["pi"] = number(table.pi[c]);
        row["w"] = number(table.w[c]);
        classes.push_back(std::move(row));
    }
    j["classes"] = std::move(classes);
    return j;
}

Json to_json(const LossBreakdown& loss, const LossConfig& config) {
    Json j;
    j["config"] = config_json(config);
    j["total"] = number(loss.total);
    j["regression"] = number(loss.regression);
    j["under"] = number(loss.under);
    j["angular"] = number(loss.angular);
    j["saturation"] = number(loss.saturation);
    j["inactive"] = number(loss.inactive);
    Json per_class = Json::array();
    for (double v : loss.per_class) per_class.push_back(number(v));
    j["per_class"] = std::move(per_class);
    return j;
}

Json to_json(const SeldMetrics& m) {
    Json j;
    j["ER20"] = number(m.er20);
    j["F20"] = number(m.f20);
    j["LE_CD"] = number(m.le_cd);
    j["LR_CD"] = number(m.lr_cd);
    j["E_SELD"] = number(m.e_seld);
    Json classes = Json::array();
    for (std::size_t c = 0; c < m.per_class.size(); ++c) {
        const ClassMetrics& cm = m.per_class[c];
        Json row;
        row["class"] = c < m.class_names.size() ? m.class_names[c] : "class_" + std::to_string(c);
        row["scored"] = c < m.scored.size() && m.scored[c];
        row["ER20"] = number(cm.er20);
        row["F20"] = number(cm.f20);
        row["LE_CD"] = number(cm.le_cd);
        row["LR_CD"] = number(cm.lr_cd);
        row["reference_frames"] = cm.reference_frames;
        row["true_positives"] = cm.true_positives;
        row["false_positives"] = cm.false_positives;
        row["false_negatives"] = cm.false_negatives;
        row["class_matches"] = cm.class_matches;
        classes.push_back(std::move(row));
    }
    j["per_class"] = std::move(classes);
    return j;
}

Json to_json(const bench::BenchResult& result) {
    Json j;
    j["config"] = config_json(result.config);
    j["metrics"] = to_json(result.metrics);
    Json recall = Json::array();
    for (double v : result.per_class_recall) recall.push_back(number(v));
    j["per_class_recall"] = std::move(recall);
    Json curve = Json::array();
    for (const auto& [epoch, total] : result.loss_curve) curve.push_back(Json::array({epoch, number(total)}));
    j["loss_curve"] = std::move(curve);
    return j;
}

Json to_json(const std::vector<VariantCheck>& checks, double tolerance) {
    Json j;
    j["tolerance"] = tolerance;
    bool all = true;
    Json rows = Json::array();
    for (const VariantCheck& check : checks) {
        Json row;
        row["variant"] = std::string(to_string(check.variant));
        row["cells"] = check.cells;
        row["max_relative_error"] = number(check.max_relative_error);
        row["passed"] = check.passed;
        all = all && check.passed;
        rows.push_back(std::move(row));
    }
    j["variants"] = std::move(rows);
    j["passed"] = all;
    return j;
}

}  // namespace magenta::report
