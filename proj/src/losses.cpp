#include "magenta/losses.hpp"

#include <algorithm>

namespace magenta {

namespace {

double hinge(double x) noexcept { return x > 0.0 ? x : 0.0; }

bool is_active_target(const Vec3& target) noexcept { return squared_norm(target) > 0.25; }

// d sin^2(theta) / d p_hat. Zero on the small-norm plateau.
Vec3 sin2_gradient(const ResidualDecomposition& d, const Vec3& target, const Vec3& prediction) noexcept {
    if (d.r < kDirectionEpsilon) return {};
    const double k = d.a / (d.r * d.r);
    return -2.0 * k * (target - k * prediction);
}

void check_shapes(const Dataset& dataset, const ClassPriorTable& priors) {
    if (dataset.frames.empty()) throw ValidationError("dataset has no frames");
    const std::size_t num_classes = dataset.frames.front().targets.size();
    if (priors.num_classes() != num_classes || priors.pi.size() != num_classes || priors.w.size() != num_classes) {
        throw ValidationError("prior table has " + std::to_string(priors.num_classes()) + " classes, dataset has " +
                              std::to_string(num_classes));
    }
    for (const auto& frame : dataset.frames) {
        if (frame.targets.size() != num_classes || frame.predictions.size() != num_classes) {
            throw ValidationError("frame t=" + std::to_string(frame.frame_index) + " has inconsistent class count");
        }
    }
}

}  // namespace

std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::A0: return "A0";
        case Variant::I0: return "I0";
        case Variant::A1: return "A1";
        case Variant::A2: return "A2";
        case Variant::A3: return "A3";
        case Variant::A4: return "A4";
        case Variant::M1: return "M1";
        case Variant::M2: return "M2";
        case Variant::M3: return "M3";
        case Variant::M4: return "M4";
    }
    return "?";
}

Variant parse_variant(std::string_view label) {
    for (Variant v : kAllVariants) {
        if (to_string(v) == label) return v;
    }
    throw ValidationError("unknown loss variant '" + std::string(label) + "' (expected one of A0,I0,A1..A4,M1..M4)");
}

std::vector<Variant> parse_variant_list(std::string_view labels) {
    std::vector<Variant> out;
    std::size_t start = 0;
    while (start <= labels.size()) {
        auto comma = labels.find(',', start);
        if (comma == std::string_view::npos) comma = labels.size();
        const auto item = labels.substr(start, comma - start);
        if (!item.empty()) {
            const Variant v = parse_variant(item);
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        }
        start = comma + 1;
    }
    if (out.empty()) throw ValidationError("empty variant list");
    return out;
}

LossConfig LossConfig::for_variant(Variant variant, LogBase log_base) {
    LossConfig cfg;
    cfg.variant = variant;
    cfg.log_base = log_base;
    switch (variant) {
        case Variant::A0:
            break;
        case Variant::I0:
            cfg.use_rarity = true;
            cfg.use_inactive_weight = true;
            break;
        default: {
            cfg.decomposed = true;
            const bool mia = variant == Variant::M1 || variant == Variant::M2 || variant == Variant::M3 ||
                             variant == Variant::M4;
            cfg.angular = mia ? AngularTerm::mia : AngularTerm::perp;
            // Rung on the ladder: 1 = under + angular, 2 = + pi_c, 3 = + w_c, 4 = + saturation.
            int rung = 1;
            if (variant == Variant::A2 || variant == Variant::M2) rung = 2;
            if (variant == Variant::A3 || variant == Variant::M3) rung = 3;
            if (variant == Variant::A4 || variant == Variant::M4) rung = 4;
            cfg.use_rarity = rung >= 2;
            cfg.use_inactive_weight = rung >= 3;
            cfg.use_saturation = rung >= 4;
            break;
        }
    }
    return cfg;
}

double under_penalty(double a) noexcept {
    const double h = hinge(1.0 - a);
    return h * h;
}

double rarity_weighted_under(double a, double pi_c) noexcept { return (1.0 + pi_c) * under_penalty(a); }

double angular_perp(const ResidualDecomposition& d) noexcept { return squared_norm(d.e_perp); }

double angular_mia(const ResidualDecomposition& d) noexcept {
    if (d.r < kDirectionEpsilon) return 1.0;
    const double c = d.a / d.r;
    return std::clamp(1.0 - c * c, 0.0, 1.0);
}

double saturation(const ResidualDecomposition& d) noexcept {
    const double h = hinge(d.r - 1.0);
    return (1.0 + angular_mia(d)) * h * h;
}

double inactive_loss(const Vec3& prediction, double w_c) noexcept { return w_c * squared_norm(prediction); }

namespace {

CellTerms active_terms(const ResidualDecomposition& d, double pi_c, const LossConfig& config) noexcept {
    CellTerms terms;
    if (!config.decomposed) {
        const double se = squared_norm(d.e);
        terms.regression = config.use_rarity ? (1.0 + pi_c) * se : se;
        return terms;
    }
    terms.under = config.use_rarity ? rarity_weighted_under(d.a, pi_c) : under_penalty(d.a);
    terms.angular = config.angular == AngularTerm::perp ? angular_perp(d) : angular_mia(d);
    if (config.use_saturation) terms.saturation = saturation(d);
    return terms;
}

}  // namespace

double active_loss(const ResidualDecomposition& d, double pi_c, const LossConfig& config) noexcept {
    return active_terms(d, pi_c, config).sum();
}

CellTerms cell_terms(const Vec3& target, const Vec3& prediction, double pi_c, double w_c, const LossConfig& config) {
    if (is_active_target(target)) return active_terms(decompose(target, prediction), pi_c, config);
    CellTerms terms;
    terms.inactive = inactive_loss(prediction, config.use_inactive_weight ? w_c : 1.0);
    return terms;
}

Vec3 cell_gradient(const Vec3& target, const Vec3& prediction, double pi_c, double w_c, const LossConfig& config) {
    if (!is_active_target(target)) {
        const double weight = config.use_inactive_weight ? w_c : 1.0;
        return 2.0 * weight * prediction;
    }

    const double radial_weight = config.use_rarity ? 1.0 + pi_c : 1.0;
    if (!config.decomposed) return radial_weight * 2.0 * (prediction - target);

    const ResidualDecomposition d = decompose(target, prediction);
    Vec3 grad = (-2.0 * radial_weight * hinge(1.0 - d.a)) * target;

    const Vec3 ds = sin2_gradient(d, target, prediction);
    if (config.angular == AngularTerm::perp) {
        grad += 2.0 * (prediction - d.a * target);
    } else {
        grad += ds;
    }

    if (config.use_saturation) {
        const double h = hinge(d.r - 1.0);
        if (h > 0.0) {
            // h > 0 implies r > 1, so p_hat / r is well defined.
            grad += ((1.0 + angular_mia(d)) * 2.0 * h / d.r) * prediction;
            grad += (h * h) * ds;
        }
    }
    return grad;
}

LossBreakdown total_loss(const Dataset& dataset, const ClassPriorTable& priors, const LossConfig& config) {
    check_shapes(dataset, priors);
    const std::size_t num_classes = priors.num_classes();
    const double scale = 1.0 / (static_cast<double>(dataset.frames.size()) * static_cast<double>(num_classes));

    LossBreakdown out;
    out.per_class.assign(num_classes, 0.0);
    // Sequential accumulation in (t, c) order keeps totals reproducible.
    for (const auto& frame : dataset.frames) {
        for (std::size_t c = 0; c < num_classes; ++c) {
            const CellTerms t = cell_terms(frame.targets[c], frame.predictions[c], priors.pi[c], priors.w[c], config);
            out.regression += t.regression;
            out.under += t.under;
            out.angular += t.angular;
            out.saturation += t.saturation;
            out.inactive += t.inactive;
            out.per_class[c] += t.sum();
        }
    }
    out.regression *= scale;
    out.under *= scale;
    out.angular *= scale;
    out.saturation *= scale;
    out.inactive *= scale;
    for (double& v : out.per_class) v *= scale;
    for (double v : out.per_class) out.total += v;
    return out;
}

GradientField grad_total_loss(const Dataset& dataset, const ClassPriorTable& priors, const LossConfig& config) {
    check_shapes(dataset, priors);
    const std::size_t num_classes = priors.num_classes();
    const double scale = 1.0 / (static_cast<double>(dataset.frames.size()) * static_cast<double>(num_classes));

    GradientField grad(dataset.frames.size(), std::vector<Vec3>(num_classes));
    for (std::size_t t = 0; t < dataset.frames.size(); ++t) {
        const auto& frame = dataset.frames[t];
        for (std::size_t c = 0; c < num_classes; ++c) {
            grad[t][c] = scale * cell_gradient(frame.targets[c], frame.predictions[c], priors.pi[c], priors.w[c], config);
        }
    }
    return grad;
}

}  // namespace magenta
