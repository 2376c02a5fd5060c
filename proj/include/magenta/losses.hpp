#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "magenta/core_types.hpp"
#include "magenta/geometry.hpp"
#include "magenta/priors.hpp"

namespace magenta {

// The ablation ladder. A0 is plain squared error and I0 re-weights it by
// class priors. A1..A4 add terms one at a time on top of the radial /
// perpendicular split; M1..M4 are the same with the magnitude-invariant
// angular term in place of the perpendicular one.
enum class Variant { A0, I0, A1, A2, A3, A4, M1, M2, M3, M4 };

inline constexpr std::array<Variant, 10> kAllVariants = {Variant::A0, Variant::I0, Variant::A1, Variant::A2,
                                                         Variant::A3, Variant::A4, Variant::M1, Variant::M2,
                                                         Variant::M3, Variant::M4};

std::string_view to_string(Variant v) noexcept;
// Throws ValidationError for an unknown label.
Variant parse_variant(std::string_view label);
// Comma-separated list, e.g. "A0,A2,M4".
std::vector<Variant> parse_variant_list(std::string_view labels);

enum class AngularTerm { perp, mia };

struct LossConfig {
    Variant variant = Variant::A0;
    bool decomposed = false;            // false only for A0 / I0
    AngularTerm angular = AngularTerm::perp;
    bool use_rarity = false;            // (1 + pi_c) on the radial / regression term
    bool use_inactive_weight = false;   // w_c on inactive cells
    bool use_saturation = false;
    LogBase log_base = LogBase::natural;

    // The only way to build a config: flags follow from the variant.
    static LossConfig for_variant(Variant variant, LogBase log_base = LogBase::natural);

    friend bool operator==(const LossConfig&, const LossConfig&) = default;
};

struct LossBreakdown {
    double total = 0.0;
    // Mean contribution of each term over all T*C cells; they sum to total.
    double regression = 0.0;  // squared error of A0 / I0 on active cells
    double under = 0.0;
    double angular = 0.0;
    double saturation = 0.0;
    double inactive = 0.0;
    std::vector<double> per_class;  // also normalized by T*C
};

// ([1 - a]_+)^2
double under_penalty(double a) noexcept;
// (1 + pi_c) * under_penalty(a)
double rarity_weighted_under(double a, double pi_c) noexcept;
// |e_perp|^2, equal to r^2 - a^2
double angular_perp(const ResidualDecomposition& d) noexcept;
// sin^2(theta); 1 on the r < kDirectionEpsilon plateau
double angular_mia(const ResidualDecomposition& d) noexcept;
// (1 + sin^2 theta) * ([r - 1]_+)^2
double saturation(const ResidualDecomposition& d) noexcept;
// w_c * |p_hat|^2
double inactive_loss(const Vec3& prediction, double w_c) noexcept;

double active_loss(const ResidualDecomposition& d, double pi_c, const LossConfig& config) noexcept;

// Per-cell value split by term, before the 1/(T*C) normalization.
struct CellTerms {
    double regression = 0.0;
    double under = 0.0;
    double angular = 0.0;
    double saturation = 0.0;
    double inactive = 0.0;

    double sum() const noexcept { return regression + under + angular + saturation + inactive; }
};

CellTerms cell_terms(const Vec3& target, const Vec3& prediction, double pi_c, double w_c, const LossConfig& config);
// Gradient of the single-cell loss with respect to the prediction.
Vec3 cell_gradient(const Vec3& target, const Vec3& prediction, double pi_c, double w_c, const LossConfig& config);

using GradientField = std::vector<std::vector<Vec3>>;  // [t][c]

// Throws ValidationError when the dataset and prior table disagree on C.
LossBreakdown total_loss(const Dataset& dataset, const ClassPriorTable& priors, const LossConfig& config);
GradientField grad_total_loss(const Dataset& dataset, const ClassPriorTable& priors, const LossConfig& config);

}  // namespace magenta
