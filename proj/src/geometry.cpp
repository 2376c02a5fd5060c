#include "magenta/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace magenta {

ResidualDecomposition decompose(const Vec3& target, const Vec3& prediction) {
    const double target_norm = norm(target);
    if (!(std::abs(target_norm - 1.0) <= kActivityTolerance)) {
        throw ContractError("decompose requires a unit target, got norm " + format_real(target_norm));
    }

    ResidualDecomposition d;
    d.e = target - prediction;
    d.e_par = dot(d.e, target) * target;
    d.e_perp = d.e - d.e_par;
    d.a = dot(prediction, target);
    d.r = norm(prediction);
    if (d.r < kDirectionEpsilon) {
        d.cos_theta = 0.0;
        d.sin2_theta = 1.0;
    } else {
        d.cos_theta = std::clamp(d.a / d.r, -1.0, 1.0);
        d.sin2_theta = std::clamp(1.0 - d.cos_theta * d.cos_theta, 0.0, 1.0);
    }
    return d;
}

double angular_distance_deg(const Vec3& u, const Vec3& v) {
    const double denom = norm(u) * norm(v);
    if (denom <= 0.0) throw ContractError("angular distance of a zero vector is undefined");
    const double cosine = std::clamp(dot(u, v) / denom, -1.0, 1.0);
    return std::acos(cosine) * 180.0 / std::numbers::pi;
}

}  // namespace magenta
