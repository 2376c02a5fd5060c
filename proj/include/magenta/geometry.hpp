#pragma once

#include "magenta/core_types.hpp"

namespace magenta {

// Below this prediction norm the predicted direction is undefined.
inline constexpr double kDirectionEpsilon = 1e-12;

// Split of the residual p - p_hat into the component along the unit target
// (radial, activity) and the component orthogonal to it (directional).
struct ResidualDecomposition {
    Vec3 e;
    Vec3 e_par;
    Vec3 e_perp;
    double a = 0.0;          // <p_hat, p>
    double r = 0.0;          // |p_hat|
    double cos_theta = 0.0;  // 0 when r < kDirectionEpsilon
    double sin2_theta = 1.0; // 1 when r < kDirectionEpsilon
};

// Only valid for active cells: throws ContractError unless |target| = 1
// within kActivityTolerance.
ResidualDecomposition decompose(const Vec3& target, const Vec3& prediction);

// Angle between two non-zero vectors in degrees, via a clamped arccos.
double angular_distance_deg(const Vec3& u, const Vec3& v);

}  // namespace magenta
