#pragma once

// Test-only reference implementations. Nothing here calls into the library's
// loss, geometry or metric code; expected values in the tests come from
// these routines or from hand arithmetic.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "magenta/core_types.hpp"

namespace oracle {

using magenta::Vec3;

inline Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    while (true) {
        const double x = g(rng), y = g(rng), z = g(rng);
        const double n = std::sqrt(x * x + y * y + z * z);
        if (n > 1e-6) return {x / n, y / n, z / n};
    }
}

inline Vec3 random_in_ball(std::mt19937_64& rng, double radius) {
    std::uniform_real_distribution<double> u(-radius, radius);
    while (true) {
        const Vec3 v{u(rng), u(rng), u(rng)};
        if (v.x * v.x + v.y * v.y + v.z * v.z <= radius * radius) return v;
    }
}

// Rotation matrix from a random unit quaternion.
inline std::array<std::array<double, 3>, 3> random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    double w = g(rng), x = g(rng), y = g(rng), z = g(rng);
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    w /= n; x /= n; y /= n; z /= n;
    return {{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
             {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
             {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}}};
}

inline Vec3 rotate(const std::array<std::array<double, 3>, 3>& m, const Vec3& v) {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z, m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

// Per-cell loss written straight from the scalar formulas: a, r and the
// angular terms are formed from a and r only, never from e_par / e_perp.
inline double cell_loss(const std::string& variant, const Vec3& p, const Vec3& q, double pi, double w) {
    const double pp = p.x * p.x + p.y * p.y + p.z * p.z;
    const double qq = q.x * q.x + q.y * q.y + q.z * q.z;
    const bool active = pp > 0.5;
    const bool rarity = variant == "I0" || variant[1] >= '2';
    const bool inactive_weight = variant == "I0" || variant[1] >= '3';
    const bool sat = variant[1] == '4';

    if (!active) return (inactive_weight ? w : 1.0) * qq;

    const double ex = p.x - q.x, ey = p.y - q.y, ez = p.z - q.z;
    const double se = ex * ex + ey * ey + ez * ez;
    if (variant == "A0") return se;
    if (variant == "I0") return (1.0 + pi) * se;

    const double a = p.x * q.x + p.y * q.y + p.z * q.z;
    const double r = std::sqrt(qq);
    const double under = std::pow(std::max(0.0, 1.0 - a), 2);
    const double sin2 = r < 1e-12 ? 1.0 : 1.0 - (a / r) * (a / r);
    double loss = (rarity ? 1.0 + pi : 1.0) * under;
    loss += variant[0] == 'A' ? r * r - a * a : sin2;
    if (sat) loss += (1.0 + sin2) * std::pow(std::max(0.0, r - 1.0), 2);
    return loss;
}

inline Vec3 central_difference(const std::function<double(const Vec3&)>& f, Vec3 x, double h = 1e-6) {
    Vec3 g;
    for (std::size_t i = 0; i < 3; ++i) {
        const double saved = x[i];
        x[i] = saved + h;
        const double up = f(x);
        x[i] = saved - h;
        const double down = f(x);
        x[i] = saved;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

inline double relative_error(const Vec3& a, const Vec3& b) {
    const Vec3 d = a - b;
    const double nd = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
    const double na = std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z);
    const double nb = std::sqrt(b.x * b.x + b.y * b.y + b.z * b.z);
    return nd / std::max({na, nb, 1e-12});
}

// Active-frame count per class by direct scan of target norms.
inline std::vector<long long> count_active(const magenta::Dataset& d) {
    std::vector<long long> counts(d.frames.front().targets.size(), 0);
    for (const auto& f : d.frames) {
        for (std::size_t c = 0; c < counts.size(); ++c) {
            const Vec3& t = f.targets[c];
            if (std::abs(std::sqrt(t.x * t.x + t.y * t.y + t.z * t.z) - 1.0) < 1e-9) ++counts[c];
        }
    }
    return counts;
}

// Random cell in the smooth region of every loss term: away from a = 1,
// r = 1 and r = 0.
inline Vec3 smooth_prediction(const Vec3& p, std::mt19937_64& rng) {
    while (true) {
        const Vec3 q = random_in_ball(rng, 2.5);
        const double a = p.x * q.x + p.y * q.y + p.z * q.z;
        const double r = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
        if (std::abs(a - 1.0) > 1e-3 && std::abs(r - 1.0) > 1e-3 && r > 1e-3) return q;
    }
}

}  // namespace oracle
