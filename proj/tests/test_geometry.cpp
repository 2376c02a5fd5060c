#include <doctest.h>

#include <random>

#include "magenta/geometry.hpp"
#include "oracles.hpp"

using namespace magenta;

namespace {

void check_vec(const Vec3& got, const Vec3& want, double tol = 1e-15) {
    CHECK(std::abs(got.x - want.x) <= tol);
    CHECK(std::abs(got.y - want.y) <= tol);
    CHECK(std::abs(got.z - want.z) <= tol);
}

}  // namespace

TEST_CASE("decompose: aligned under-confident prediction") {
    const auto d = decompose({0, 0, 1}, {0, 0, 0.5});
    check_vec(d.e, {0, 0, 0.5});
    check_vec(d.e_par, {0, 0, 0.5});
    check_vec(d.e_perp, {0, 0, 0});
    CHECK(d.a == 0.5);
    CHECK(d.r == 0.5);
    CHECK(d.cos_theta == 1.0);
    CHECK(d.sin2_theta == 0.0);
}

TEST_CASE("decompose: oblique prediction splits 0.25 = 0.16 + 0.09") {
    const auto d = decompose({1, 0, 0}, {0.6, 0.3, 0});
    check_vec(d.e, {0.4, -0.3, 0}, 1e-15);
    check_vec(d.e_par, {0.4, 0, 0}, 1e-15);
    check_vec(d.e_perp, {0, -0.3, 0}, 1e-15);
    CHECK(squared_norm(d.e) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(squared_norm(d.e_par) == doctest::Approx(0.16).epsilon(1e-14));
    CHECK(squared_norm(d.e_perp) == doctest::Approx(0.09).epsilon(1e-14));
}

TEST_CASE("decompose: perfect prediction") {
    const auto d = decompose({1, 0, 0}, {1, 0, 0});
    check_vec(d.e, {0, 0, 0});
    CHECK(d.a == 1.0);
    CHECK(d.r == 1.0);
    CHECK(d.sin2_theta == 0.0);
}

TEST_CASE("decompose: origin plateau") {
    const auto d = decompose({0, 1, 0}, {0, 0, 0});
    CHECK(d.r == 0.0);
    CHECK(d.cos_theta == 0.0);
    CHECK(d.sin2_theta == 1.0);
    const auto tiny = decompose({0, 1, 0}, {0, 1e-13, 0});
    CHECK(tiny.sin2_theta == 1.0);
}

TEST_CASE("decompose: non-unit target is a contract violation") {
    CHECK_THROWS_AS(decompose({0, 0, 0}, {0, 0, 1}), ContractError);
    CHECK_THROWS_AS(decompose({0, 0, 0.5}, {0, 0, 1}), ContractError);
    CHECK_NOTHROW(decompose({0, 0, 1.0 + 5e-10}, {0, 0, 1}));
}

TEST_CASE("property: orthogonal split on 1e4 random cells") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10000; ++i) {
        const Vec3 p = oracle::random_unit(rng);
        const Vec3 q = oracle::random_in_ball(rng, 3.0);
        const auto d = decompose(p, q);
        const Vec3 sum = d.e_par + d.e_perp;
        REQUIRE(std::abs(sum.x - d.e.x) <= 1e-12);
        REQUIRE(std::abs(sum.y - d.e.y) <= 1e-12);
        REQUIRE(std::abs(sum.z - d.e.z) <= 1e-12);
        REQUIRE(std::abs(dot(d.e_perp, p)) <= 1e-12);
        REQUIRE(std::abs(squared_norm(d.e) - squared_norm(d.e_par) - squared_norm(d.e_perp)) <= 1e-12);
        REQUIRE(std::abs(squared_norm(d.e_perp) - (d.r * d.r - d.a * d.a)) <= 1e-10);
        if (d.r > 0) REQUIRE(std::abs(d.a - d.r * d.cos_theta) <= 1e-12);
        REQUIRE(d.sin2_theta >= 0.0);
        REQUIRE(d.sin2_theta <= 1.0);
    }
}

TEST_CASE("property: rotation equivariance") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 2000; ++i) {
        const Vec3 p = oracle::random_unit(rng);
        const Vec3 q = oracle::random_in_ball(rng, 3.0);
        const auto rot = oracle::random_rotation(rng);
        const auto d = decompose(p, q);
        const auto dr = decompose(oracle::rotate(rot, p), oracle::rotate(rot, q));
        REQUIRE(std::abs(d.a - dr.a) <= 1e-10);
        REQUIRE(std::abs(d.r - dr.r) <= 1e-10);
        REQUIRE(std::abs(d.cos_theta - dr.cos_theta) <= 1e-10);
        REQUIRE(std::abs(norm(d.e_par) - norm(dr.e_par)) <= 1e-10);
        REQUIRE(std::abs(norm(d.e_perp) - norm(dr.e_perp)) <= 1e-10);
    }
}

TEST_CASE("angular_distance_deg") {
    CHECK(angular_distance_deg({1, 0, 0}, {0, 1, 0}) == doctest::Approx(90.0));
    CHECK(angular_distance_deg({1, 0, 0}, {2, 0, 0}) == 0.0);
    CHECK(angular_distance_deg({1, 0, 0}, {-1, 0, 0}) == doctest::Approx(180.0));
    CHECK_THROWS_AS(angular_distance_deg({0, 0, 0}, {1, 0, 0}), ContractError);
}
