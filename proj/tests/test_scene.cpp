#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "trisplat/core/rng.hpp"
#include "trisplat/scene/scene_model.hpp"
#include "trisplat/scene/sh.hpp"

using namespace trisplat;

TEST_CASE("barycenter is the arithmetic mean of the vertices") {
    TrianglePrimitive p = testing::make_prim({0, 0, 0}, {3, 0, 0}, {0, 3, 0}, {1, 1, 1}, 0.5);
    const Vec3 c = barycenter(p);
    CHECK(c.x == doctest::Approx(1.0));
    CHECK(c.y == doctest::Approx(1.0));
    CHECK(c.z == doctest::Approx(0.0));

    TrianglePrimitive q = testing::make_prim({2, -1, 7}, {2, -1, 7}, {2, -1, 7}, {1, 1, 1}, 0.5);
    CHECK(barycenter(q) == Vec3{2, -1, 7});

    TrianglePrimitive r = testing::make_prim({1, 2, 3}, {4, 5, 6}, {7, 8, 9}, {1, 1, 1}, 0.5);
    CHECK(barycenter(r) == Vec3{4, 5, 6});
}

TEST_CASE("barycenter tracks vertex updates with no caching") {
    SceneModel scene;
    scene.add(testing::make_prim({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 0, 0}, 0.5));
    const Vec3 before = scene.barycenter(0);
    scene.vertex(0, 0) = {9, 9, 9};
    const Vec3 after = scene.barycenter(0);
    CHECK(before.x == doctest::Approx(1.0 / 3.0));
    CHECK(after.x == doctest::Approx(10.0 / 3.0));
    CHECK(after.y == doctest::Approx(10.0 / 3.0));
    CHECK(after.z == doctest::Approx(3.0));
}

TEST_CASE("sh color: dc coefficient scales by the real Y00 constant") {
    // Independent value of the degree-0 real spherical harmonic.
    const double y00 = 0.5 * std::sqrt(1.0 / 3.14159265358979323846);
    CHECK(kShC0 == doctest::Approx(y00).epsilon(1e-12));
    CHECK(kShC0 == doctest::Approx(0.2820947918).epsilon(1e-9));

    double coeffs[3] = {0.7, -0.2, 1.3};
    const Vec3 c = sh_eval_color(0, coeffs, Vec3{0, 0, 1});
    CHECK(c.x == doctest::Approx(std::max(0.0, 0.7 * y00 + 0.5)));
    CHECK(c.y == doctest::Approx(std::max(0.0, -0.2 * y00 + 0.5)));
    CHECK(c.z == doctest::Approx(std::max(0.0, 1.3 * y00 + 0.5)));
}

TEST_CASE("sh color: zero coefficients yield mid gray") {
    double coeffs[48] = {};
    for (int deg = 0; deg <= 3; ++deg) {
        const Vec3 c = sh_eval_color(deg, coeffs, Vec3{0.3, -0.5, 0.8}.normalized());
        CHECK(c.x == doctest::Approx(0.5));
        CHECK(c.y == doctest::Approx(0.5));
        CHECK(c.z == doctest::Approx(0.5));
    }
}

TEST_CASE("sh color: dc-only evaluation is direction independent") {
    Rng rng(3);
    double coeffs[12] = {};
    coeffs[0] = 0.9;
    coeffs[1] = -0.4;
    coeffs[2] = 0.1;
    const Vec3 ref = sh_eval_color(1, coeffs, Vec3{0, 0, 1});
    for (int i = 0; i < 32; ++i) {
        const Vec3 c = sh_eval_color(1, coeffs, rng.unit_vector());
        CHECK(c.x == doctest::Approx(ref.x).epsilon(1e-12));
        CHECK(c.y == doctest::Approx(ref.y).epsilon(1e-12));
        CHECK(c.z == doctest::Approx(ref.z).epsilon(1e-12));
    }
}

TEST_CASE("sh basis gradients match finite differences") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 dir = rng.unit_vector();
        double b0[16], b1[16], dbx[16], dby[16], dbz[16];
        sh_basis_grad(3, dir, dbx, dby, dbz);
        const double h = 1e-6;
        for (int axis = 0; axis < 3; ++axis) {
            Vec3 dp = dir, dm = dir;
            (axis == 0 ? dp.x : axis == 1 ? dp.y : dp.z) += h;
            (axis == 0 ? dm.x : axis == 1 ? dm.y : dm.z) -= h;
            sh_basis(3, dp, b0);
            sh_basis(3, dm, b1);
            const double* grad = axis == 0 ? dbx : axis == 1 ? dby : dbz;
            for (int b = 0; b < 16; ++b) {
                const double fd = (b0[b] - b1[b]) / (2 * h);
                CHECK(grad[b] == doctest::Approx(fd).epsilon(1e-4));
            }
        }
    }
}

TEST_CASE("opacity squash stays inside (0,1) and saturates") {
    CHECK(squash_opacity(20.0) > 0.999999);
    CHECK(squash_opacity(-20.0) < 1e-6);
    CHECK(squash_opacity(-20.0) > 0.0);
    for (double p : {-30.0, -5.0, 0.0, 5.0, 30.0}) {
        const double o = squash_opacity(p);
        CHECK(o > 0.0);
        CHECK(o < 1.0);
    }
    CHECK(squash_opacity(unsquash_opacity(0.37)) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("scene keep() compacts primitives preserving order") {
    SceneModel scene;
    scene.sh_degree = 1;
    for (int i = 0; i < 5; ++i) {
        TrianglePrimitive p = testing::make_prim({double(i), 0, 0}, {double(i), 1, 0},
                                                 {double(i), 0, 1}, {0.5, 0.5, 0.5}, 0.5, 1);
        scene.add(p);
    }
    scene.keep({1, 0, 1, 0, 1});
    REQUIRE(scene.size() == 3);
    CHECK(scene.vertex(0, 0).x == 0.0);
    CHECK(scene.vertex(1, 0).x == 2.0);
    CHECK(scene.vertex(2, 0).x == 4.0);
}
