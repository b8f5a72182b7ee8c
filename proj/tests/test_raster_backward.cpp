#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "trisplat/raster/backward.hpp"
#include "trisplat/raster/fd_oracle.hpp"
#include "trisplat/scene/sh.hpp"
#include "trisplat/train/gradcheck.hpp"

using namespace trisplat;

namespace {

RenderSettings smooth_settings() {
    RenderSettings st;
    st.training = true;
    st.min_contrib_opacity = 1e-12;
    st.termination_transmittance = 0.0;
    return st;
}

}  // namespace

TEST_CASE("zero pixel gradients produce zero parameter gradients") {
    SceneModel scene = testing::random_scene(3, 6, 3.0, 1);
    const Camera cam = testing::identity_camera(32, 32);
    RenderSettings st;
    st.training = true;
    FrameRecords rec;
    render(scene, cam, st, &rec);
    const ParamGrads grads = render_backward(scene, rec, PixelGrads{});
    for (const Vec3& v : grads.d_vertices) CHECK(v == Vec3{});
    for (double d : grads.d_opacity_param) CHECK(d == 0.0);
    for (double d : grads.d_sh) CHECK(d == 0.0);
}

TEST_CASE("single primitive: dc color gradient is the blend weight times Y00") {
    SceneModel scene;
    scene.gamma = 5.0;
    scene.add(testing::make_prim({-2, -2, 3}, {2, -2, 3}, {0, 3, 3}, {0.7, 0.4, 0.2}, 0.6));
    const Camera cam = testing::identity_camera(16, 16);
    RenderSettings st = smooth_settings();
    FrameRecords rec;
    const RenderOutput out = render(scene, cam, st, &rec);

    // One fully-covered pixel with dL/d(red) = 1.
    const int px = 8, py = 8;
    REQUIRE(out.alpha.at(0, py, px) > 0.0);
    PixelGrads pg;
    pg.color = Image(16, 16, 3);
    pg.color.at(0, py, px) = 1.0;
    const ParamGrads grads = render_backward(scene, rec, pg);

    // Recover o * T for that pixel from the records.
    const size_t p = py * 16 + px;
    REQUIRE(rec.offsets[p + 1] - rec.offsets[p] == 1);
    const double o = std::min(rec.o_pre[rec.offsets[p]], st.max_contrib_opacity);
    CHECK(grads.d_sh[0] == doctest::Approx(o * kShC0).epsilon(1e-12));
    CHECK(grads.d_sh[1] == 0.0);  // only the red channel was driven
    CHECK(grads.d_sh[2] == 0.0);
}

TEST_CASE("mismatched records are rejected") {
    SceneModel scene = testing::random_scene(4, 4, 2.0);
    const Camera cam = testing::identity_camera(16, 16);
    RenderSettings st;
    st.training = true;
    FrameRecords rec;
    render(scene, cam, st, &rec);
    scene.vertex(0, 0).x += 0.5;  // records now stale
    CHECK_THROWS_AS(render_backward(scene, rec, PixelGrads{}), std::invalid_argument);

    // Non-training records are also rejected.
    SceneModel scene2 = testing::random_scene(4, 4, 2.0);
    FrameRecords rec2;
    RenderSettings st2;  // training = false
    render(scene2, cam, st2, &rec2);
    CHECK_THROWS_AS(render_backward(scene2, rec2, PixelGrads{}), std::invalid_argument);
}

TEST_CASE("analytic gradients match finite differences on a seeded scene") {
    // The spec-pinned FD configuration: h = 1e-4 * extent for vertices.
    const GradCheckScene gs = make_gradcheck_scene(202);
    const RenderSettings st = smooth_settings();
    FrameRecords rec;
    render(gs.scene, gs.camera, st, &rec);

    Image gt(32, 32, 3);
    for (size_t i = 0; i < gt.size(); ++i) gt.data()[i] = 2.0;
    PixelGrads pg;
    pg.color = Image(32, 32, 3);
    const double invn = 1.0 / static_cast<double>(gt.size());
    for (size_t i = 0; i < gt.size(); ++i) pg.color.data()[i] = -invn;
    const ParamGrads analytic = render_backward(gs.scene, rec, pg);

    auto loss = [&](const RenderOutput& r) {
        double s = 0.0;
        for (size_t i = 0; i < gt.size(); ++i) s += std::fabs(r.color.data()[i] - gt.data()[i]);
        return s * invn;
    };
    const double h = 1e-4 * gs.scene.scene_extent;
    const ParamGrads fd = finite_difference_gradients(gs.scene, gs.camera, st, loss, h, 1e-4);
    for (size_t i = 0; i < param_count(gs.scene); ++i) {
        const double a = flatten_grad(analytic, gs.scene, i);
        const double f = flatten_grad(fd, gs.scene, i);
        const double err = std::fabs(a - f);
        CHECK((err <= 1e-7 || err <= 1e-3 * std::max(std::fabs(a), std::fabs(f))));
    }
}

TEST_CASE("central differences converge at second order") {
    const GradCheckScene gs = make_gradcheck_scene(7);
    const RenderSettings st = smooth_settings();
    auto loss = [](const RenderOutput& r) {
        double s = 0.0;
        for (size_t i = 0; i < r.depth.size(); ++i) s += r.depth.data()[i];
        return s / static_cast<double>(r.depth.size());
    };
    // Pick a vertex coordinate with a healthy gradient.
    FrameRecords rec;
    render(gs.scene, gs.camera, st, &rec);
    PixelGrads pg;
    pg.depth = Image(32, 32, 1);
    for (size_t i = 0; i < pg.depth.size(); ++i)
        pg.depth.data()[i] = 1.0 / static_cast<double>(pg.depth.size());
    const ParamGrads analytic = render_backward(gs.scene, rec, pg);
    size_t coord = 0;
    double best = 0.0;
    for (size_t i = 0; i < param_count(gs.scene); ++i) {
        if (!is_vertex_param(gs.scene, i)) continue;
        const double a = std::fabs(flatten_grad(analytic, gs.scene, i));
        if (a > best) {
            best = a;
            coord = i;
        }
    }
    REQUIRE(best > 0.0);
    const double exact = flatten_grad(analytic, gs.scene, coord);
    const double h = 2e-3 * gs.scene.scene_extent;
    const double e1 =
        std::fabs(finite_difference_coord(gs.scene, gs.camera, st, loss, coord, h) - exact);
    const double e2 =
        std::fabs(finite_difference_coord(gs.scene, gs.camera, st, loss, coord, h / 2) - exact);
    // Halving h should shrink the truncation error ~4x (allow slack for
    // higher-order terms and roundoff).
    CHECK(e2 < e1 / 2.5);
}

TEST_CASE("primitives outside the frustum receive exactly zero gradient") {
    SceneModel scene = testing::random_scene(9, 3, 2.0);
    scene.add(testing::make_prim({50, 50, -5}, {51, 50, -5}, {50, 51, -5}, {1, 0, 0}, 0.8));
    const size_t outside = scene.size() - 1;
    const Camera cam = testing::identity_camera(32, 32);
    RenderSettings st;
    st.training = true;
    FrameRecords rec;
    render(scene, cam, st, &rec);
    PixelGrads pg;
    pg.color = Image(32, 32, 3);
    for (size_t i = 0; i < pg.color.size(); ++i) pg.color.data()[i] = 1.0;
    const ParamGrads grads = render_backward(scene, rec, pg);
    for (int k = 0; k < 3; ++k) CHECK(grads.d_vertices[3 * outside + k] == Vec3{});
    CHECK(grads.d_opacity_param[outside] == 0.0);
    // FD agrees: the coordinate has no influence.
    auto loss = [](const RenderOutput& r) {
        double s = 0.0;
        for (size_t i = 0; i < r.color.size(); ++i) s += r.color.data()[i];
        return s;
    };
    const size_t flat = outside * (10 + scene.sh_coeffs_per_prim());
    CHECK(finite_difference_coord(scene, cam, st, loss, flat, 1e-4) == 0.0);
}

TEST_CASE("occlusion: raising the front opacity dampens the back color gradient") {
    const Camera cam = testing::identity_camera(24, 24);
    auto grad_to_back = [&](double front_opacity) {
        SceneModel scene;
        scene.gamma = 10.0;
        scene.add(testing::make_prim({-3, -3, 2}, {3, -3, 2}, {0, 4.5, 2}, {0.8, 0.2, 0.2},
                                     front_opacity));
        scene.add(
            testing::make_prim({-3, -3, 4}, {3, -3, 4}, {0, 4.5, 4}, {0.2, 0.8, 0.2}, 0.7));
        RenderSettings st;
        st.training = true;
        FrameRecords rec;
        render(scene, cam, st, &rec);
        PixelGrads pg;
        pg.color = Image(24, 24, 3);
        for (size_t i = 0; i < pg.color.size(); ++i) pg.color.data()[i] = 1.0;
        const ParamGrads grads = render_backward(scene, rec, pg);
        double mag = 0.0;
        for (int c = 0; c < scene.sh_coeffs_per_prim(); ++c)
            mag += std::fabs(grads.d_sh[1 * scene.sh_coeffs_per_prim() + c]);
        return mag;
    };
    const double lo = grad_to_back(0.2);
    const double hi = grad_to_back(0.9);
    CHECK(hi < lo);
}

TEST_CASE("backward stays finite on nearly degenerate primitives") {
    Rng rng(77);
    const Camera cam = testing::identity_camera(32, 32);
    for (int trial = 0; trial < 30; ++trial) {
        SceneModel scene;
        scene.gamma = 1.0 + 9.0 * rng.uniform();
        // A sliver: two vertices nearly coincide.
        const Vec3 base{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(2.0, 4.0)};
        const double eps = std::pow(10.0, rng.uniform(-6.0, -2.0));
        TrianglePrimitive p = testing::make_prim(
            base, base + Vec3{eps, eps * 0.5, 0.0}, base + Vec3{0.4, 0.6, 0.1}, {0.5, 0.5, 0.5},
            0.7);
        scene.add(p);
        RenderSettings st;
        st.training = true;
        FrameRecords rec;
        render(scene, cam, st, &rec);
        PixelGrads pg;
        pg.color = Image(32, 32, 3);
        pg.depth = Image(32, 32, 1);
        pg.normal_raw = Image(32, 32, 3);
        pg.alpha = Image(32, 32, 1);
        Rng wr(trial);
        for (size_t i = 0; i < pg.color.size(); ++i) pg.color.data()[i] = wr.uniform(-1, 1);
        for (size_t i = 0; i < pg.depth.size(); ++i) pg.depth.data()[i] = wr.uniform(-1, 1);
        for (size_t i = 0; i < pg.normal_raw.size(); ++i)
            pg.normal_raw.data()[i] = wr.uniform(-1, 1);
        for (size_t i = 0; i < pg.alpha.size(); ++i) pg.alpha.data()[i] = wr.uniform(-1, 1);
        const ParamGrads grads = render_backward(scene, rec, pg);
        for (const Vec3& v : grads.d_vertices) CHECK(v.all_finite());
        for (double d : grads.d_opacity_param) CHECK(std::isfinite(d));
        for (double d : grads.d_sh) CHECK(std::isfinite(d));
    }
}

TEST_CASE("normalize_backward matches finite differences away from the cutoff") {
    Rng rng(5);
    Image raw(4, 4, 3), dunit(4, 4, 3);
    for (size_t i = 0; i < raw.size(); ++i) raw.data()[i] = rng.uniform(-1.0, 1.0);
    for (size_t i = 0; i < dunit.size(); ++i) dunit.data()[i] = rng.uniform(-1.0, 1.0);
    const Image draw = normalize_backward(raw, dunit);
    auto loss = [&](const Image& r) {
        double s = 0.0;
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) {
                const Vec3 v = r.rgb(y, x);
                const double len = v.norm();
                const Vec3 u = len >= kNormalizeEps ? v / len : Vec3{};
                s += u.dot(dunit.rgb(y, x));
            }
        return s;
    };
    const double h = 1e-7;
    for (size_t i = 0; i < raw.size(); ++i) {
        Image rp = raw, rm = raw;
        rp.data()[i] += h;
        rm.data()[i] -= h;
        const double fd = (loss(rp) - loss(rm)) / (2 * h);
        CHECK(draw.data()[i] == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("gradcheck harness passes on a small seeded batch") {
    const GradCheckReport rep = run_gradcheck(900, 6);
    CHECK(rep.pass());
    CHECK(rep.scenes == 6);
    CHECK(rep.failed == 0);
}
