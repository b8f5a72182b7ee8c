#include "trisplat/raster/fd_oracle.hpp"

namespace trisplat {

size_t param_count(const SceneModel& scene) {
    return scene.size() * (10 + scene.sh_coeffs_per_prim());
}

namespace {

struct ParamRef {
    enum Kind { kVertex, kOpacity, kSh } kind;
    size_t prim;
    int slot;
};

ParamRef locate(const SceneModel& scene, size_t flat) {
    const size_t per = 10 + scene.sh_coeffs_per_prim();
    ParamRef r;
    r.prim = flat / per;
    const int off = static_cast<int>(flat % per);
    if (off < 9) {
        r.kind = ParamRef::kVertex;
        r.slot = off;
    } else if (off == 9) {
        r.kind = ParamRef::kOpacity;
        r.slot = 0;
    } else {
        r.kind = ParamRef::kSh;
        r.slot = off - 10;
    }
    return r;
}

double* param_ptr(SceneModel& scene, const ParamRef& r) {
    switch (r.kind) {
        case ParamRef::kVertex: {
            Vec3& v = scene.vertex(r.prim, r.slot / 3);
            return r.slot % 3 == 0 ? &v.x : (r.slot % 3 == 1 ? &v.y : &v.z);
        }
        case ParamRef::kOpacity:
            return &scene.opacity_param(r.prim);
        case ParamRef::kSh:
            return scene.sh(r.prim) + r.slot;
    }
    return nullptr;
}

double* grad_ptr(ParamGrads& grads, const SceneModel& scene, const ParamRef& r) {
    switch (r.kind) {
        case ParamRef::kVertex: {
            Vec3& v = grads.d_vertices[3 * r.prim + r.slot / 3];
            return r.slot % 3 == 0 ? &v.x : (r.slot % 3 == 1 ? &v.y : &v.z);
        }
        case ParamRef::kOpacity:
            return &grads.d_opacity_param[r.prim];
        case ParamRef::kSh:
            return &grads.d_sh[r.prim * scene.sh_coeffs_per_prim() + r.slot];
    }
    return nullptr;
}

}  // namespace

double get_param(const SceneModel& scene, size_t flat_index) {
    ParamRef r = locate(scene, flat_index);
    return *param_ptr(const_cast<SceneModel&>(scene), r);
}

void set_param(SceneModel& scene, size_t flat_index, double value) {
    *param_ptr(scene, locate(scene, flat_index)) = value;
}

bool is_vertex_param(const SceneModel& scene, size_t flat_index) {
    return locate(scene, flat_index).kind == ParamRef::kVertex;
}

double flatten_grad(const ParamGrads& grads, const SceneModel& scene, size_t flat_index) {
    return *grad_ptr(const_cast<ParamGrads&>(grads), scene, locate(scene, flat_index));
}

double finite_difference_coord(const SceneModel& scene, const Camera& cam,
                               const RenderSettings& settings, const RenderLossFn& loss_fn,
                               size_t flat_index, double h) {
    SceneModel work = scene;
    const double v0 = get_param(work, flat_index);
    set_param(work, flat_index, v0 + h);
    const double lp = loss_fn(render(work, cam, settings));
    set_param(work, flat_index, v0 - h);
    const double lm = loss_fn(render(work, cam, settings));
    return (lp - lm) / (2.0 * h);
}

ParamGrads finite_difference_gradients(const SceneModel& scene, const Camera& cam,
                                       const RenderSettings& settings, const RenderLossFn& loss_fn,
                                       double h_vertex, double h_other) {
    ParamGrads out;
    out.resize_for(scene);
    SceneModel work = scene;
    const size_t n = param_count(scene);
    for (size_t i = 0; i < n; ++i) {
        const ParamRef ref = locate(scene, i);
        const double h = ref.kind == ParamRef::kVertex ? h_vertex : h_other;
        double* p = param_ptr(work, ref);
        const double v0 = *p;
        *p = v0 + h;
        const double lp = loss_fn(render(work, cam, settings));
        *p = v0 - h;
        const double lm = loss_fn(render(work, cam, settings));
        *p = v0;
        *grad_ptr(out, scene, ref) = (lp - lm) / (2.0 * h);
    }
    return out;
}

}  // namespace trisplat
