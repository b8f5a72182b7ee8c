#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "trisplat/core/image.hpp"
#include "trisplat/core/math.hpp"
#include "trisplat/core/vec.hpp"
#include "trisplat/scene/sh.hpp"

namespace trisplat {

// One triangle facelet. Vertices are the canonical parameters; the
// barycenter and the barycenter-to-vertex offsets are always derived.
struct TrianglePrimitive {
    Vec3 vertices[3];
    double opacity_param = 0.0;       // squashed to (0,1) by sigmoid
    std::vector<double> sh;           // [basis][channel], 3*(deg+1)^2 entries
};

inline Vec3 barycenter(const TrianglePrimitive& p) {
    return (p.vertices[0] + p.vertices[1] + p.vertices[2]) / 3.0;
}

inline double squash_opacity(double param) { return sigmoid(param); }
inline double unsquash_opacity(double opacity) { return logit(opacity); }

// The primitive soup plus the handful of globals every stage reads.
// Structure-of-arrays; immutable during a render/backward pass.
class SceneModel {
public:
    int sh_degree = 0;
    double gamma = 1.0;           // shared falloff sharpness, >= 1
    double scene_extent = 1.0;    // bounding-sphere radius of the init cloud

    size_t size() const { return opacity_param_.size(); }
    bool empty() const { return opacity_param_.empty(); }
    int sh_coeffs_per_prim() const { return 3 * sh_basis_count(sh_degree); }

    void reserve(size_t n) {
        vertices_.reserve(3 * n);
        opacity_param_.reserve(n);
        sh_.reserve(n * sh_coeffs_per_prim());
    }

    void add(const TrianglePrimitive& p) {
        if (static_cast<int>(p.sh.size()) != sh_coeffs_per_prim())
            throw std::invalid_argument("primitive sh size does not match scene degree");
        vertices_.push_back(p.vertices[0]);
        vertices_.push_back(p.vertices[1]);
        vertices_.push_back(p.vertices[2]);
        opacity_param_.push_back(p.opacity_param);
        sh_.insert(sh_.end(), p.sh.begin(), p.sh.end());
    }

    TrianglePrimitive primitive(size_t i) const {
        TrianglePrimitive p;
        p.vertices[0] = vertices_[3 * i];
        p.vertices[1] = vertices_[3 * i + 1];
        p.vertices[2] = vertices_[3 * i + 2];
        p.opacity_param = opacity_param_[i];
        const int nc = sh_coeffs_per_prim();
        p.sh.assign(sh_.begin() + i * nc, sh_.begin() + (i + 1) * nc);
        return p;
    }

    Vec3& vertex(size_t prim, int corner) { return vertices_[3 * prim + corner]; }
    Vec3 vertex(size_t prim, int corner) const { return vertices_[3 * prim + corner]; }
    Vec3 barycenter(size_t prim) const {
        return (vertices_[3 * prim] + vertices_[3 * prim + 1] + vertices_[3 * prim + 2]) / 3.0;
    }
    double& opacity_param(size_t prim) { return opacity_param_[prim]; }
    double opacity_param(size_t prim) const { return opacity_param_[prim]; }
    double opacity(size_t prim) const { return squash_opacity(opacity_param_[prim]); }
    double* sh(size_t prim) { return sh_.data() + prim * sh_coeffs_per_prim(); }
    const double* sh(size_t prim) const { return sh_.data() + prim * sh_coeffs_per_prim(); }

    std::vector<Vec3>& vertex_data() { return vertices_; }
    const std::vector<Vec3>& vertex_data() const { return vertices_; }
    std::vector<double>& opacity_data() { return opacity_param_; }
    const std::vector<double>& opacity_data() const { return opacity_param_; }
    std::vector<double>& sh_data() { return sh_; }
    const std::vector<double>& sh_data() const { return sh_; }

    // Keeps primitives whose mask entry is true; preserves order.
    void keep(const std::vector<uint8_t>& mask) {
        const int nc = sh_coeffs_per_prim();
        size_t out = 0;
        for (size_t i = 0; i < size(); ++i) {
            if (!mask[i]) continue;
            if (out != i) {
                for (int k = 0; k < 3; ++k) vertices_[3 * out + k] = vertices_[3 * i + k];
                opacity_param_[out] = opacity_param_[i];
                for (int k = 0; k < nc; ++k) sh_[out * nc + k] = sh_[i * nc + k];
            }
            ++out;
        }
        vertices_.resize(3 * out);
        opacity_param_.resize(out);
        sh_.resize(out * nc);
    }

    bool operator==(const SceneModel& o) const = default;

private:
    std::vector<Vec3> vertices_;       // 3 per primitive
    std::vector<double> opacity_param_;
    std::vector<double> sh_;
};

// Everything the renderer produces for one view. Planar buffers.
// `normal` is the normalized blend (rows unit or zero); `normal_raw` keeps
// the pre-normalization area-weighted sum for consumers that differentiate
// through the blend.
struct RenderOutput {
    Image color;        // 3 x H x W, background composited
    Image depth;        // 1 x H x W, alpha-weighted view depth, no normalization
    Image normal;       // 3 x H x W
    Image normal_raw;   // 3 x H x W
    Image alpha;        // 1 x H x W
    std::vector<int32_t> contrib_count;  // H*W

    int height() const { return color.height(); }
    int width() const { return color.width(); }
};

// Gradients wrt every scene parameter, congruent with SceneModel storage.
struct ParamGrads {
    std::vector<Vec3> d_vertices;       // 3 per primitive
    std::vector<double> d_opacity_param;
    std::vector<double> d_sh;

    void resize_for(const SceneModel& scene) {
        d_vertices.assign(3 * scene.size(), Vec3{});
        d_opacity_param.assign(scene.size(), 0.0);
        d_sh.assign(scene.sh_data().size(), 0.0);
    }
};

}  // namespace trisplat
