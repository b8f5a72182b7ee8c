#include "trisplat/train/adam.hpp"

#include <cmath>

#include "trisplat/core/parallel.hpp"

namespace trisplat {

Adam::Adam(const SceneModel& scene) {
    m_vert_.assign(9 * scene.size(), 0.0);
    v_vert_.assign(9 * scene.size(), 0.0);
    m_op_.assign(scene.size(), 0.0);
    v_op_.assign(scene.size(), 0.0);
    m_sh_.assign(scene.sh_data().size(), 0.0);
    v_sh_.assign(scene.sh_data().size(), 0.0);
}

void Adam::step(SceneModel& scene, const ParamGrads& grads, const AdamRates& rates) {
    ++t_;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    auto update = [&](double& param, double g, double& m, double& v, double lr) {
        m = kBeta1 * m + (1.0 - kBeta1) * g;
        v = kBeta2 * v + (1.0 - kBeta2) * g * g;
        const double mh = m / bc1;
        const double vh = v / bc2;
        param -= lr * mh / (std::sqrt(vh) + kEps);
    };

    const size_t n = scene.size();
    const int nc = scene.sh_coeffs_per_prim();
    parallel_for(static_cast<int64_t>(n), [&](int64_t i) {
        for (int k = 0; k < 3; ++k) {
            Vec3& vert = scene.vertex(i, k);
            const Vec3& g = grads.d_vertices[3 * i + k];
            const size_t base = 9 * i + 3 * k;
            update(vert.x, g.x, m_vert_[base + 0], v_vert_[base + 0], rates.vertices);
            update(vert.y, g.y, m_vert_[base + 1], v_vert_[base + 1], rates.vertices);
            update(vert.z, g.z, m_vert_[base + 2], v_vert_[base + 2], rates.vertices);
        }
        if (rates.opacity != 0.0)
            update(scene.opacity_param(i), grads.d_opacity_param[i], m_op_[i], v_op_[i],
                   rates.opacity);
        double* sh = scene.sh(i);
        for (int c = 0; c < nc; ++c) {
            const double lr = c < 3 ? rates.sh_dc : rates.sh_rest;
            update(sh[c], grads.d_sh[i * nc + c], m_sh_[i * nc + c], v_sh_[i * nc + c], lr);
        }
    });
}

void Adam::keep(const std::vector<uint8_t>& mask, int sh_coeffs_per_prim) {
    const size_t n = mask.size();
    size_t out = 0;
    for (size_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        if (out != i) {
            for (int k = 0; k < 9; ++k) {
                m_vert_[9 * out + k] = m_vert_[9 * i + k];
                v_vert_[9 * out + k] = v_vert_[9 * i + k];
            }
            m_op_[out] = m_op_[i];
            v_op_[out] = v_op_[i];
            for (int c = 0; c < sh_coeffs_per_prim; ++c) {
                m_sh_[out * sh_coeffs_per_prim + c] = m_sh_[i * sh_coeffs_per_prim + c];
                v_sh_[out * sh_coeffs_per_prim + c] = v_sh_[i * sh_coeffs_per_prim + c];
            }
        }
        ++out;
    }
    m_vert_.resize(9 * out);
    v_vert_.resize(9 * out);
    m_op_.resize(out);
    v_op_.resize(out);
    m_sh_.resize(out * sh_coeffs_per_prim);
    v_sh_.resize(out * sh_coeffs_per_prim);
}

void Adam::reset_opacity_state() {
    std::fill(m_op_.begin(), m_op_.end(), 0.0);
    std::fill(v_op_.begin(), v_op_.end(), 0.0);
}

}  // namespace trisplat
