#pragma once

#include "trisplat/core/image.hpp"
#include "trisplat/raster/forward.hpp"

namespace trisplat {

// dL/d(RenderOutput buffers); empty images are treated as zero. Note the
// normal slot differentiates the *pre-normalization* blend; see
// normalize_backward for losses defined on unit normals.
struct PixelGrads {
    Image color;       // 3 x H x W
    Image depth;       // 1 x H x W
    Image normal_raw;  // 3 x H x W
    Image alpha;       // 1 x H x W
};

// Jacobian of x -> x/|x| (zero for |x| < kNormalizeEps), applied per pixel:
// converts a gradient wrt the unit normal buffer into one wrt normal_raw.
Image normalize_backward(const Image& raw, const Image& d_unit);

// Exact analytic gradient of sum(pixel_grads . RenderOutput) wrt every scene
// parameter. `records` must come from a training-mode forward pass over the
// identical scene and camera, else this throws.
ParamGrads render_backward(const SceneModel& scene, const FrameRecords& records,
                           const PixelGrads& pixel_grads);

}  // namespace trisplat
