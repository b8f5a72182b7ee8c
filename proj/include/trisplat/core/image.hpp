#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "trisplat/core/vec.hpp"

namespace trisplat {

// Planar image buffer: `channels` planes of h*w doubles, plane-contiguous so
// row kernels can run on unit-stride data.
class Image {
public:
    Image() = default;
    Image(int height, int width, int channels, double fill = 0.0)
        : h_(height), w_(width), c_(channels),
          data_(static_cast<size_t>(height) * width * channels, fill) {}

    int height() const { return h_; }
    int width() const { return w_; }
    int channels() const { return c_; }
    size_t pixel_count() const { return static_cast<size_t>(h_) * w_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double* plane(int c) { return data_.data() + static_cast<size_t>(c) * h_ * w_; }
    const double* plane(int c) const { return data_.data() + static_cast<size_t>(c) * h_ * w_; }
    double* row(int c, int y) { return plane(c) + static_cast<size_t>(y) * w_; }
    const double* row(int c, int y) const { return plane(c) + static_cast<size_t>(y) * w_; }

    double& at(int c, int y, int x) { return plane(c)[static_cast<size_t>(y) * w_ + x]; }
    double at(int c, int y, int x) const { return plane(c)[static_cast<size_t>(y) * w_ + x]; }

    Vec3 rgb(int y, int x) const { return {at(0, y, x), at(1, y, x), at(2, y, x)}; }
    void set_rgb(int y, int x, Vec3 v) {
        at(0, y, x) = v.x;
        at(1, y, x) = v.y;
        at(2, y, x) = v.z;
    }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const Image& o) const { return h_ == o.h_ && w_ == o.w_ && c_ == o.c_; }

    void require_shape(const Image& o, const char* what) const {
        if (!same_shape(o)) throw std::invalid_argument(std::string(what) + ": image shape mismatch");
    }

    bool operator==(const Image& o) const = default;

private:
    int h_ = 0, w_ = 0, c_ = 0;
    std::vector<double> data_;
};

}  // namespace trisplat
