#include "trisplat/io/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "trisplat/core/math.hpp"

namespace trisplat {

Image load_png(const std::string& path, Vec3 background) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str()))
        throw std::runtime_error("load_png: cannot read " + path + ": " + png.message);
    png.format = PNG_FORMAT_RGBA;
    std::vector<unsigned char> raw(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, raw.data(), 0, nullptr)) {
        std::string msg = png.message;
        png_image_free(&png);
        throw std::runtime_error("load_png: decode failed for " + path + ": " + msg);
    }
    const int w = static_cast<int>(png.width), h = static_cast<int>(png.height);
    Image out(h, w, 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const unsigned char* px = raw.data() + 4 * (static_cast<size_t>(y) * w + x);
            const double a = px[3] / 255.0;
            out.at(0, y, x) = px[0] / 255.0 * a + background.x * (1.0 - a);
            out.at(1, y, x) = px[1] / 255.0 * a + background.y * (1.0 - a);
            out.at(2, y, x) = px[2] / 255.0 * a + background.z * (1.0 - a);
        }
    }
    return out;
}

void save_png(const Image& image, const std::string& path) {
    if (image.channels() != 3) throw std::invalid_argument("save_png: need 3 channels");
    const int w = image.width(), h = image.height();
    std::vector<unsigned char> raw(static_cast<size_t>(w) * h * 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            unsigned char* px = raw.data() + 3 * (static_cast<size_t>(y) * w + x);
            for (int c = 0; c < 3; ++c)
                px[c] = static_cast<unsigned char>(
                    std::lround(clamp(image.at(c, y, x), 0.0, 1.0) * 255.0));
        }
    }
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(w);
    png.height = static_cast<png_uint_32>(h);
    png.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, path.c_str(), 0, raw.data(), 0, nullptr))
        throw std::runtime_error("save_png: cannot write " + path + ": " + png.message);
}

}  // namespace trisplat
