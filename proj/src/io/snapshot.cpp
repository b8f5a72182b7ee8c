#include "trisplat/io/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace trisplat {
namespace {

constexpr char kMagic[8] = {'T', 'S', 'P', 'L', 'S', 'N', 'A', 'P'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v, const char* what) {
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
        throw std::runtime_error(std::string("snapshot: truncated reading ") + what);
}

}  // namespace

void save_snapshot(const SceneModel& scene, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("snapshot: cannot open " + path + " for writing");
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kVersion);
    write_pod(out, static_cast<int32_t>(scene.sh_degree));
    write_pod(out, scene.gamma);
    write_pod(out, scene.scene_extent);
    write_pod(out, static_cast<uint64_t>(scene.size()));
    const auto& v = scene.vertex_data();
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(Vec3)));
    out.write(reinterpret_cast<const char*>(scene.opacity_data().data()),
              static_cast<std::streamsize>(scene.opacity_data().size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(scene.sh_data().data()),
              static_cast<std::streamsize>(scene.sh_data().size() * sizeof(double)));
    if (!out) throw std::runtime_error("snapshot: write failed for " + path);
}

SceneModel load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open " + path);
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("snapshot: bad magic in " + path);
    uint32_t version;
    read_pod(in, version, "version");
    if (version != kVersion)
        throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));
    SceneModel scene;
    int32_t degree;
    read_pod(in, degree, "sh_degree");
    if (degree < 0 || degree > 3) throw std::runtime_error("snapshot: invalid sh degree");
    scene.sh_degree = degree;
    read_pod(in, scene.gamma, "gamma");
    read_pod(in, scene.scene_extent, "scene_extent");
    uint64_t count;
    read_pod(in, count, "count");
    auto read_array = [&](auto& vec, size_t n, const char* what) {
        vec.resize(n);
        const std::streamsize bytes =
            static_cast<std::streamsize>(n * sizeof(typename std::decay_t<decltype(vec)>::value_type));
        if (!in.read(reinterpret_cast<char*>(vec.data()), bytes))
            throw std::runtime_error(std::string("snapshot: truncated reading ") + what);
    };
    read_array(scene.vertex_data(), 3 * count, "vertices");
    read_array(scene.opacity_data(), count, "opacities");
    read_array(scene.sh_data(), count * scene.sh_coeffs_per_prim(), "sh");
    return scene;
}

}  // namespace trisplat
