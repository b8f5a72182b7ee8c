#include "trisplat/io/gltf.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "trisplat/core/math.hpp"
#include "trisplat/scene/sh.hpp"

namespace trisplat {

using nlohmann::json;

TriMesh scene_to_mesh(const SceneModel& scene) {
    TriMesh mesh;
    mesh.positions.reserve(3 * scene.size());
    mesh.face_colors.reserve(scene.size());
    for (size_t i = 0; i < scene.size(); ++i) {
        for (int k = 0; k < 3; ++k) mesh.positions.push_back(scene.vertex(i, k));
        const Vec3 c = sh_eval_color(0, scene.sh(i), Vec3{0, 0, 1});
        mesh.face_colors.push_back({clamp(c.x, 0.0, 1.0), clamp(c.y, 0.0, 1.0), clamp(c.z, 0.0, 1.0)});
    }
    return mesh;
}

namespace {

constexpr uint32_t kGlbMagic = 0x46546C67;   // "glTF"
constexpr uint32_t kChunkJson = 0x4E4F534A;  // "JSON"
constexpr uint32_t kChunkBin = 0x004E4942;   // "BIN\0"

void append_u32(std::string& buf, uint32_t v) {
    char b[4];
    std::memcpy(b, &v, 4);
    buf.append(b, 4);
}

}  // namespace

void export_glb(const TriMesh& mesh, const std::string& path) {
    if (mesh.empty()) throw std::invalid_argument("export_glb: empty mesh");
    const size_t nv = mesh.positions.size();

    std::string bin;
    bin.reserve(nv * 16 + 8);
    float mn[3] = {std::numeric_limits<float>::max(), std::numeric_limits<float>::max(),
                   std::numeric_limits<float>::max()};
    float mx[3] = {std::numeric_limits<float>::lowest(), std::numeric_limits<float>::lowest(),
                   std::numeric_limits<float>::lowest()};
    for (const Vec3& p : mesh.positions) {
        const float f[3] = {static_cast<float>(p.x), static_cast<float>(p.y),
                            static_cast<float>(p.z)};
        for (int c = 0; c < 3; ++c) {
            mn[c] = std::min(mn[c], f[c]);
            mx[c] = std::max(mx[c], f[c]);
        }
        bin.append(reinterpret_cast<const char*>(f), 12);
    }
    const size_t pos_bytes = bin.size();
    while (bin.size() % 4) bin.push_back('\0');
    const size_t color_offset = bin.size();
    for (size_t f = 0; f < mesh.face_count(); ++f) {
        const Vec3 c = mesh.face_colors[f];
        const unsigned char rgba[4] = {
            static_cast<unsigned char>(std::lround(clamp(c.x, 0.0, 1.0) * 255.0)),
            static_cast<unsigned char>(std::lround(clamp(c.y, 0.0, 1.0) * 255.0)),
            static_cast<unsigned char>(std::lround(clamp(c.z, 0.0, 1.0) * 255.0)), 255};
        for (int k = 0; k < 3; ++k) bin.append(reinterpret_cast<const char*>(rgba), 4);
    }
    const size_t color_bytes = bin.size() - color_offset;
    while (bin.size() % 4) bin.push_back('\0');

    json j;
    j["asset"] = {{"version", "2.0"}, {"generator", "trisplat"}};
    j["buffers"] = json::array({{{"byteLength", bin.size()}}});
    j["bufferViews"] = json::array(
        {{{"buffer", 0}, {"byteOffset", 0}, {"byteLength", pos_bytes}, {"target", 34962}},
         {{"buffer", 0}, {"byteOffset", color_offset}, {"byteLength", color_bytes}, {"target", 34962}}});
    j["accessors"] = json::array(
        {{{"bufferView", 0},
          {"byteOffset", 0},
          {"componentType", 5126},
          {"count", nv},
          {"type", "VEC3"},
          {"min", json::array({mn[0], mn[1], mn[2]})},
          {"max", json::array({mx[0], mx[1], mx[2]})}},
         {{"bufferView", 1},
          {"byteOffset", 0},
          {"componentType", 5121},
          {"normalized", true},
          {"count", nv},
          {"type", "VEC4"}}});
    j["meshes"] = json::array(
        {{{"primitives",
           json::array({{{"attributes", {{"POSITION", 0}, {"COLOR_0", 1}}}, {"mode", 4}}})}}});
    j["nodes"] = json::array({{{"mesh", 0}}});
    j["scenes"] = json::array({{{"nodes", json::array({0})}}});
    j["scene"] = 0;

    std::string jtxt = j.dump();
    while (jtxt.size() % 4) jtxt.push_back(' ');

    std::string out;
    append_u32(out, kGlbMagic);
    append_u32(out, 2);
    append_u32(out, static_cast<uint32_t>(12 + 8 + jtxt.size() + 8 + bin.size()));
    append_u32(out, static_cast<uint32_t>(jtxt.size()));
    append_u32(out, kChunkJson);
    out += jtxt;
    append_u32(out, static_cast<uint32_t>(bin.size()));
    append_u32(out, kChunkBin);
    out += bin;

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("export_glb: cannot open " + path);
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw std::runtime_error("export_glb: write failed for " + path);
}

void export_glb(const SceneModel& scene, const std::string& path) {
    if (scene.empty()) throw std::invalid_argument("export_glb: empty scene");
    export_glb(scene_to_mesh(scene), path);
}

namespace {

struct GlbChunks {
    json j;
    std::string bin;
};

GlbChunks read_glb(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("import_glb: cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    auto u32 = [&](size_t off) {
        if (off + 4 > data.size()) throw std::runtime_error("import_glb: truncated " + path);
        uint32_t v;
        std::memcpy(&v, data.data() + off, 4);
        return v;
    };
    if (u32(0) != kGlbMagic || u32(4) != 2) throw std::runtime_error("import_glb: bad header");
    GlbChunks out;
    size_t off = 12;
    while (off + 8 <= data.size()) {
        const uint32_t len = u32(off), type = u32(off + 4);
        if (off + 8 + len > data.size()) throw std::runtime_error("import_glb: truncated chunk");
        if (type == kChunkJson) out.j = json::parse(data.substr(off + 8, len));
        if (type == kChunkBin) out.bin = data.substr(off + 8, len);
        off += 8 + len;
    }
    if (out.j.is_null()) throw std::runtime_error("import_glb: missing JSON chunk");
    return out;
}

const unsigned char* accessor_base(const GlbChunks& g, const json& acc, size_t elem_size,
                                   size_t count) {
    const json& bv = g.j.at("bufferViews").at(acc.at("bufferView").get<size_t>());
    const size_t off = bv.value("byteOffset", size_t{0}) + acc.value("byteOffset", size_t{0});
    if (bv.contains("byteStride") && bv["byteStride"].get<size_t>() != elem_size)
        throw std::runtime_error("import_glb: interleaved buffer views unsupported");
    if (off + elem_size * count > g.bin.size())
        throw std::runtime_error("import_glb: accessor out of bounds");
    return reinterpret_cast<const unsigned char*>(g.bin.data()) + off;
}

}  // namespace

TriMesh import_glb(const std::string& path) {
    GlbChunks g = read_glb(path);
    const json& prim = g.j.at("meshes").at(0).at("primitives").at(0);
    if (prim.value("mode", 4) != 4) throw std::runtime_error("import_glb: not a triangle mesh");

    const json& accessors = g.j.at("accessors");
    const json& pos_acc = accessors.at(prim.at("attributes").at("POSITION").get<size_t>());
    if (pos_acc.at("componentType") != 5126 || pos_acc.at("type") != "VEC3")
        throw std::runtime_error("import_glb: POSITION must be float VEC3");
    const size_t nv = pos_acc.at("count").get<size_t>();
    const unsigned char* pbase = accessor_base(g, pos_acc, 12, nv);
    std::vector<Vec3> verts(nv);
    for (size_t i = 0; i < nv; ++i) {
        float f[3];
        std::memcpy(f, pbase + 12 * i, 12);
        verts[i] = {f[0], f[1], f[2]};
    }

    std::vector<Vec3> vcolors(nv, Vec3{0.5, 0.5, 0.5});
    if (prim.at("attributes").contains("COLOR_0")) {
        const json& cacc = accessors.at(prim.at("attributes").at("COLOR_0").get<size_t>());
        const size_t comps = cacc.at("type") == "VEC4" ? 4 : 3;
        const size_t ct = cacc.at("componentType").get<size_t>();
        const size_t csize = ct == 5126 ? 4 : (ct == 5123 ? 2 : 1);
        const unsigned char* cbase = accessor_base(g, cacc, comps * csize, nv);
        for (size_t i = 0; i < nv; ++i) {
            double rgb[3];
            for (int c = 0; c < 3; ++c) {
                const unsigned char* p = cbase + (comps * i + c) * csize;
                if (ct == 5126) {
                    float f;
                    std::memcpy(&f, p, 4);
                    rgb[c] = f;
                } else if (ct == 5123) {
                    uint16_t v;
                    std::memcpy(&v, p, 2);
                    rgb[c] = v / 65535.0;
                } else {
                    rgb[c] = *p / 255.0;
                }
            }
            vcolors[i] = {rgb[0], rgb[1], rgb[2]};
        }
    }

    std::vector<uint32_t> indices;
    if (prim.contains("indices")) {
        const json& iacc = accessors.at(prim.at("indices").get<size_t>());
        const size_t n = iacc.at("count").get<size_t>();
        const size_t ct = iacc.at("componentType").get<size_t>();
        const size_t isize = ct == 5125 ? 4 : (ct == 5123 ? 2 : 1);
        const unsigned char* ibase = accessor_base(g, iacc, isize, n);
        indices.resize(n);
        for (size_t i = 0; i < n; ++i) {
            if (isize == 4) {
                uint32_t v;
                std::memcpy(&v, ibase + 4 * i, 4);
                indices[i] = v;
            } else if (isize == 2) {
                uint16_t v;
                std::memcpy(&v, ibase + 2 * i, 2);
                indices[i] = v;
            } else {
                indices[i] = ibase[i];
            }
        }
    } else {
        indices.resize(nv);
        for (size_t i = 0; i < nv; ++i) indices[i] = static_cast<uint32_t>(i);
    }
    if (indices.size() % 3) throw std::runtime_error("import_glb: index count not divisible by 3");

    TriMesh mesh;
    mesh.positions.reserve(indices.size());
    mesh.face_colors.reserve(indices.size() / 3);
    for (size_t f = 0; f < indices.size() / 3; ++f) {
        for (int k = 0; k < 3; ++k) {
            const uint32_t idx = indices[3 * f + k];
            if (idx >= nv) throw std::runtime_error("import_glb: index out of range");
            mesh.positions.push_back(verts[idx]);
        }
        mesh.face_colors.push_back(vcolors[indices[3 * f]]);
    }
    return mesh;
}

}  // namespace trisplat
