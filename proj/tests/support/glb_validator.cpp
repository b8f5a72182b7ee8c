// Standalone GLB structural validator used by the tests. Parses the binary
// container and the glTF JSON independently of the production writer/reader
// and reports every violation it finds.

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace trisplat::testing {

using nlohmann::json;

namespace {

struct Ctx {
    std::vector<std::string> errors;
    void fail(const std::string& msg) { errors.push_back(msg); }
};

size_t component_size(int type) {
    switch (type) {
        case 5120:
        case 5121:
            return 1;
        case 5122:
        case 5123:
            return 2;
        case 5125:
        case 5126:
            return 4;
        default:
            return 0;
    }
}

size_t type_components(const std::string& t) {
    if (t == "SCALAR") return 1;
    if (t == "VEC2") return 2;
    if (t == "VEC3") return 3;
    if (t == "VEC4") return 4;
    if (t == "MAT4") return 16;
    return 0;
}

}  // namespace

std::vector<std::string> validate_glb(const std::string& path) {
    Ctx ctx;
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        ctx.fail("cannot open file");
        return ctx.errors;
    }
    std::string data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    auto u32 = [&](size_t off) -> uint32_t {
        uint32_t v = 0;
        if (off + 4 <= data.size()) std::memcpy(&v, data.data() + off, 4);
        return v;
    };
    if (data.size() < 12) {
        ctx.fail("file shorter than GLB header");
        return ctx.errors;
    }
    if (u32(0) != 0x46546C67) ctx.fail("bad magic");
    if (u32(4) != 2) ctx.fail("container version is not 2");
    if (u32(8) != data.size()) ctx.fail("declared length != file size");

    json j;
    std::string bin;
    bool saw_json = false;
    size_t off = 12;
    bool first_chunk = true;
    while (off + 8 <= data.size()) {
        const uint32_t len = u32(off), type = u32(off + 4);
        if (len % 4 != 0) ctx.fail("chunk length not 4-byte aligned");
        if (off + 8 + len > data.size()) {
            ctx.fail("chunk exceeds file");
            return ctx.errors;
        }
        if (type == 0x4E4F534A) {
            if (!first_chunk && !saw_json) ctx.fail("JSON chunk is not first");
            saw_json = true;
            try {
                j = json::parse(data.substr(off + 8, len));
            } catch (const std::exception& e) {
                ctx.fail(std::string("JSON parse error: ") + e.what());
                return ctx.errors;
            }
        } else if (type == 0x004E4942) {
            bin = data.substr(off + 8, len);
        } else {
            ctx.fail("unknown chunk type");
        }
        if (first_chunk && type != 0x4E4F534A) ctx.fail("first chunk must be JSON");
        first_chunk = false;
        off += 8 + len;
    }
    if (off != data.size()) ctx.fail("trailing bytes after last chunk");
    if (!saw_json) {
        ctx.fail("missing JSON chunk");
        return ctx.errors;
    }

    if (!j.contains("asset") || j["asset"].value("version", "") != "2.0")
        ctx.fail("asset.version must be \"2.0\"");

    // Buffers.
    size_t buffer_len = 0;
    if (!j.contains("buffers") || j["buffers"].size() != 1) {
        ctx.fail("expected exactly one buffer");
    } else {
        buffer_len = j["buffers"][0].value("byteLength", size_t{0});
        if (j["buffers"][0].contains("uri")) ctx.fail("GLB buffer 0 must not have a uri");
        if (buffer_len > bin.size()) ctx.fail("buffer byteLength exceeds BIN chunk");
        if (bin.size() > buffer_len + 3) ctx.fail("BIN chunk padding exceeds 3 bytes");
    }

    // Buffer views.
    const json views = j.value("bufferViews", json::array());
    for (size_t i = 0; i < views.size(); ++i) {
        const json& bv = views[i];
        const size_t o = bv.value("byteOffset", size_t{0});
        const size_t l = bv.value("byteLength", size_t{0});
        if (o + l > buffer_len) ctx.fail("bufferView " + std::to_string(i) + " out of bounds");
    }

    // Accessors.
    const json accessors = j.value("accessors", json::array());
    for (size_t i = 0; i < accessors.size(); ++i) {
        const json& acc = accessors[i];
        const size_t csize = component_size(acc.value("componentType", 0));
        const size_t comps = type_components(acc.value("type", ""));
        if (csize == 0) ctx.fail("accessor " + std::to_string(i) + ": bad componentType");
        if (comps == 0) ctx.fail("accessor " + std::to_string(i) + ": bad type");
        if (!acc.contains("count") || acc["count"].get<size_t>() == 0)
            ctx.fail("accessor " + std::to_string(i) + ": missing/zero count");
        if (!acc.contains("bufferView")) continue;
        const size_t bv_idx = acc["bufferView"].get<size_t>();
        if (bv_idx >= views.size()) {
            ctx.fail("accessor " + std::to_string(i) + ": bufferView out of range");
            continue;
        }
        const json& bv = views[bv_idx];
        const size_t elem = csize * comps;
        const size_t stride = bv.value("byteStride", elem);
        const size_t count = acc.value("count", size_t{0});
        const size_t acc_off = acc.value("byteOffset", size_t{0});
        const size_t need = count ? acc_off + stride * (count - 1) + elem : 0;
        if (need > bv.value("byteLength", size_t{0}))
            ctx.fail("accessor " + std::to_string(i) + ": data exceeds bufferView");
        const size_t total_off = acc_off + bv.value("byteOffset", size_t{0});
        if (csize && total_off % csize != 0)
            ctx.fail("accessor " + std::to_string(i) + ": offset not aligned to component size");
    }

    // Mesh primitives.
    if (!j.contains("meshes") || j["meshes"].empty()) {
        ctx.fail("no meshes");
        return ctx.errors;
    }
    for (const json& mesh : j["meshes"]) {
        for (const json& prim : mesh.value("primitives", json::array())) {
            if (prim.value("mode", 4) != 4) ctx.fail("primitive mode is not TRIANGLES");
            if (!prim.contains("attributes") || !prim["attributes"].contains("POSITION")) {
                ctx.fail("primitive missing POSITION");
                continue;
            }
            std::set<size_t> counts;
            for (const auto& [name, idx] : prim["attributes"].items()) {
                const size_t ai = idx.get<size_t>();
                if (ai >= accessors.size()) {
                    ctx.fail("attribute " + name + ": accessor out of range");
                    continue;
                }
                const json& acc = accessors[ai];
                counts.insert(acc.value("count", size_t{0}));
                // Vertex attribute data must be 4-byte aligned per element.
                const size_t elem =
                    component_size(acc.value("componentType", 0)) *
                    type_components(acc.value("type", ""));
                size_t stride = elem;
                if (acc.contains("bufferView")) {
                    const json& bv = views[acc["bufferView"].get<size_t>()];
                    stride = bv.value("byteStride", elem);
                    const size_t total_off =
                        acc.value("byteOffset", size_t{0}) + bv.value("byteOffset", size_t{0});
                    if (total_off % 4 != 0)
                        ctx.fail("attribute " + name + ": offset not 4-byte aligned");
                }
                if (stride % 4 != 0)
                    ctx.fail("attribute " + name + ": effective stride not multiple of 4");
                if (name == "POSITION") {
                    if (acc.value("componentType", 0) != 5126 || acc.value("type", "") != "VEC3")
                        ctx.fail("POSITION must be float VEC3");
                    if (!acc.contains("min") || !acc.contains("max"))
                        ctx.fail("POSITION accessor needs min/max");
                    else {
                        // Verify min/max against the actual data.
                        const json& bv = views[acc["bufferView"].get<size_t>()];
                        const size_t base =
                            bv.value("byteOffset", size_t{0}) + acc.value("byteOffset", size_t{0});
                        const size_t n = acc.value("count", size_t{0});
                        float mn[3] = {std::numeric_limits<float>::max(),
                                       std::numeric_limits<float>::max(),
                                       std::numeric_limits<float>::max()};
                        float mx[3] = {std::numeric_limits<float>::lowest(),
                                       std::numeric_limits<float>::lowest(),
                                       std::numeric_limits<float>::lowest()};
                        bool finite = true;
                        for (size_t v = 0; v < n; ++v) {
                            float f[3];
                            std::memcpy(f, bin.data() + base + 12 * v, 12);
                            for (int c = 0; c < 3; ++c) {
                                if (!std::isfinite(f[c])) finite = false;
                                mn[c] = std::min(mn[c], f[c]);
                                mx[c] = std::max(mx[c], f[c]);
                            }
                        }
                        if (!finite) ctx.fail("POSITION contains non-finite values");
                        for (int c = 0; c < 3; ++c) {
                            if (std::fabs(acc["min"][c].get<double>() - mn[c]) > 1e-6)
                                ctx.fail("POSITION min does not match data");
                            if (std::fabs(acc["max"][c].get<double>() - mx[c]) > 1e-6)
                                ctx.fail("POSITION max does not match data");
                        }
                    }
                }
                if (name.rfind("COLOR_", 0) == 0) {
                    const int ct = acc.value("componentType", 0);
                    const std::string t = acc.value("type", "");
                    if (t != "VEC3" && t != "VEC4") ctx.fail("COLOR_0 must be VEC3/VEC4");
                    if (ct != 5126 && !acc.value("normalized", false))
                        ctx.fail("integer COLOR_0 must be normalized");
                }
            }
            if (counts.size() > 1) ctx.fail("attribute accessors disagree on count");
            if (!prim.contains("indices") && !counts.empty() && *counts.begin() % 3 != 0)
                ctx.fail("unindexed vertex count not divisible by 3");
        }
    }

    // Scene graph sanity.
    if (j.contains("scene")) {
        const size_t s = j["scene"].get<size_t>();
        if (!j.contains("scenes") || s >= j["scenes"].size()) ctx.fail("scene index out of range");
    }
    if (j.contains("nodes")) {
        for (const json& node : j["nodes"]) {
            if (node.contains("mesh") && node["mesh"].get<size_t>() >= j["meshes"].size())
                ctx.fail("node mesh index out of range");
        }
    }
    return ctx.errors;
}

}  // namespace trisplat::testing
