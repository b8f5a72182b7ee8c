#include "trisplat/io/ply.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace trisplat {
namespace {

int type_size(const std::string& t) {
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" ||
        t == "float32")
        return 4;
    if (t == "double" || t == "float64") return 8;
    return -1;
}

double parse_binary(const char* p, const std::string& t) {
    if (t == "float" || t == "float32") {
        float v;
        std::memcpy(&v, p, 4);
        return v;
    }
    if (t == "double" || t == "float64") {
        double v;
        std::memcpy(&v, p, 8);
        return v;
    }
    if (t == "uchar" || t == "uint8") return static_cast<unsigned char>(*p);
    if (t == "char" || t == "int8") return static_cast<signed char>(*p);
    if (t == "ushort" || t == "uint16") {
        uint16_t v;
        std::memcpy(&v, p, 2);
        return v;
    }
    if (t == "short" || t == "int16") {
        int16_t v;
        std::memcpy(&v, p, 2);
        return v;
    }
    if (t == "uint" || t == "uint32") {
        uint32_t v;
        std::memcpy(&v, p, 4);
        return v;
    }
    int32_t v;
    std::memcpy(&v, p, 4);
    return v;
}

}  // namespace

PointCloud load_point_cloud_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("ply: cannot open " + path);

    std::string line;
    if (!std::getline(in, line) || line.substr(0, 3) != "ply")
        throw std::runtime_error("ply: missing magic in " + path);

    bool binary = false;
    size_t vertex_count = 0;
    struct Prop {
        std::string type, name;
    };
    std::vector<Prop> props;
    bool in_vertex_element = false;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "comment" || tok == "obj_info" || tok.empty()) continue;
        if (tok == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "binary_little_endian")
                binary = true;
            else if (fmt != "ascii")
                throw std::runtime_error("ply: unsupported format " + fmt);
        } else if (tok == "element") {
            std::string name;
            size_t count;
            ls >> name >> count;
            in_vertex_element = (name == "vertex");
            if (in_vertex_element) vertex_count = count;
            else if (count > 0 && props.empty())
                throw std::runtime_error("ply: element before vertex not supported");
        } else if (tok == "property") {
            if (!in_vertex_element) continue;
            std::string type;
            ls >> type;
            if (type == "list") throw std::runtime_error("ply: list property in vertex element");
            std::string name;
            ls >> name;
            if (type_size(type) < 0) throw std::runtime_error("ply: unknown type " + type);
            props.push_back({type, name});
        } else if (tok == "end_header") {
            header_done = true;
            break;
        } else {
            throw std::runtime_error("ply: unexpected header token '" + tok + "'");
        }
    }
    if (!header_done) throw std::runtime_error("ply: truncated header in " + path);
    if (vertex_count == 0) throw std::runtime_error("ply: no vertices in " + path);

    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
    int stride = 0;
    std::vector<int> offsets(props.size());
    for (size_t i = 0; i < props.size(); ++i) {
        offsets[i] = stride;
        stride += type_size(props[i].type);
        if (props[i].name == "x") ix = static_cast<int>(i);
        if (props[i].name == "y") iy = static_cast<int>(i);
        if (props[i].name == "z") iz = static_cast<int>(i);
        if (props[i].name == "red") ir = static_cast<int>(i);
        if (props[i].name == "green") ig = static_cast<int>(i);
        if (props[i].name == "blue") ib = static_cast<int>(i);
    }
    if (ix < 0 || iy < 0 || iz < 0) throw std::runtime_error("ply: missing x/y/z in " + path);
    const bool has_color = ir >= 0 && ig >= 0 && ib >= 0;

    PointCloud pc;
    pc.points.reserve(vertex_count);
    pc.colors.reserve(vertex_count);
    auto color_scale = [&](int prop_idx, double v) {
        return type_size(props[prop_idx].type) == 1 ? v / 255.0 : v;
    };

    if (binary) {
        std::vector<char> row(stride);
        for (size_t i = 0; i < vertex_count; ++i) {
            if (!in.read(row.data(), stride))
                throw std::runtime_error("ply: truncated vertex data in " + path);
            pc.points.push_back({parse_binary(row.data() + offsets[ix], props[ix].type),
                                 parse_binary(row.data() + offsets[iy], props[iy].type),
                                 parse_binary(row.data() + offsets[iz], props[iz].type)});
            if (has_color)
                pc.colors.push_back(
                    {color_scale(ir, parse_binary(row.data() + offsets[ir], props[ir].type)),
                     color_scale(ig, parse_binary(row.data() + offsets[ig], props[ig].type)),
                     color_scale(ib, parse_binary(row.data() + offsets[ib], props[ib].type))});
            else
                pc.colors.push_back({0.5, 0.5, 0.5});
        }
    } else {
        std::vector<double> vals(props.size());
        for (size_t i = 0; i < vertex_count; ++i) {
            for (size_t p = 0; p < props.size(); ++p)
                if (!(in >> vals[p]))
                    throw std::runtime_error("ply: truncated vertex data in " + path);
            pc.points.push_back({vals[ix], vals[iy], vals[iz]});
            if (has_color)
                pc.colors.push_back({color_scale(ir, vals[ir]), color_scale(ig, vals[ig]),
                                     color_scale(ib, vals[ib])});
            else
                pc.colors.push_back({0.5, 0.5, 0.5});
        }
    }
    return pc;
}

}  // namespace trisplat
