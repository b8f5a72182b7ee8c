#pragma once

#include <map>
#include <string>
#include <vector>

#include "trisplat/core/vec.hpp"

namespace trisplat {

// Flat key = value config file (TOML-compatible subset: strings, numbers,
// booleans, [x, y, z] number arrays, # comments).
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    Vec3 get_vec3(const std::string& key, Vec3 fallback) const;

    // Keys present in the file but never queried (typo guard).
    std::vector<std::string> unused_keys() const;

private:
    struct Value {
        std::string raw;
        mutable bool used = false;
    };
    std::map<std::string, Value> values_;
};

}  // namespace trisplat
