#include "trisplat/io/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace trisplat {
namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Strips a # comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[')
            throw std::runtime_error("config: sections are not supported (line " +
                                     std::to_string(lineno) + ")");
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: expected key = value at line " +
                                     std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::runtime_error("config: empty key or value at line " +
                                     std::to_string(lineno));
        cfg.values_[key] = Value{value, false};
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    it->second.used = true;
    try {
        size_t pos = 0;
        double v = std::stod(it->second.raw, &pos);
        if (pos != it->second.raw.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' is not a number: " + it->second.raw);
    }
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    return static_cast<int>(v);
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    it->second.used = true;
    if (it->second.raw == "true") return true;
    if (it->second.raw == "false") return false;
    throw std::runtime_error("config: key '" + key + "' is not a boolean: " + it->second.raw);
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    it->second.used = true;
    std::string raw = it->second.raw;
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
        return raw.substr(1, raw.size() - 2);
    return raw;
}

Vec3 ConfigFile::get_vec3(const std::string& key, Vec3 fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    it->second.used = true;
    std::string raw = it->second.raw;
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']')
        throw std::runtime_error("config: key '" + key + "' is not a [x, y, z] array");
    raw = raw.substr(1, raw.size() - 2);
    std::replace(raw.begin(), raw.end(), ',', ' ');
    std::istringstream ss(raw);
    Vec3 v;
    if (!(ss >> v.x >> v.y >> v.z))
        throw std::runtime_error("config: key '" + key + "' needs three numbers");
    return v;
}

std::vector<std::string> ConfigFile::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!v.used) out.push_back(k);
    return out;
}

}  // namespace trisplat
