#include "gtt/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gtt {

static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_text(ss.str(), path);
}

KeyValueFile KeyValueFile::parse_text(const std::string& text, const std::string& origin) {
    KeyValueFile kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
        kv.set(key, value);
    }
    return kv;
}

std::string KeyValueFile::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("config: missing key '" + key + "'");
    return it->second;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& def) const {
    const auto it = values_.find(key);
    return it == values_.end() ? def : it->second;
}

double KeyValueFile::get_double(const std::string& key) const {
    const std::string s = get_string(key);
    size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' is not a number: " + s);
    }
    if (pos != s.size())
        throw std::runtime_error("config: key '" + key + "' is not a number: " + s);
    return v;
}

double KeyValueFile::get_double(const std::string& key, double def) const {
    return has(key) ? get_double(key) : def;
}

long KeyValueFile::get_int(const std::string& key) const {
    const std::string s = get_string(key);
    size_t pos = 0;
    long v;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' is not an integer: " + s);
    }
    if (pos != s.size())
        throw std::runtime_error("config: key '" + key + "' is not an integer: " + s);
    return v;
}

long KeyValueFile::get_int(const std::string& key, long def) const {
    return has(key) ? get_int(key) : def;
}

bool KeyValueFile::get_bool(const std::string& key) const {
    const std::string s = get_string(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::runtime_error("config: key '" + key + "' is not a bool: " + s);
}

bool KeyValueFile::get_bool(const std::string& key, bool def) const {
    return has(key) ? get_bool(key) : def;
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
    if (!values_.count(key)) order_.push_back(key);
    values_[key] = value;
}

void KeyValueFile::set(const std::string& key, double value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    set(key, os.str());
}

void KeyValueFile::set(const std::string& key, long value) { set(key, std::to_string(value)); }

void KeyValueFile::set(const std::string& key, bool value) {
    set(key, std::string(value ? "true" : "false"));
}

std::string KeyValueFile::to_text() const {
    std::ostringstream os;
    for (const auto& k : order_) os << k << " = " << values_.at(k) << "\n";
    return os.str();
}

void KeyValueFile::write_file(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("config: cannot write " + path);
    f << to_text();
}

} // namespace gtt
