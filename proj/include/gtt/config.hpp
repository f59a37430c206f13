#ifndef GTT_CONFIG_HPP
#define GTT_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

namespace gtt {

// Flat key=value config with '#' comments. Used for run configs, motion
// model files and resolved-config snapshots; diff-friendly on purpose.
class KeyValueFile {
public:
    KeyValueFile() = default;

    static KeyValueFile parse_file(const std::string& path);
    // Parse errors carry 1-based line numbers.
    static KeyValueFile parse_text(const std::string& text,
                                   const std::string& origin = "<string>");

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double def) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long def) const;
    bool get_bool(const std::string& key) const;
    bool get_bool(const std::string& key, bool def) const;

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, long value);
    void set(const std::string& key, bool value);

    // Serialized in insertion order so snapshots diff cleanly.
    std::string to_text() const;
    void write_file(const std::string& path) const;

    const std::vector<std::string>& keys() const { return order_; }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

} // namespace gtt

#endif
