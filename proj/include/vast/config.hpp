#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vast {

/// Parse/serialize error with file position context.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sectioned key-value plain text:
///   [section]
///   key = value        # trailing comments allowed
/// Keys may repeat (used for schedule events); order is preserved so that
/// parse -> serialize -> parse is the identity.
class ConfigFile {
public:
    struct Entry {
        std::string key;
        std::string value;
        std::size_t line = 0;
    };
    struct Section {
        std::string name;
        std::vector<Entry> entries;
    };

    static ConfigFile parse(std::istream& is) {
        ConfigFile cfg;
        std::string line;
        std::size_t lineno = 0;
        Section* current = nullptr;
        while (std::getline(is, line)) {
            ++lineno;
            std::string text = strip_comment(line);
            std::string trimmed = trim(text);
            if (trimmed.empty()) continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']')
                    throw ConfigError("line " + std::to_string(lineno) +
                                      ": unterminated section header");
                std::string name = trim(trimmed.substr(1, trimmed.size() - 2));
                if (name.empty())
                    throw ConfigError("line " + std::to_string(lineno) +
                                      ": empty section name");
                cfg.sections_.push_back(Section{name, {}});
                current = &cfg.sections_.back();
                continue;
            }
            auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": expected `key = value`");
            if (!current)
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": entry outside any [section]");
            Entry e{trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)), lineno};
            if (e.key.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty key");
            current->entries.push_back(std::move(e));
        }
        return cfg;
    }

    static ConfigFile parse_string(const std::string& text) {
        std::istringstream is(text);
        return parse(is);
    }

    void serialize(std::ostream& os) const {
        for (std::size_t i = 0; i < sections_.size(); ++i) {
            if (i > 0) os << '\n';
            os << '[' << sections_[i].name << "]\n";
            for (const Entry& e : sections_[i].entries)
                os << e.key << " = " << e.value << '\n';
        }
    }

    std::string serialize() const {
        std::ostringstream os;
        serialize(os);
        return os.str();
    }

    bool has_section(const std::string& name) const { return find(name) != nullptr; }

    std::optional<std::string> get(const std::string& section,
                                   const std::string& key) const {
        const Section* s = find(section);
        if (!s) return std::nullopt;
        for (const Entry& e : s->entries)
            if (e.key == key) return e.value;
        return std::nullopt;
    }

    std::vector<std::string> get_all(const std::string& section,
                                     const std::string& key) const {
        std::vector<std::string> out;
        if (const Section* s = find(section))
            for (const Entry& e : s->entries)
                if (e.key == key) out.push_back(e.value);
        return out;
    }

    std::string require(const std::string& section, const std::string& key) const {
        auto v = get(section, key);
        if (!v)
            throw ConfigError("missing field `" + key + "` in section [" + section +
                              "]");
        return *v;
    }

    double get_double(const std::string& section, const std::string& key,
                      double fallback) const {
        auto v = get(section, key);
        return v ? parse_double(section, key, *v) : fallback;
    }

    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const {
        auto v = get(section, key);
        return v ? parse_int(section, key, *v) : fallback;
    }

    std::uint64_t get_uint(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const {
        std::int64_t v = get_int(section, key, static_cast<std::int64_t>(fallback));
        if (v < 0)
            throw ConfigError("field `" + key + "` in [" + section +
                              "] must be non-negative");
        return static_cast<std::uint64_t>(v);
    }

    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback) const {
        auto v = get(section, key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw ConfigError("field `" + key + "` in [" + section +
                          "] is not a boolean: " + *v);
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        auto v = get(section, key);
        return v ? *v : fallback;
    }

    void set(const std::string& section, const std::string& key,
             const std::string& value) {
        Section* s = find_mutable(section);
        if (!s) {
            sections_.push_back(Section{section, {}});
            s = &sections_.back();
        }
        for (Entry& e : s->entries) {
            if (e.key == key) {
                e.value = value;
                return;
            }
        }
        s->entries.push_back(Entry{key, value, 0});
    }

    void append(const std::string& section, const std::string& key,
                const std::string& value) {
        Section* s = find_mutable(section);
        if (!s) {
            sections_.push_back(Section{section, {}});
            s = &sections_.back();
        }
        s->entries.push_back(Entry{key, value, 0});
    }

    const std::vector<Section>& sections() const { return sections_; }

    friend bool operator==(const ConfigFile& a, const ConfigFile& b) {
        if (a.sections_.size() != b.sections_.size()) return false;
        for (std::size_t i = 0; i < a.sections_.size(); ++i) {
            if (a.sections_[i].name != b.sections_[i].name) return false;
            const auto& ea = a.sections_[i].entries;
            const auto& eb = b.sections_[i].entries;
            if (ea.size() != eb.size()) return false;
            for (std::size_t j = 0; j < ea.size(); ++j)
                if (ea[j].key != eb[j].key || ea[j].value != eb[j].value) return false;
        }
        return true;
    }

private:
    static std::string strip_comment(const std::string& s) {
        auto pos = s.find('#');
        return pos == std::string::npos ? s : s.substr(0, pos);
    }
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }
    double parse_double(const std::string& section, const std::string& key,
                        const std::string& v) const {
        try {
            std::size_t used = 0;
            double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError("field `" + key + "` in [" + section +
                              "] is not a number: " + v);
        }
    }
    std::int64_t parse_int(const std::string& section, const std::string& key,
                           const std::string& v) const {
        try {
            std::size_t used = 0;
            std::int64_t i = std::stoll(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return i;
        } catch (const std::exception&) {
            throw ConfigError("field `" + key + "` in [" + section +
                              "] is not an integer: " + v);
        }
    }

    const Section* find(const std::string& name) const {
        for (const Section& s : sections_)
            if (s.name == name) return &s;
        return nullptr;
    }
    Section* find_mutable(const std::string& name) {
        for (Section& s : sections_)
            if (s.name == name) return &s;
        return nullptr;
    }

    std::vector<Section> sections_;
};

}  // namespace vast
