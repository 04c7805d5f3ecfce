#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "driftlearn/errors.hpp"
#include "driftlearn/oracle_io.hpp"
#include "driftlearn/textio.hpp"

namespace driftlearn {

// key = value configuration files with [section] headers and '#' comments.
// Repeated keys are kept in order (the schema lists signs that way).
class ConfigFile {
public:
    ConfigFile() = default;

    static ConfigFile parse(const std::string& text) {
        ConfigFile cfg;
        cfg.raw_ = text;
        std::string section;
        std::size_t line_no = 0;
        for (const auto& raw_line : textio::split(text, '\n')) {
            ++line_no;
            std::string line = textio::trim(raw_line);
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = textio::trim(line.substr(0, hash));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError("line " + std::to_string(line_no) + ": unterminated section");
                section = textio::trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
            Item item;
            item.section = section;
            item.key = textio::trim(line.substr(0, eq));
            item.value = textio::trim(line.substr(eq + 1));
            if (item.key.empty())
                throw ConfigError("line " + std::to_string(line_no) + ": empty key");
            cfg.items_.push_back(std::move(item));
        }
        return cfg;
    }

    static ConfigFile parse_file(const std::string& path) {
        return parse(textio::read_file(path));
    }

    bool has(const std::string& section, const std::string& key) const {
        for (const auto& it : items_)
            if (it.section == section && it.key == key) return true;
        return false;
    }

    std::string get(const std::string& section, const std::string& key) const {
        for (const auto& it : items_)
            if (it.section == section && it.key == key) return it.value;
        throw ConfigError("missing config key [" + section + "] " + key);
    }

    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const {
        return has(section, key) ? get(section, key) : fallback;
    }

    std::vector<std::string> get_all(const std::string& section, const std::string& key) const {
        std::vector<std::string> out;
        for (const auto& it : items_)
            if (it.section == section && it.key == key) out.push_back(it.value);
        return out;
    }

    double get_double(const std::string& section, const std::string& key) const {
        return textio::parse_double(get(section, key), "[" + section + "] " + key);
    }

    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const {
        return has(section, key) ? get_double(section, key) : fallback;
    }

    std::uint64_t get_uint(const std::string& section, const std::string& key) const {
        return textio::parse_uint(get(section, key), "[" + section + "] " + key);
    }

    std::uint64_t get_uint_or(const std::string& section, const std::string& key,
                              std::uint64_t fallback) const {
        return has(section, key) ? get_uint(section, key) : fallback;
    }

    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
        if (!has(section, key)) return fallback;
        const std::string v = get(section, key);
        if (v == "true" || v == "on" || v == "1") return true;
        if (v == "false" || v == "off" || v == "0") return false;
        throw ConfigError("[" + section + "] " + key + " must be a boolean, got '" + v + "'");
    }

    std::vector<double> get_double_list_or(const std::string& section, const std::string& key,
                                           std::vector<double> fallback) const {
        if (!has(section, key)) return fallback;
        std::vector<double> out;
        for (const auto& tok : textio::split(get(section, key), ','))
            out.push_back(textio::parse_double(tok, "[" + section + "] " + key));
        return out;
    }

    const std::string& raw() const noexcept { return raw_; }

private:
    struct Item {
        std::string section;
        std::string key;
        std::string value;
    };
    std::vector<Item> items_;
    std::string raw_;
};

// [schema] sign = name:sigma:v1,v2,...  (one entry per sign, in order)
inline SignSchema schema_from_config(const ConfigFile& cfg) {
    const auto fields = cfg.get_all("schema", "sign");
    if (fields.empty()) throw ConfigError("config has no [schema] sign entries");
    std::string header;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) header += ';';
        header += fields[i];
    }
    try {
        return parse_schema_header(header);
    } catch (const IoError& e) {
        throw ConfigError(std::string("bad [schema] sign entry: ") + e.what());
    }
}

}  // namespace driftlearn
