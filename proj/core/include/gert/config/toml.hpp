// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace gert::config {

/// Value of a TOML-subset document: string, number, boolean or
/// (possibly nested) array. All numbers are doubles.
struct TomlValue {
    enum class Kind { string, number, boolean, array };
    Kind kind = Kind::number;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<TomlValue> array;

    bool is_string() const { return kind == Kind::string; }
    bool is_number() const { return kind == Kind::number; }
    bool is_bool() const { return kind == Kind::boolean; }
    bool is_array() const { return kind == Kind::array; }
};

struct TomlTable {
    std::map<std::string, TomlValue> values;

    bool has(std::string_view key) const;
    const TomlValue& get(std::string_view key) const; // throws ParseError if absent
    double number(std::string_view key) const;
    double number_or(std::string_view key, double fallback) const;
    const std::string& string(std::string_view key) const;
    std::string string_or(std::string_view key, std::string_view fallback) const;
    bool boolean_or(std::string_view key, bool fallback) const;
};

/// Parsed document: top-level keys, named [table] sections and [[table]]
/// array-of-table sections.
struct TomlDocument {
    TomlTable root;
    std::map<std::string, TomlTable> tables;
    std::map<std::string, std::vector<TomlTable>> table_arrays;

    const TomlTable* find_table(std::string_view name) const;
};

/// Parse the TOML subset used by scene manifests and run configurations:
/// bare keys, `=`, strings with basic escapes, numbers, booleans,
/// single- or multi-line arrays, `[section]`, `[[array-of-section]]`,
/// `#` comments. Errors carry 1-based line numbers.
TomlDocument parse_toml(std::string_view text);

} // namespace gert::config
