// SPDX-License-Identifier: Apache-2.0
#include "gert/config/toml.hpp"

#include "gert/error.hpp"

#include <cctype>
#include <cstdlib>

namespace gert::config {

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    TomlDocument parse() {
        TomlDocument doc;
        TomlTable* current = &doc.root;
        for (;;) {
            skip_blank();
            if (eof()) break;
            if (peek() == '[') {
                current = parse_header(doc);
            } else {
                parse_keyval(*current);
            }
        }
        return doc;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("line " + std::to_string(line_) + ": " + msg);
    }

    bool eof() const { return i_ >= s_.size(); }
    char peek() const { return s_[i_]; }

    char take() {
        const char c = s_[i_++];
        if (c == '\n') ++line_;
        return c;
    }

    void skip_spaces() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++i_;
    }

    void skip_comment() {
        while (!eof() && peek() != '\n') ++i_;
    }

    // Whitespace, newlines and comments between statements.
    void skip_blank() {
        for (;;) {
            skip_spaces();
            if (eof()) return;
            if (peek() == '#') {
                skip_comment();
            } else if (peek() == '\n') {
                take();
            } else {
                return;
            }
        }
    }

    void expect_end_of_line() {
        skip_spaces();
        if (!eof() && peek() == '#') skip_comment();
        if (eof()) return;
        if (peek() != '\n') fail("unexpected trailing characters");
        take();
    }

    std::string parse_bare_key() {
        skip_spaces();
        std::string key;
        while (!eof()) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
                c == '.') {
                key += take();
            } else {
                break;
            }
        }
        if (key.empty()) fail("expected a key");
        return key;
    }

    TomlTable* parse_header(TomlDocument& doc) {
        take(); // '['
        const bool is_array = !eof() && peek() == '[';
        if (is_array) take();
        const std::string name = parse_bare_key();
        skip_spaces();
        if (eof() || take() != ']') fail("unterminated table header");
        if (is_array) {
            if (eof() || take() != ']') fail("unterminated array-of-tables header");
        }
        expect_end_of_line();
        if (is_array) {
            doc.table_arrays[name].emplace_back();
            return &doc.table_arrays[name].back();
        }
        if (doc.tables.count(name)) fail("duplicate table [" + name + "]");
        return &doc.tables[name];
    }

    void parse_keyval(TomlTable& table) {
        const std::string key = parse_bare_key();
        skip_spaces();
        if (eof() || take() != '=') fail("expected '=' after key '" + key + "'");
        skip_spaces();
        if (table.values.count(key)) fail("duplicate key '" + key + "'");
        table.values[key] = parse_value();
        expect_end_of_line();
    }

    TomlValue parse_value() {
        skip_spaces();
        if (eof()) fail("expected a value");
        const char c = peek();
        if (c == '"') return parse_string();
        if (c == '[') return parse_array();
        if (c == 't' || c == 'f') return parse_bool();
        return parse_number();
    }

    TomlValue parse_string() {
        take(); // opening quote
        TomlValue v;
        v.kind = TomlValue::Kind::string;
        while (!eof()) {
            if (peek() == '\n') fail("unterminated string");
            char c = take();
            if (c == '"') return v;
            if (c == '\\') {
                if (eof()) fail("unterminated escape");
                const char e = take();
                switch (e) {
                    case '"': c = '"'; break;
                    case '\\': c = '\\'; break;
                    case 'n': c = '\n'; break;
                    case 't': c = '\t'; break;
                    case 'r': c = '\r'; break;
                    default: fail(std::string("unknown escape \\") + e);
                }
            }
            v.str += c;
        }
        fail("unterminated string");
    }

    TomlValue parse_bool() {
        TomlValue v;
        v.kind = TomlValue::Kind::boolean;
        if (s_.compare(i_, 4, "true") == 0) {
            i_ += 4;
            v.boolean = true;
            return v;
        }
        if (s_.compare(i_, 5, "false") == 0) {
            i_ += 5;
            v.boolean = false;
            return v;
        }
        fail("expected a boolean");
    }

    TomlValue parse_number() {
        size_t end = i_;
        while (end < s_.size()) {
            const char c = s_[end];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
                c == '.' || c == 'e' || c == 'E' || c == 'x' ||
                (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F')) {
                ++end;
            } else {
                break;
            }
        }
        const std::string text(s_.substr(i_, end - i_));
        char* parse_end = nullptr;
        const double value = std::strtod(text.c_str(), &parse_end);
        if (parse_end != text.c_str() + text.size() || text.empty()) {
            fail("malformed number '" + text + "'");
        }
        i_ = end;
        TomlValue v;
        v.kind = TomlValue::Kind::number;
        v.num = value;
        return v;
    }

    TomlValue parse_array() {
        take(); // '['
        TomlValue v;
        v.kind = TomlValue::Kind::array;
        for (;;) {
            skip_blank();
            if (eof()) fail("unterminated array");
            if (peek() == ']') {
                take();
                return v;
            }
            v.array.push_back(parse_value());
            skip_blank();
            if (eof()) fail("unterminated array");
            if (peek() == ',') {
                take();
            } else if (peek() != ']') {
                fail("expected ',' or ']' in array");
            }
        }
    }

    std::string_view s_;
    size_t i_ = 0;
    int line_ = 1;
};

} // namespace

bool TomlTable::has(std::string_view key) const {
    return values.find(std::string(key)) != values.end();
}

const TomlValue& TomlTable::get(std::string_view key) const {
    const auto it = values.find(std::string(key));
    if (it == values.end()) throw ParseError("missing key '" + std::string(key) + "'");
    return it->second;
}

double TomlTable::number(std::string_view key) const {
    const TomlValue& v = get(key);
    if (!v.is_number()) throw ParseError("key '" + std::string(key) + "' is not a number");
    return v.num;
}

double TomlTable::number_or(std::string_view key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

const std::string& TomlTable::string(std::string_view key) const {
    const TomlValue& v = get(key);
    if (!v.is_string()) throw ParseError("key '" + std::string(key) + "' is not a string");
    return v.str;
}

std::string TomlTable::string_or(std::string_view key, std::string_view fallback) const {
    return has(key) ? string(key) : std::string(fallback);
}

bool TomlTable::boolean_or(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const TomlValue& v = get(key);
    if (!v.is_bool()) throw ParseError("key '" + std::string(key) + "' is not a boolean");
    return v.boolean;
}

const TomlTable* TomlDocument::find_table(std::string_view name) const {
    const auto it = tables.find(std::string(name));
    return it == tables.end() ? nullptr : &it->second;
}

TomlDocument parse_toml(std::string_view text) {
    return Parser(text).parse();
}

} // namespace gert::config
