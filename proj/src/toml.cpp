#include "synthforge/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "synthforge/errors.hpp"

namespace synthforge::toml {

namespace {

struct Cursor {
    const std::string* src_name;
    std::string_view text;
    std::size_t pos = 0;
    int line = 1;

    [[noreturn]] void fail(const std::string& msg) const {
        throw config_error(*src_name + ":" + std::to_string(line) + ": " + msg);
    }
    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() { return text[pos++]; }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
    void skip_comment() {
        if (!eof() && peek() == '#')
            while (!eof() && peek() != '\n') ++pos;
    }
    bool at_line_end() {
        skip_ws();
        skip_comment();
        return eof() || peek() == '\n' || peek() == '\r';
    }
    void next_line() {
        while (!eof() && peek() != '\n') ++pos;
        if (!eof()) {
            ++pos;
            ++line;
        }
    }
};

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_bare_key(Cursor& cur) {
    std::string key;
    while (!cur.eof() && is_bare_key_char(cur.peek())) key.push_back(cur.take());
    if (key.empty()) cur.fail("expected a key");
    return key;
}

std::vector<std::string> parse_key_path(Cursor& cur) {
    std::vector<std::string> path{parse_bare_key(cur)};
    cur.skip_ws();
    while (!cur.eof() && cur.peek() == '.') {
        cur.take();
        cur.skip_ws();
        path.push_back(parse_bare_key(cur));
        cur.skip_ws();
    }
    return path;
}

std::string parse_string_value(Cursor& cur) {
    cur.take();  // opening quote
    std::string out;
    while (true) {
        if (cur.eof() || cur.peek() == '\n') cur.fail("unterminated string");
        char c = cur.take();
        if (c == '"') break;
        if (c == '\\') {
            if (cur.eof()) cur.fail("unterminated escape");
            const char e = cur.take();
            switch (e) {
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                default: cur.fail(std::string("unsupported escape '\\") + e + "'");
            }
        } else {
            out.push_back(c);
        }
    }
    return out;
}

Value parse_value(Cursor& cur);

Value parse_array_value(Cursor& cur) {
    cur.take();  // '['
    Array arr;
    cur.skip_ws();
    while (true) {
        cur.skip_ws();
        if (cur.eof() || cur.peek() == '\n') cur.fail("arrays must close on one line");
        if (cur.peek() == ']') {
            cur.take();
            break;
        }
        arr.push_back(parse_value(cur));
        cur.skip_ws();
        if (!cur.eof() && cur.peek() == ',') {
            cur.take();
            continue;
        }
        if (!cur.eof() && cur.peek() == ']') {
            cur.take();
            break;
        }
        cur.fail("expected ',' or ']' in array");
    }
    return {std::move(arr), cur.line};
}

Value parse_scalar(Cursor& cur) {
    std::string tok;
    while (!cur.eof()) {
        const char c = cur.peek();
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ',' || c == ']' || c == '#')
            break;
        tok.push_back(cur.take());
    }
    if (tok.empty()) cur.fail("expected a value");
    if (tok == "true") return {true, cur.line};
    if (tok == "false") return {false, cur.line};

    const bool looks_float = tok.find_first_of(".eE") != std::string::npos ||
                             tok.find("inf") != std::string::npos ||
                             tok.find("nan") != std::string::npos;
    errno = 0;
    char* end = nullptr;
    if (!looks_float) {
        const long long i = std::strtoll(tok.c_str(), &end, 10);
        if (end == tok.c_str() + tok.size() && errno == 0)
            return {static_cast<std::int64_t>(i), cur.line};
    }
    const double d = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() + tok.size()) return {d, cur.line};
    cur.fail("cannot parse value '" + tok + "'");
}

Value parse_value(Cursor& cur) {
    cur.skip_ws();
    if (cur.eof()) cur.fail("expected a value");
    if (cur.peek() == '"') return {parse_string_value(cur), cur.line};
    if (cur.peek() == '[') return parse_array_value(cur);
    return parse_scalar(cur);
}

Table* descend(Table* root, const std::vector<std::string>& path, Cursor& cur,
               bool array_element) {
    Table* t = root;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const bool last = i + 1 == path.size();
        auto it = t->entries.find(path[i]);
        if (it == t->entries.end()) {
            if (last && array_element) {
                Array arr;
                arr.push_back(Value{Table{}, cur.line});
                auto [ins, _] = t->entries.emplace(path[i], Value{std::move(arr), cur.line});
                return &std::get<Table>(std::get<Array>(ins->second.data).back().data);
            }
            auto [ins, _] = t->entries.emplace(path[i], Value{Table{}, cur.line});
            t = &std::get<Table>(ins->second.data);
            continue;
        }
        Value& v = it->second;
        if (last && array_element) {
            auto* arr = std::get_if<Array>(&v.data);
            if (!arr) cur.fail("'" + path[i] + "' is not an array of tables");
            arr->push_back(Value{Table{}, cur.line});
            return &std::get<Table>(arr->back().data);
        }
        if (auto* sub = std::get_if<Table>(&v.data)) {
            t = sub;
        } else if (auto* arr = std::get_if<Array>(&v.data)) {
            if (arr->empty() || !std::get_if<Table>(&arr->back().data))
                cur.fail("'" + path[i] + "' is not a table");
            t = &std::get<Table>(arr->back().data);  // [[x]] then [x.y]
        } else {
            cur.fail("'" + path[i] + "' already holds a value");
        }
    }
    return t;
}

}  // namespace

Table parse(const std::string& text, const std::string& source_name) {
    Cursor cur{&source_name, text};
    Table root;
    Table* current = &root;

    while (!cur.eof()) {
        cur.skip_ws();
        if (cur.at_line_end()) {
            cur.next_line();
            continue;
        }
        if (cur.peek() == '[') {
            cur.take();
            const bool array_header = !cur.eof() && cur.peek() == '[';
            if (array_header) cur.take();
            cur.skip_ws();
            const auto path = parse_key_path(cur);
            cur.skip_ws();
            if (cur.eof() || cur.take() != ']') cur.fail("expected ']' to close table header");
            if (array_header && (cur.eof() || cur.take() != ']'))
                cur.fail("expected ']]' to close array-of-tables header");
            if (!cur.at_line_end()) cur.fail("unexpected text after table header");
            current = descend(&root, path, cur, array_header);
            cur.next_line();
            continue;
        }
        const std::string key = parse_bare_key(cur);
        cur.skip_ws();
        if (cur.eof() || cur.take() != '=') cur.fail("expected '=' after key '" + key + "'");
        Value value = parse_value(cur);
        if (!cur.at_line_end()) cur.fail("unexpected text after value for '" + key + "'");
        if (current->contains(key)) cur.fail("duplicate key '" + key + "'");
        value.line = cur.line;
        current->entries.emplace(key, std::move(value));
        cur.next_line();
    }
    return root;
}

Table parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

namespace {

const Value& require(const Table& t, const std::string& key) {
    auto it = t.entries.find(key);
    if (it == t.entries.end()) throw config_error("config: missing key '" + key + "'");
    return it->second;
}

[[noreturn]] void type_fail(const std::string& key, const Value& v, const char* want) {
    throw config_error("config: key '" + key + "' (line " + std::to_string(v.line) +
                       ") is not " + want);
}

}  // namespace

std::int64_t get_int(const Table& t, const std::string& key) {
    const Value& v = require(t, key);
    if (auto* i = std::get_if<std::int64_t>(&v.data)) return *i;
    type_fail(key, v, "an integer");
}

std::int64_t get_int_or(const Table& t, const std::string& key, std::int64_t fallback) {
    return t.contains(key) ? get_int(t, key) : fallback;
}

double get_double(const Table& t, const std::string& key) {
    const Value& v = require(t, key);
    if (auto* d = std::get_if<double>(&v.data)) return *d;
    if (auto* i = std::get_if<std::int64_t>(&v.data)) return static_cast<double>(*i);
    type_fail(key, v, "a number");
}

double get_double_or(const Table& t, const std::string& key, double fallback) {
    return t.contains(key) ? get_double(t, key) : fallback;
}

bool get_bool_or(const Table& t, const std::string& key, bool fallback) {
    if (!t.contains(key)) return fallback;
    const Value& v = require(t, key);
    if (auto* b = std::get_if<bool>(&v.data)) return *b;
    type_fail(key, v, "a boolean");
}

std::string get_string(const Table& t, const std::string& key) {
    const Value& v = require(t, key);
    if (auto* s = std::get_if<std::string>(&v.data)) return *s;
    type_fail(key, v, "a string");
}

const Table& get_table(const Table& t, const std::string& key) {
    const Value& v = require(t, key);
    if (auto* sub = std::get_if<Table>(&v.data)) return *sub;
    type_fail(key, v, "a table");
}

const Array& get_table_array(const Table& t, const std::string& key) {
    const Value& v = require(t, key);
    if (auto* arr = std::get_if<Array>(&v.data)) return *arr;
    type_fail(key, v, "an array of tables");
}

}  // namespace synthforge::toml
