#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace synthforge::toml {

/// Minimal TOML reader covering what generator configs need: [tables],
/// [[arrays of tables]], dotted headers, strings, integers, floats
/// (inf/nan included), booleans, and single-line arrays. Values carry the
/// line they came from so errors can point at the file.
struct Value;

using Array = std::vector<Value>;

struct Table {
    std::map<std::string, Value> entries;

    bool contains(const std::string& key) const { return entries.count(key) > 0; }
};

struct Value {
    std::variant<std::int64_t, double, bool, std::string, Array, Table> data;
    int line = 0;
};

Table parse(const std::string& text, const std::string& source_name = "<string>");
Table parse_file(const std::filesystem::path& path);

/// Typed accessors; every failure is a config_error naming key and line.
std::int64_t get_int(const Table& t, const std::string& key);
std::int64_t get_int_or(const Table& t, const std::string& key, std::int64_t fallback);
double get_double(const Table& t, const std::string& key);  // accepts integer literals
double get_double_or(const Table& t, const std::string& key, double fallback);
bool get_bool_or(const Table& t, const std::string& key, bool fallback);
std::string get_string(const Table& t, const std::string& key);
const Table& get_table(const Table& t, const std::string& key);
const Array& get_table_array(const Table& t, const std::string& key);

}  // namespace synthforge::toml
