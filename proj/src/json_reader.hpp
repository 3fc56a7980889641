#pragma once

// Strict reader over a JSON object: every key must be consumed, types are
// checked, and failures carry a "$.a.b[2].c" style location.

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "corona/error.hpp"

namespace corona::detail {

using Json = nlohmann::ordered_json;

inline Json parse_json_text(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorKind::ParseError,
                fmt::format("{}: malformed JSON at line {}, column {}", what, line, column));
  }
}

class ObjectReader {
 public:
  ObjectReader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  bool has(const char* key) const { return node_.contains(key); }

  double number(const char* key) {
    const Json& v = take(key);
    if (!v.is_number()) fail(at(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(at(key), "expected a finite number");
    return x;
  }

  double number_or(const char* key, double fallback) { return has(key) ? number(key) : fallback; }

  std::int64_t integer(const char* key) {
    const Json& v = take(key);
    if (!v.is_number_integer()) fail(at(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::string string(const char* key) {
    const Json& v = take(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    return v.get<std::string>();
  }

  std::string string_or(const char* key, std::string fallback) {
    return has(key) ? string(key) : std::move(fallback);
  }

  const Json& array(const char* key) {
    const Json& v = take(key);
    if (!v.is_array()) fail(at(key), "expected an array");
    return v;
  }

  ObjectReader object(const char* key) { return ObjectReader(take(key), at(key)); }

  std::string at(std::string_view key) const { return fmt::format("{}.{}", path_, key); }
  const std::string& path() const { return path_; }

  // Rejects any key that was never read.
  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!used_.contains(it.key())) fail(at(it.key()), "unknown key");
    }
  }

  [[noreturn]] static void fail(const std::string& where, std::string_view message) {
    throw Error(ErrorKind::ParseError, fmt::format("{}: {}", where, message));
  }

 private:
  const Json& take(const char* key) {
    if (!node_.contains(key)) fail(at(key), "missing required key");
    used_.insert(key);
    return node_.at(key);
  }

  const Json& node_;
  std::string path_;
  std::set<std::string, std::less<>> used_;
};

}  // namespace corona::detail
