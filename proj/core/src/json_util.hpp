#pragma once

// Internal helpers shared by the JSON readers/writers. Not installed.

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdp/error.hpp"

namespace mdp::detail {

using nlohmann::json;

json load_json_file(const std::filesystem::path& path);
void save_json_file(const std::filesystem::path& path, const json& doc);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Reads fields of one JSON object, remembering which keys were consumed so
// unknown keys can be rejected. Errors name the dotted field path and are
// raised as ErrorT (ConfigError for configs, ValidationError for data).
template <typename ErrorT>
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& required(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) fail(field(key), "missing required field");
    return obj_.at(key);
  }

  template <typename T>
  T get(const std::string& key) {
    return convert<T>(required(key), key);
  }

  template <typename T>
  void optional(const std::string& key, T& out) {
    seen_.insert(key);
    if (obj_.contains(key)) out = convert<T>(obj_.at(key), key);
  }

  const json* optional_object(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) return nullptr;
    return &obj_.at(key);
  }

  void reject_unknown() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) fail(field(it.key()), "unknown key");
    }
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ErrorT(where + ": " + what);
  }

 private:
  template <typename T>
  T convert(const json& v, const std::string& key) const {
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(field(key), "expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) fail(field(key), "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
            fail(field(key), "expected a non-negative integer");
          }
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) fail(field(key), "expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(field(key), "expected a string");
      }
      return v.get<T>();
    } catch (const nlohmann::json::exception& e) {
      fail(field(key), e.what());
    }
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace mdp::detail
