#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "resavg/config.hpp"
#include "resavg/error.hpp"

namespace resavg::detail {

inline std::string join_key(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

inline void require_object(const Json& doc, const std::string& where) {
  if (!doc.is_object()) throw ConfigError("'" + where + "' must be an object");
}

inline void check_keys(const Json& doc, std::initializer_list<const char*> allowed, const std::string& where) {
  require_object(doc, where);
  for (const auto& item : doc.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) throw ConfigError("unknown key '" + join_key(where, item.key()) + "'");
  }
}

inline double as_number(const Json& value, const std::string& key) {
  if (!value.is_number()) throw ConfigError("'" + key + "' must be a number");
  return value.get<double>();
}

inline long long as_integer(const Json& value, const std::string& key) {
  if (!value.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return value.get<long long>();
}

inline bool as_bool(const Json& value, const std::string& key) {
  if (!value.is_boolean()) throw ConfigError("'" + key + "' must be true or false");
  return value.get<bool>();
}

inline std::string as_string(const Json& value, const std::string& key) {
  if (!value.is_string()) throw ConfigError("'" + key + "' must be a string");
  return value.get<std::string>();
}

inline std::vector<double> as_number_list(const Json& value, const std::string& key) {
  if (!value.is_array()) throw ConfigError("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(as_number(value[i], key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline const Json* find(const Json& doc, const char* key) {
  auto it = doc.find(key);
  return it == doc.end() || it->is_null() ? nullptr : &*it;
}

inline void read(const Json& doc, const char* key, const std::string& where, double& out) {
  if (const Json* v = find(doc, key)) out = as_number(*v, join_key(where, key));
}

inline void read(const Json& doc, const char* key, const std::string& where, int& out) {
  if (const Json* v = find(doc, key)) out = static_cast<int>(as_integer(*v, join_key(where, key)));
}

inline void read(const Json& doc, const char* key, const std::string& where, bool& out) {
  if (const Json* v = find(doc, key)) out = as_bool(*v, join_key(where, key));
}

inline void read(const Json& doc, const char* key, const std::string& where, std::uint64_t& out) {
  if (const Json* v = find(doc, key)) {
    const long long x = as_integer(*v, join_key(where, key));
    if (x < 0) throw ConfigError("'" + join_key(where, key) + "' must be non-negative");
    out = static_cast<std::uint64_t>(x);
  }
}

inline RVec to_rvec(const std::vector<double>& xs) {
  RVec out(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) out[static_cast<Eigen::Index>(i)] = xs[i];
  return out;
}

inline Json from_rvec(const RVec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace resavg::detail
