#pragma once

#include <json.hpp>

#include <cmath>
#include <initializer_list>
#include <limits>
#include <set>
#include <string>

#include "arlo/core/error.hpp"
#include "arlo/core/types.hpp"

namespace arlo {

using Json = nlohmann::json;

// NaN marks a missing entry and is written as null.
inline Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isnan(v[i])) {
      out.push_back(nullptr);
    } else {
      out.push_back(v[i]);
    }
  }
  return out;
}

inline Vector vector_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidArgument(what + ": expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (e.is_null()) {
      v[static_cast<Eigen::Index>(i)] = std::numeric_limits<double>::quiet_NaN();
    } else if (e.is_number()) {
      v[static_cast<Eigen::Index>(i)] = e.get<double>();
    } else {
      throw InvalidArgument(what + ": element " + std::to_string(i) + " is not a number");
    }
  }
  return v;
}

inline Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

inline Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InvalidArgument(what + ": expected a non-empty nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Matrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    Vector row = vector_from_json(j[static_cast<std::size_t>(r)], what);
    if (r == 0) m.resize(rows, row.size());
    if (row.size() != m.cols()) throw InvalidArgument(what + ": ragged matrix rows");
    m.row(r) = row.transpose();
  }
  return m;
}

/// Rejects keys of `obj` outside `allowed`.
inline void require_keys(const Json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get_or(const Json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : it->template get<T>();
}

inline const Json& require(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing key '" + key + "'");
  return *it;
}

}  // namespace arlo
