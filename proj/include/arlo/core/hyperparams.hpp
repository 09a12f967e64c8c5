#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "arlo/core/error.hpp"
#include "arlo/core/json_util.hpp"
#include "arlo/core/rng.hpp"

namespace arlo {

using HyperValue = std::variant<std::int64_t, double, std::string>;

inline bool hyper_equal(const HyperValue& a, const HyperValue& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<double>(a)) return bitwise_equal(std::get<double>(a), std::get<double>(b));
  return a == b;
}

inline Json hyper_to_json(const HyperValue& v) {
  return std::visit([](const auto& x) { return Json(x); }, v);
}

inline HyperValue hyper_from_json(const Json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return static_cast<std::int64_t>(j.get<bool>() ? 1 : 0);
  throw ConfigError("hyper-parameter values must be numbers or strings");
}

inline std::string hyper_to_string(const HyperValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return hyper_to_json(v).dump();
}

enum class Scale { linear, log };

struct Categorical {
  std::vector<HyperValue> values;
};
struct IntegerRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};
struct RealRange {
  double lo = 0.0;
  double hi = 0.0;
  Scale scale = Scale::linear;
};
using Domain = std::variant<Categorical, IntegerRange, RealRange>;

struct HyperparamEntry {
  std::string name;
  Domain domain;
};

inline bool domain_contains(const Domain& d, const HyperValue& v) {
  if (const auto* c = std::get_if<Categorical>(&d)) {
    return std::any_of(c->values.begin(), c->values.end(),
                       [&](const HyperValue& x) { return hyper_equal(x, v); });
  }
  if (const auto* r = std::get_if<IntegerRange>(&d)) {
    const auto* i = std::get_if<std::int64_t>(&v);
    return i && *i >= r->lo && *i <= r->hi;
  }
  const auto& r = std::get<RealRange>(d);
  const auto* x = std::get_if<double>(&v);
  return x && std::isfinite(*x) && *x >= r.lo && *x <= r.hi;
}

/// A name -> value map. Values are exact; reals are compared bitwise.
class HyperparamAssignment {
 public:
  HyperparamAssignment() = default;
  HyperparamAssignment(std::initializer_list<std::pair<const std::string, HyperValue>> init)
      : values_(init) {}

  void set(const std::string& name, HyperValue v) { values_[name] = std::move(v); }
  [[nodiscard]] bool has(const std::string& name) const { return values_.count(name) != 0; }
  [[nodiscard]] const std::map<std::string, HyperValue>& values() const { return values_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }

  [[nodiscard]] const HyperValue& at(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw ConfigError("missing hyper-parameter '" + name + "'");
    return it->second;
  }

  [[nodiscard]] double get_real(const std::string& name) const {
    const auto& v = at(name);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    throw ConfigError("hyper-parameter '" + name + "' must be numeric");
  }

  [[nodiscard]] std::int64_t get_int(const std::string& name) const {
    const auto& v = at(name);
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    if (const auto* d = std::get_if<double>(&v); d && *d == std::floor(*d)) return static_cast<std::int64_t>(*d);
    throw ConfigError("hyper-parameter '" + name + "' must be an integer");
  }

  [[nodiscard]] std::size_t get_count(const std::string& name) const {
    const auto v = get_int(name);
    if (v < 0) throw ConfigError("hyper-parameter '" + name + "' must be non-negative");
    return static_cast<std::size_t>(v);
  }

  [[nodiscard]] std::string get_string(const std::string& name) const {
    const auto& v = at(name);
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    throw ConfigError("hyper-parameter '" + name + "' must be a string");
  }

  /// Values of `overrides` replace ours; names only in `overrides` are added.
  [[nodiscard]] HyperparamAssignment merged(const HyperparamAssignment& overrides) const {
    HyperparamAssignment out = *this;
    for (const auto& [k, v] : overrides.values_) out.values_[k] = v;
    return out;
  }

  friend bool operator==(const HyperparamAssignment& a, const HyperparamAssignment& b) {
    if (a.values_.size() != b.values_.size()) return false;
    for (auto ia = a.values_.begin(), ib = b.values_.begin(); ia != a.values_.end(); ++ia, ++ib) {
      if (ia->first != ib->first || !hyper_equal(ia->second, ib->second)) return false;
    }
    return true;
  }

  [[nodiscard]] Json to_json() const {
    Json j = Json::object();
    for (const auto& [k, v] : values_) j[k] = hyper_to_json(v);
    return j;
  }

  static HyperparamAssignment from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("hyper-parameters must be an object");
    HyperparamAssignment a;
    for (const auto& [k, v] : j.items()) a.set(k, hyper_from_json(v));
    return a;
  }

 private:
  std::map<std::string, HyperValue> values_;
};

/// Named hyper-parameter domains, kept sorted by name.
class HyperparamSpace {
 public:
  HyperparamSpace() = default;

  void add(std::string name, Domain domain) {
    validate_domain(name, domain);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                               [](const HyperparamEntry& e, const std::string& n) { return e.name < n; });
    if (it != entries_.end() && it->name == name) {
      throw ConfigError("duplicate hyper-parameter '" + name + "'");
    }
    entries_.insert(it, HyperparamEntry{std::move(name), std::move(domain)});
  }

  [[nodiscard]] const std::vector<HyperparamEntry>& entries() const { return entries_; }
  [[nodiscard]] bool empty() const { return entries_.empty(); }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }

  [[nodiscard]] const HyperparamEntry* find(const std::string& name) const {
    for (const auto& e : entries_) {
      if (e.name == name) return &e;
    }
    return nullptr;
  }

  /// True iff `a` names exactly our entries and every value is in its domain.
  [[nodiscard]] bool contains(const HyperparamAssignment& a) const {
    if (a.size() != entries_.size()) return false;
    for (const auto& e : entries_) {
      if (!a.has(e.name) || !domain_contains(e.domain, a.at(e.name))) return false;
    }
    return true;
  }

  HyperparamAssignment sample(RngStream& rng) const {
    HyperparamAssignment a;
    for (const auto& e : entries_) a.set(e.name, sample_domain(e.domain, rng));
    return a;
  }

  static HyperValue sample_domain(const Domain& d, RngStream& rng) {
    if (const auto* c = std::get_if<Categorical>(&d)) return c->values[rng.index(c->values.size())];
    if (const auto* r = std::get_if<IntegerRange>(&d)) return rng.integer(r->lo, r->hi);
    const auto& r = std::get<RealRange>(d);
    if (r.scale == Scale::log) {
      const double v = std::exp(rng.uniform(std::log(r.lo), std::log(r.hi)));
      return std::clamp(v, r.lo, r.hi);
    }
    return rng.uniform(r.lo, r.hi);
  }

  [[nodiscard]] Json to_json() const {
    Json j = Json::object();
    for (const auto& e : entries_) {
      if (const auto* c = std::get_if<Categorical>(&e.domain)) {
        Json vals = Json::array();
        for (const auto& v : c->values) vals.push_back(hyper_to_json(v));
        j[e.name] = {{"type", "categorical"}, {"values", vals}};
      } else if (const auto* r = std::get_if<IntegerRange>(&e.domain)) {
        j[e.name] = {{"type", "int"}, {"lo", r->lo}, {"hi", r->hi}};
      } else {
        const auto& rr = std::get<RealRange>(e.domain);
        j[e.name] = {{"type", "real"}, {"lo", rr.lo}, {"hi", rr.hi},
                     {"scale", rr.scale == Scale::log ? "log" : "linear"}};
      }
    }
    return j;
  }

  static HyperparamSpace from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("hyper-parameter space must be an object");
    HyperparamSpace space;
    for (const auto& [name, spec] : j.items()) {
      const std::string where = "space entry '" + name + "'";
      const std::string type = require(spec, "type", where).get<std::string>();
      if (type == "categorical") {
        require_keys(spec, {"type", "values"}, where);
        Categorical c;
        for (const auto& v : require(spec, "values", where)) c.values.push_back(hyper_from_json(v));
        space.add(name, c);
      } else if (type == "int") {
        require_keys(spec, {"type", "lo", "hi"}, where);
        space.add(name, IntegerRange{require(spec, "lo", where).get<std::int64_t>(),
                                     require(spec, "hi", where).get<std::int64_t>()});
      } else if (type == "real") {
        require_keys(spec, {"type", "lo", "hi", "scale"}, where);
        const std::string scale = get_or<std::string>(spec, "scale", "linear");
        if (scale != "linear" && scale != "log") throw ConfigError(where + ": scale must be linear or log");
        space.add(name, RealRange{require(spec, "lo", where).get<double>(), require(spec, "hi", where).get<double>(),
                                  scale == "log" ? Scale::log : Scale::linear});
      } else {
        throw ConfigError(where + ": unknown type '" + type + "'");
      }
    }
    return space;
  }

 private:
  static void validate_domain(const std::string& name, const Domain& d) {
    if (const auto* c = std::get_if<Categorical>(&d)) {
      if (c->values.empty()) throw ConfigError("'" + name + "': categorical domain is empty");
    } else if (const auto* r = std::get_if<IntegerRange>(&d)) {
      if (r->lo > r->hi) throw ConfigError("'" + name + "': integer range needs lo <= hi");
    } else {
      const auto& rr = std::get<RealRange>(d);
      if (!(rr.lo <= rr.hi) || !std::isfinite(rr.lo) || !std::isfinite(rr.hi)) {
        throw ConfigError("'" + name + "': real range needs finite lo <= hi");
      }
      if (rr.scale == Scale::log && !(rr.lo > 0.0)) {
        throw ConfigError("'" + name + "': log scale requires lo > 0");
      }
    }
  }

  std::vector<HyperparamEntry> entries_;
};

}  // namespace arlo
