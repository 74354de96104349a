#pragma once

#include <string>

#include <json.hpp>

#include "qpat/domain.hpp"
#include "qpat/errors.hpp"

namespace qpat::detail {

using nlohmann::json;

inline Point json_point(const json& j, const std::string& what) {
  require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(), ErrorKind::config,
          what + " must be a pair of numbers");
  return Point(j[0].get<double>(), j[1].get<double>());
}

inline json to_json(const Point& p) { return json::array({p.x(), p.y()}); }

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  require(j.is_object(), ErrorKind::config, where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    require(ok, ErrorKind::config, "unknown key '" + it.key() + "' in " + where);
  }
}

inline DomainSpec domain_from_json(const json& j) {
  const std::string shape = j.value("shape", "disc");
  if (shape == "disc") {
    check_keys(j, {"shape", "center", "radius"}, "domain");
    return DomainSpec::unit_disc(
        j.contains("center") ? json_point(j["center"], "domain.center") : Point::Zero(),
        j.value("radius", 1.0));
  }
  if (shape == "rectangle") {
    check_keys(j, {"shape", "min", "max"}, "domain");
    const Point lo = json_point(j.at("min"), "domain.min");
    const Point hi = json_point(j.at("max"), "domain.max");
    return DomainSpec::rectangle(lo.x(), hi.x(), lo.y(), hi.y());
  }
  if (shape == "superellipse") {
    check_keys(j, {"shape", "center", "semi_axes", "exponent"}, "domain");
    return DomainSpec::superellipse(
        j.contains("center") ? json_point(j["center"], "domain.center") : Point::Zero(),
        json_point(j.at("semi_axes"), "domain.semi_axes"), j.value("exponent", 4.0));
  }
  throw Error(ErrorKind::config, "unknown domain shape '" + shape + "'");
}

inline json to_json(const DomainSpec& d) {
  switch (d.shape()) {
    case DomainSpec::Shape::disc:
      return {{"shape", "disc"}, {"center", to_json(d.center())}, {"radius", d.radius()}};
    case DomainSpec::Shape::rectangle:
      return {{"shape", "rectangle"}, {"min", to_json(d.box_min())}, {"max", to_json(d.box_max())}};
    case DomainSpec::Shape::superellipse:
      return {{"shape", "superellipse"},
              {"center", to_json(d.center())},
              {"semi_axes", to_json(d.semi_axes())},
              {"exponent", d.exponent()}};
  }
  return {};
}

}  // namespace qpat::detail
