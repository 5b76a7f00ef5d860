// SPDX-License-Identifier: Apache-2.0
// Internal JSON helpers shared by the model, case, config and report codecs.
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "json.hpp"
#include "pcct/error.hpp"
#include "pcct/orthobasis.hpp"

namespace pcct::detail {

using nlohmann::json;

inline json distribution_to_json(const orthobasis::Distribution& d) {
  using orthobasis::Family;
  const auto p = d.params();
  json j;
  j["family"] = std::string(orthobasis::to_string(d.family()));
  switch (d.family()) {
    case Family::gaussian: j["mean"] = p[0]; j["std"] = p[1]; break;
    case Family::uniform: j["lower"] = p[0]; j["upper"] = p[1]; break;
    case Family::gamma: j["shape"] = p[0]; j["rate"] = p[1]; break;
    case Family::beta:
      j["shape_a"] = p[0]; j["shape_b"] = p[1]; j["lower"] = p[2]; j["upper"] = p[3];
      break;
    case Family::point_mass: j["value"] = p[0]; break;
  }
  return j;
}

inline orthobasis::Distribution distribution_from_json(const json& j) {
  using orthobasis::Distribution;
  using orthobasis::Family;
  try {
    switch (orthobasis::family_from_string(j.at("family").get<std::string>())) {
      case Family::gaussian: return Distribution::gaussian(j.at("mean"), j.at("std"));
      case Family::uniform: return Distribution::uniform(j.at("lower"), j.at("upper"));
      case Family::gamma: return Distribution::gamma(j.at("shape"), j.at("rate"));
      case Family::beta:
        return Distribution::beta(j.at("shape_a"), j.at("shape_b"), j.value("lower", 0.0),
                                  j.value("upper", 1.0));
      case Family::point_mass: return Distribution::point_mass(j.at("value"));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("invalid distribution: ") + e.what());
  }
  throw Error(ErrorKind::config, "invalid distribution");
}

// Non-finite doubles are stored as null.
inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
inline double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, "malformed JSON in '" + path.string() + "': " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed for '" + path.string() + "'");
}

}  // namespace pcct::detail
