// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <set>

#include "json_detail.hpp"
#include "pcct/error.hpp"
#include "pcct/pipeline.hpp"

namespace pcct::pipeline {

using detail::json;

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::mcs: return "mcs";
    case Mode::pce: return "pce";
    case Mode::smooth: return "smooth";
    case Mode::cct: return "cct";
  }
  return "pce";
}

Mode mode_from_string(const std::string& s) {
  if (s == "mcs") return Mode::mcs;
  if (s == "pce") return Mode::pce;
  if (s == "smooth") return Mode::smooth;
  if (s == "cct") return Mode::cct;
  throw Error(ErrorKind::config, "unknown mode '" + s + "'");
}

std::string to_string(SamplingScheme scheme) {
  return scheme == SamplingScheme::lhs ? "lhs" : "random";
}

SamplingScheme scheme_from_string(const std::string& s) {
  if (s == "lhs") return SamplingScheme::lhs;
  if (s == "random") return SamplingScheme::random;
  throw Error(ErrorKind::config, "unknown sampling scheme '" + s + "'");
}

void StudyConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw Error(ErrorKind::config, "config: " + msg); };
  if (n_train < 2) fail("n_train must be >= 2");
  if (n_eval < 100) fail("n_eval must be >= 100");
  if (!(cct_tol > 0.0)) fail("cct_tol must be > 0");
  if (!(fct_max > 0.0)) fail("fct_max must be > 0");
  if (!(fct_for_ps >= 0.0)) fail("fct_for_ps must be >= 0");
  if (!(percentile >= 0.0 && percentile <= 100.0)) fail("percentile must lie in [0, 100]");
  if (p_max < 1) fail("p_max must be >= 1");
  if (q_grid.empty()) fail("q_grid must not be empty");
  for (double q : q_grid) {
    if (!(q > 0.0 && q <= 1.0)) fail("q_grid entries must lie in (0, 1]");
  }
  if (workers < 1) fail("workers must be >= 1");
  std::set<int> buses;
  for (const auto& in : random_inputs) {
    if (!buses.insert(in.bus).second) fail("bus " + std::to_string(in.bus) + " listed twice");
  }
}

StudyConfig config_from_json(const std::string& text, const std::filesystem::path& base_dir) {
  StudyConfig c;
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  try {
    const json j = json::parse(text);
    if (j.contains("case")) c.case_path = resolve(j.at("case").get<std::string>());
    if (j.contains("scenario")) c.scenario_path = resolve(j.at("scenario").get<std::string>());
    for (const auto& in : j.value("random_inputs", json::array())) {
      RandomInput r;
      r.bus = in.at("bus");
      r.label = in.value("label", "bus" + std::to_string(r.bus));
      if (in.contains("distribution")) r.dist = detail::distribution_from_json(in.at("distribution"));
      c.random_inputs.push_back(std::move(r));
    }
    c.mode = mode_from_string(j.value("mode", std::string("pce")));
    c.n_train = j.value("n_train", c.n_train);
    c.n_eval = j.value("n_eval", c.n_eval);
    c.seed = j.value("seed", c.seed);
    c.cct_tol = j.value("cct_tol", c.cct_tol);
    c.fct_max = j.value("fct_max", c.fct_max);
    c.fct_for_ps = j.value("fct_for_ps", c.fct_for_ps);
    c.percentile = j.value("percentile", c.percentile);
    c.p_max = j.value("p_max", c.p_max);
    if (j.contains("q_grid")) c.q_grid = j.at("q_grid").get<std::vector<double>>();
    c.mcs_sampling = scheme_from_string(j.value("mcs_sampling", std::string("lhs")));
    c.workers = j.value("workers", c.workers);
    if (j.contains("output_dir")) c.output_dir = resolve(j.at("output_dir").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("malformed study config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string config_to_json(const StudyConfig& c) {
  json j;
  j["case"] = c.case_path.string();
  j["scenario"] = c.scenario_path.string();
  j["random_inputs"] = json::array();
  for (const auto& in : c.random_inputs) {
    json r{{"bus", in.bus}, {"label", in.label}};
    if (in.dist) r["distribution"] = detail::distribution_to_json(*in.dist);
    j["random_inputs"].push_back(std::move(r));
  }
  j["mode"] = to_string(c.mode);
  j["n_train"] = c.n_train;
  j["n_eval"] = c.n_eval;
  j["seed"] = c.seed;
  j["cct_tol"] = c.cct_tol;
  j["fct_max"] = c.fct_max;
  j["fct_for_ps"] = c.fct_for_ps;
  j["percentile"] = c.percentile;
  j["p_max"] = c.p_max;
  j["q_grid"] = c.q_grid;
  j["mcs_sampling"] = to_string(c.mcs_sampling);
  j["workers"] = c.workers;
  j["output_dir"] = c.output_dir.string();
  return j.dump(2) + "\n";
}

StudyConfig load_config(const std::filesystem::path& path) {
  const json j = detail::read_json_file(path);
  return config_from_json(j.dump(), path.parent_path());
}

}  // namespace pcct::pipeline
