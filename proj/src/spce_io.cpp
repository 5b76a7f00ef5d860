// SPDX-License-Identifier: Apache-2.0
#include "json_detail.hpp"
#include "pcct/spce.hpp"

namespace pcct::spce {

using detail::json;

std::string model_to_json(const PceModel& model) {
  json j;
  j["format"] = "pcct-pce-model";
  j["version"] = 1;
  json inputs = json::array();
  for (const auto& d : model.basis.dists()) inputs.push_back(detail::distribution_to_json(d));
  j["inputs"] = std::move(inputs);
  json basis = json::array();
  for (const auto& idx : model.basis.indices()) basis.push_back(idx.degrees);
  j["basis"] = std::move(basis);
  j["coefficients"] = std::vector<double>(model.coeffs.data(), model.coeffs.data() + model.coeffs.size());
  j["mloo"] = detail::number_or_null(model.mloo);

  json meta;
  meta["p"] = model.meta.p;
  meta["q"] = model.meta.q;
  meta["n_samples"] = model.meta.n_samples;
  meta["active_terms"] = model.meta.active_terms;
  json trace = json::array();
  for (const auto& c : model.meta.trace) {
    trace.push_back({{"p", c.p},
                     {"q", c.q},
                     {"basis_size", c.basis_size},
                     {"active_terms", c.active_terms},
                     {"mloo", detail::number_or_null(c.mloo)},
                     {"failed", c.failed}});
  }
  meta["trace"] = std::move(trace);
  meta["warnings"] = model.meta.warnings;
  j["meta"] = std::move(meta);
  return j.dump(2) + "\n";
}

PceModel model_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "pcct-pce-model") {
      throw Error(ErrorKind::config, "not a pcct PCE model document");
    }
    std::vector<Distribution> dists;
    for (const auto& d : j.at("inputs")) dists.push_back(detail::distribution_from_json(d));
    std::vector<MultiIndex> indices;
    for (const auto& row : j.at("basis")) indices.push_back(MultiIndex{row.get<std::vector<int>>()});
    const auto coeffs = j.at("coefficients").get<std::vector<double>>();
    if (coeffs.size() != indices.size()) {
      throw Error(ErrorKind::config, "coefficient count does not match basis size");
    }
    PceModel model{BasisSet(std::move(indices), std::move(dists)),
                   Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size())),
                   detail::number_from(j.at("mloo")),
                   {}};
    const auto& meta = j.at("meta");
    model.meta.p = meta.at("p");
    model.meta.q = meta.at("q");
    model.meta.n_samples = meta.at("n_samples");
    model.meta.active_terms = meta.at("active_terms");
    for (const auto& c : meta.at("trace")) {
      model.meta.trace.push_back({c.at("p"), c.at("q"), c.at("basis_size"), c.at("active_terms"),
                                  detail::number_from(c.at("mloo")), c.at("failed")});
    }
    model.meta.warnings = meta.at("warnings").get<std::vector<std::string>>();
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("malformed PCE model document: ") + e.what());
  }
}

void save_model(const PceModel& model, const std::filesystem::path& path) {
  detail::write_text_file(path, model_to_json(model));
}

PceModel load_model(const std::filesystem::path& path) {
  return model_from_json(detail::read_json_file(path).dump());
}

}  // namespace pcct::spce
