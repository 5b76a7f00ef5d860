// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json_detail.hpp"
#include "pcct/error.hpp"
#include "pcct/pipeline.hpp"

namespace pcct::pipeline {

using detail::json;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// NaN and infinities survive the round trip as tagged strings.
json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double num_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::config, "expected a number, got '" + s + "'");
  }
  return j.get<double>();
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> nums_from(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(num_from(x));
  return v;
}

std::string samples_csv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const std::vector<std::string>& labels) {
  std::ostringstream os;
  os << "index";
  for (const auto& l : labels) os << ',' << l;
  os << ",pcct\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    os << i;
    for (Eigen::Index j = 0; j < x.cols(); ++j) os << ',' << fmt(x(i, j));
    os << ',' << fmt(y[i]) << '\n';
  }
  return os.str();
}

}  // namespace

bool StudySummary::same_statistics(const StudySummary& o) const {
  // NaN-free by construction, so plain equality is the intended comparison.
  return mode == o.mode && estimator == o.estimator && labels == o.labels && seed == o.seed &&
         n_train == o.n_train && n_eval == o.n_eval && n_failed == o.n_failed && mean == o.mean &&
         variance == o.variance && sample_mean == o.sample_mean &&
         sample_variance == o.sample_variance && fct_for_ps == o.fct_for_ps &&
         probability_of_stability == o.probability_of_stability && percentile == o.percentile &&
         percentile_value == o.percentile_value && histogram == o.histogram && sobol == o.sobol &&
         surrogate == o.surrogate && cct == o.cct && smoothing == o.smoothing;
}

std::string summary_to_json(const StudySummary& s) {
  json j;
  j["format"] = "pcct-study-summary";
  j["version"] = 1;
  j["mode"] = to_string(s.mode);
  j["estimator"] = s.estimator;
  j["labels"] = s.labels;
  j["seed"] = s.seed;
  j["n_train"] = s.n_train;
  j["n_eval"] = s.n_eval;
  j["n_failed"] = s.n_failed;
  j["mean"] = num(s.mean);
  j["variance"] = num(s.variance);
  j["sample_mean"] = num(s.sample_mean);
  j["sample_variance"] = num(s.sample_variance);
  j["fct_for_ps"] = num(s.fct_for_ps);
  j["probability_of_stability"] = num(s.probability_of_stability);
  j["percentile"] = num(s.percentile);
  j["percentile_value"] = num(s.percentile_value);
  j["histogram"] = {{"edges", nums(s.histogram.edges)}, {"densities", nums(s.histogram.densities)}};
  if (s.sobol) {
    j["sobol"] = {{"first", nums(s.sobol->first)},
                  {"total", nums(s.sobol->total)},
                  {"ranking", s.sobol->ranking}};
  }
  if (s.surrogate) {
    j["surrogate"] = {{"p", s.surrogate->p},
                      {"q", num(s.surrogate->q)},
                      {"basis_size", s.surrogate->basis_size},
                      {"active_terms", s.surrogate->active_terms},
                      {"mloo", num(s.surrogate->mloo)}};
  }
  if (s.cct) {
    j["cct"] = {{"cct", num(s.cct->cct)},
                {"t_lo", num(s.cct->t_lo)},
                {"t_hi", num(s.cct->t_hi)},
                {"simulations", s.cct->simulations}};
  }
  if (!s.smoothing.empty()) {
    json rows = json::array();
    for (const auto& r : s.smoothing) {
      rows.push_back({{"input", r.input},
                      {"label", r.label},
                      {"total_index", num(r.total_index)},
                      {"failed", r.failed},
                      {"error", r.error},
                      {"mean", num(r.mean)},
                      {"variance", num(r.variance)},
                      {"probability_of_stability", num(r.probability_of_stability)},
                      {"variance_reduction", num(r.variance_reduction)},
                      {"refit_total_index", num(r.refit_total_index)}});
    }
    j["smoothing"] = std::move(rows);
  }
  j["timings"] = {{"t_ed", num(s.timings.t_ed)},
                  {"t_pc", num(s.timings.t_pc)},
                  {"t_es", num(s.timings.t_es)},
                  {"t_total", num(s.timings.t_total)}};
  return j.dump(2) + "\n";
}

StudySummary summary_from_json(const std::string& text) {
  StudySummary s;
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string{}) != "pcct-study-summary") {
      throw Error(ErrorKind::config, "not a pcct study summary");
    }
    s.mode = mode_from_string(j.at("mode"));
    s.estimator = j.at("estimator");
    s.labels = j.at("labels").get<std::vector<std::string>>();
    s.seed = j.at("seed");
    s.n_train = j.at("n_train");
    s.n_eval = j.at("n_eval");
    s.n_failed = j.at("n_failed");
    s.mean = num_from(j.at("mean"));
    s.variance = num_from(j.at("variance"));
    s.sample_mean = num_from(j.at("sample_mean"));
    s.sample_variance = num_from(j.at("sample_variance"));
    s.fct_for_ps = num_from(j.at("fct_for_ps"));
    s.probability_of_stability = num_from(j.at("probability_of_stability"));
    s.percentile = num_from(j.at("percentile"));
    s.percentile_value = num_from(j.at("percentile_value"));
    s.histogram.edges = nums_from(j.at("histogram").at("edges"));
    s.histogram.densities = nums_from(j.at("histogram").at("densities"));
    if (j.contains("sobol")) {
      const auto& b = j.at("sobol");
      s.sobol = SobolSummary{nums_from(b.at("first")), nums_from(b.at("total")),
                             b.at("ranking").get<std::vector<std::size_t>>()};
    }
    if (j.contains("surrogate")) {
      const auto& b = j.at("surrogate");
      s.surrogate = SurrogateSummary{b.at("p"), num_from(b.at("q")), b.at("basis_size"),
                                     b.at("active_terms"), num_from(b.at("mloo"))};
    }
    if (j.contains("cct")) {
      const auto& b = j.at("cct");
      s.cct = CctSummary{num_from(b.at("cct")), num_from(b.at("t_lo")), num_from(b.at("t_hi")),
                         b.at("simulations")};
    }
    for (const auto& r : j.value("smoothing", json::array())) {
      SmoothingRow row;
      row.input = r.at("input");
      row.label = r.at("label");
      row.total_index = num_from(r.at("total_index"));
      row.failed = r.at("failed");
      row.error = r.at("error");
      row.mean = num_from(r.at("mean"));
      row.variance = num_from(r.at("variance"));
      row.probability_of_stability = num_from(r.at("probability_of_stability"));
      row.variance_reduction = num_from(r.at("variance_reduction"));
      row.refit_total_index = num_from(r.at("refit_total_index"));
      s.smoothing.push_back(std::move(row));
    }
    const auto& t = j.at("timings");
    s.timings = {num_from(t.at("t_ed")), num_from(t.at("t_pc")), num_from(t.at("t_es")),
                 num_from(t.at("t_total"))};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("malformed study summary: ") + e.what());
  }
  return s;
}

std::vector<std::filesystem::path> emit_report(const StudyReport& report,
                                               const std::filesystem::path& outdir) {
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create '" + outdir.string() + "': " + ec.message());

  std::vector<std::filesystem::path> written;
  const auto put = [&](const std::string& name, const std::string& text) {
    const auto path = outdir / name;
    detail::write_text_file(path, text);
    written.push_back(path);
  };
  const auto& labels = report.summary.labels;

  put("summary.json", summary_to_json(report.summary));
  put("samples.csv", samples_csv(report.inputs, report.values, labels));
  if (report.train_inputs.rows() > 0) {
    put("training.csv", samples_csv(report.train_inputs, report.train_values, labels));
  }

  std::ostringstream hist;
  hist << "left,right,density\n";
  const auto& h = report.summary.histogram;
  for (std::size_t k = 0; k < h.densities.size(); ++k) {
    hist << fmt(h.edges[k]) << ',' << fmt(h.edges[k + 1]) << ',' << fmt(h.densities[k]) << '\n';
  }
  put("histogram.csv", hist.str());

  std::ostringstream cdf;
  cdf << "pcct,cdf\n";
  for (std::size_t k = 0; k < report.cdf.x.size(); ++k) {
    cdf << fmt(report.cdf.x[k]) << ',' << fmt(report.cdf.p[k]) << '\n';
  }
  put("cdf.csv", cdf.str());

  if (report.model) put("model.json", spce::model_to_json(*report.model));

  // The complete sample file supersedes the streaming journal.
  std::filesystem::remove(journal_path(outdir), ec);
  return written;
}

}  // namespace pcct::pipeline
