// SPDX-License-Identifier: Apache-2.0
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>

#include "pcct/error.hpp"
#include "pcct/orthobasis.hpp"
#include "pcct/pipeline.hpp"
#include "pcct/sampling.hpp"
#include "pcct/spce.hpp"
#include "pcct/transim.hpp"

namespace py = pybind11;
namespace ob = pcct::orthobasis;
namespace sp = pcct::spce;
namespace ts = pcct::transim;
namespace pl = pcct::pipeline;

namespace {

py::object parse_json(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

std::vector<std::vector<int>> indices_of(const sp::BasisSet& basis) {
  std::vector<std::vector<int>> out;
  for (const auto& idx : basis.indices()) out.push_back(idx.degrees);
  return out;
}

py::dict sobol_dict(const sp::PceModel& model) {
  const auto s = sp::sobol_indices(model);
  py::dict d;
  d["first"] = s.first;
  d["total"] = s.total;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the pcct package";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::object(py::exception<pcct::Error>(m, "PcctError")); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const pcct::Error& e) {
      const py::object& cls = error_type.get_stored();
      py::object inst = cls(e.what());
      inst.attr("kind") = std::string(pcct::to_string(e.kind()));
      PyErr_SetObject(cls.ptr(), inst.ptr());
    }
  });

  py::class_<ob::Distribution>(m, "Distribution")
      .def_static("gaussian", &ob::Distribution::gaussian, py::arg("mean"), py::arg("std"))
      .def_static("uniform", &ob::Distribution::uniform, py::arg("lower"), py::arg("upper"))
      .def_static("gamma", &ob::Distribution::gamma, py::arg("shape"), py::arg("rate"))
      .def_static("beta", &ob::Distribution::beta, py::arg("shape_a"), py::arg("shape_b"),
                  py::arg("lower") = 0.0, py::arg("upper") = 1.0)
      .def_static("point_mass", &ob::Distribution::point_mass, py::arg("value"))
      .def_property_readonly("family",
                             [](const ob::Distribution& d) { return std::string(ob::to_string(d.family())); })
      .def_property_readonly("params",
                             [](const ob::Distribution& d) {
                               const auto p = d.params();
                               return std::vector<double>(p.begin(), p.end());
                             })
      .def_property_readonly("mean", &ob::Distribution::mean)
      .def_property_readonly("variance", &ob::Distribution::variance)
      .def("__repr__", [](const ob::Distribution& d) {
        std::string s = "Distribution." + std::string(ob::to_string(d.family())) + "(";
        const auto p = d.params();
        for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + std::to_string(p[i]);
        return s + ")";
      });

  m.def(
      "orthonormal",
      [](const ob::Distribution& d, int degree, double x) {
        return ob::eval_orthonormal(ob::family_for(d, std::max(degree, 1)), degree, x);
      },
      py::arg("dist"), py::arg("degree"), py::arg("x"),
      "Orthonormal polynomial of the given degree at standardized x.");
  m.def(
      "gauss_rule",
      [](const ob::Distribution& d, int n) {
        const auto r = ob::gauss_rule(ob::family_for(d, std::max(n, 1)), n);
        return py::make_tuple(r.nodes, r.weights);
      },
      py::arg("dist"), py::arg("n"), "Gauss nodes (standardized) and probability weights.");

  m.def(
      "lhs_unit", [](std::size_t n, std::size_t dims, std::uint64_t seed) {
        return pcct::sampling::lhs_unit(n, dims, seed).unit;
      },
      py::arg("n"), py::arg("m"), py::arg("seed"));
  m.def(
      "random_unit", [](std::size_t n, std::size_t dims, std::uint64_t seed) {
        return pcct::sampling::random_unit(n, dims, seed).unit;
      },
      py::arg("n"), py::arg("m"), py::arg("seed"));
  m.def(
      "materialize",
      [](const Eigen::MatrixXd& unit, const std::vector<ob::Distribution>& dists) {
        return pcct::sampling::materialize(pcct::sampling::DesignMatrix{unit, 0}, dists);
      },
      py::arg("unit"), py::arg("dists"));

  m.def(
      "truncated_basis",
      [](std::size_t dims, int p, double q, std::optional<std::vector<ob::Distribution>> dists) {
        auto ds = dists.value_or(std::vector<ob::Distribution>(dims, ob::Distribution::uniform(-1, 1)));
        return indices_of(sp::truncated_basis(dims, p, q, std::move(ds)));
      },
      py::arg("m"), py::arg("p"), py::arg("q") = 1.0, py::arg("dists") = py::none());

  py::class_<sp::PceModel>(m, "PceModel")
      .def_property_readonly("basis", [](const sp::PceModel& mo) { return indices_of(mo.basis); })
      .def_property_readonly("coefficients", [](const sp::PceModel& mo) { return mo.coeffs; })
      .def_property_readonly("mloo", [](const sp::PceModel& mo) { return mo.mloo; })
      .def_property_readonly("p", [](const sp::PceModel& mo) { return mo.meta.p; })
      .def_property_readonly("q", [](const sp::PceModel& mo) { return mo.meta.q; })
      .def_property_readonly("active_terms", [](const sp::PceModel& mo) { return mo.meta.active_terms; })
      .def_property_readonly("warnings", [](const sp::PceModel& mo) { return mo.meta.warnings; })
      .def_property_readonly("mean", [](const sp::PceModel& mo) { return sp::moments(mo).mean; })
      .def_property_readonly("variance", [](const sp::PceModel& mo) { return sp::moments(mo).variance; })
      .def("predict", [](const sp::PceModel& mo, const Eigen::MatrixXd& x) { return sp::eval_surrogate(mo, x); },
           py::arg("x"))
      .def("sobol", &sobol_dict)
      .def("to_json", &sp::model_to_json)
      .def_static("from_json", [](const std::string& s) { return sp::model_from_json(s); });

  m.def(
      "adaptive_fit",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<ob::Distribution>& dists,
         int p_max, std::vector<double> q_grid) {
        return sp::adaptive_fit(x, y, p_max, q_grid, dists);
      },
      py::arg("x"), py::arg("y"), py::arg("dists"), py::arg("p_max") = 10,
      py::arg("q_grid") = std::vector<double>{0.5, 0.75, 1.0});
  m.def(
      "fit_fixed",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<ob::Distribution>& dists,
         int p, double q) {
        auto basis = sp::truncated_basis(dists.size(), p, q, dists);
        return sp::hybrid_lar_fit(basis.design_matrix(x), y, basis);
      },
      py::arg("x"), py::arg("y"), py::arg("dists"), py::arg("p"), py::arg("q") = 1.0,
      "Hybrid LAR on one fixed truncation.");
  m.def(
      "sobol_mc_oracle",
      [](const std::function<double(std::vector<double>)>& f, const std::vector<ob::Distribution>& dists,
         std::size_t n, std::uint64_t seed) {
        const auto est = sp::sobol_mc_oracle(
            [&](std::span<const double> x) { return f(std::vector<double>(x.begin(), x.end())); }, dists,
            n, seed);
        py::dict d;
        d["first"] = est.indices.first;
        d["total"] = est.indices.total;
        d["first_se"] = est.first_se;
        d["total_se"] = est.total_se;
        return d;
      },
      py::arg("f"), py::arg("dists"), py::arg("n"), py::arg("seed"));

  m.def(
      "power_flow",
      [](const std::filesystem::path& case_path) {
        const auto net = ts::load_case(case_path);
        const auto pf = ts::solve_power_flow(net);
        py::dict d;
        std::vector<int> ids;
        for (const auto& b : net.buses) ids.push_back(b.id);
        d["bus"] = ids;
        d["voltage"] = pf.voltage;
        d["iterations"] = pf.iterations;
        d["mismatch"] = pf.mismatch;
        return d;
      },
      py::arg("case_path"));
  m.def(
      "compute_cct",
      [](const std::filesystem::path& case_path, const std::filesystem::path& scenario_path, double tol,
         double fct_max) {
        const auto net = ts::load_case(case_path);
        const auto sc = ts::load_scenario(scenario_path);
        ts::CctOptions opts;
        opts.tol = tol;
        opts.fct_max = fct_max;
        ts::CctResult r;
        {
          py::gil_scoped_release release;
          r = ts::compute_cct(net, sc, opts);
        }
        py::dict d;
        d["cct"] = r.cct;
        d["t_lo"] = r.t_lo;
        d["t_hi"] = r.t_hi;
        d["simulations"] = r.simulations;
        return d;
      },
      py::arg("case_path"), py::arg("scenario_path"), py::arg("tol") = 1e-4, py::arg("fct_max") = 2.0);

  m.def(
      "run_study",
      [](const std::filesystem::path& config_path, std::optional<std::string> mode,
         std::optional<std::uint64_t> seed, std::optional<std::size_t> n_eval,
         std::optional<std::size_t> n_train, std::optional<std::filesystem::path> out,
         std::optional<std::size_t> workers) {
        auto cfg = pl::load_config(config_path);
        if (mode) cfg.mode = pl::mode_from_string(*mode);
        if (seed) cfg.seed = *seed;
        if (n_eval) cfg.n_eval = *n_eval;
        if (n_train) cfg.n_train = *n_train;
        if (workers) cfg.workers = *workers;
        cfg.output_dir = out.value_or(std::filesystem::path{});
        cfg.validate();
        std::string summary;
        {
          py::gil_scoped_release release;
          const auto study = pl::make_study(cfg);
          const auto report = pl::run_study(study);
          if (out) pl::emit_report(report, *out);
          summary = pl::summary_to_json(report.summary);
        }
        return parse_json(summary);
      },
      py::arg("config"), py::arg("mode") = py::none(), py::arg("seed") = py::none(),
      py::arg("n_eval") = py::none(), py::arg("n_train") = py::none(), py::arg("out") = py::none(),
      py::arg("workers") = py::none(),
      "Runs a study from a config file and returns the summary as a dict. Files are written only "
      "when `out` is given.");
}
