// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Prints one PASS/FAIL line per criterion; exit status is
// non-zero when any selected criterion fails.
//
//   pcct_acceptance                 all criteria
//   pcct_acceptance --criterion 4   a single criterion
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pcct/error.hpp"
#include "pcct/orthobasis.hpp"
#include "pcct/pipeline.hpp"
#include "pcct/sampling.hpp"
#include "pcct/spce.hpp"
#include "pcct/transim.hpp"

namespace ob = pcct::orthobasis;
namespace sp = pcct::spce;
namespace ts = pcct::transim;
namespace pl = pcct::pipeline;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::size_t workers() {
  if (const char* w = std::getenv("PCCT_WORKERS")) return std::max(1, std::atoi(w));
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------

Outcome orthonormality() {
  struct Case {
    std::string name;
    ob::Distribution dist;
    std::function<double(const std::function<double(double)>&)> expect;
  };
  const std::vector<Case> cases{
      {"hermite", ob::Distribution::gaussian(0, 1), oracle::expect_gaussian},
      {"legendre", ob::Distribution::uniform(-1, 1), oracle::expect_uniform},
      {"laguerre(1)", ob::Distribution::gamma(1.0, 1.0), [](auto& f) { return oracle::expect_gamma(1.0, f); }},
      {"laguerre(2.5)", ob::Distribution::gamma(2.5, 1.0), [](auto& f) { return oracle::expect_gamma(2.5, f); }},
      {"jacobi(1,1)", ob::Distribution::beta(1, 1, 0, 1), [](auto& f) { return oracle::expect_beta(1, 1, f); }},
      {"jacobi(2,3.5)", ob::Distribution::beta(2, 3.5, 0, 1), [](auto& f) { return oracle::expect_beta(2, 3.5, f); }},
      {"jacobi(5,2)", ob::Distribution::beta(5, 2, 0, 1), [](auto& f) { return oracle::expect_beta(5, 2, f); }},
  };
  constexpr int kDeg = 10;
  double worst_ext = 0.0, worst_gauss = 0.0;
  std::string worst_name;
  for (const auto& c : cases) {
    const auto fam = ob::family_for(c.dist, kDeg);
    const auto rule = ob::gauss_rule(fam, kDeg + 1);
    for (int m = 0; m <= kDeg; ++m) {
      for (int n = m; n <= kDeg; ++n) {
        const double delta = m == n ? 1.0 : 0.0;
        const double ext = c.expect([&](double x) { return fam.eval(m, x) * fam.eval(n, x); });
        double g = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
          g += rule.weights[i] * fam.eval(m, rule.nodes[i]) * fam.eval(n, rule.nodes[i]);
        }
        if (std::abs(ext - delta) > worst_ext) {
          worst_ext = std::abs(ext - delta);
          worst_name = c.name;
        }
        worst_gauss = std::max(worst_gauss, std::abs(g - delta));
      }
    }
  }
  return {worst_ext <= 1e-10 && worst_gauss <= 1e-10,
          "max |<psi_m,psi_n> - delta_mn|, degrees <= 10: adaptive quadrature " +
              fmt("%.2e", worst_ext) + " (" + worst_name + "), Gauss rule " + fmt("%.2e", worst_gauss) +
              " (tol 1e-10)"};
}

Outcome truncation_counts() {
  int checked = 0, bad = 0;
  for (int m = 1; m <= 5; ++m) {
    const std::vector<ob::Distribution> d(static_cast<std::size_t>(m), ob::Distribution::uniform(0, 1));
    for (int p = 0; p <= 6; ++p) {
      ++checked;
      if (static_cast<double>(sp::truncated_basis(m, p, 1.0, d).size()) != oracle::binomial(m + p, p)) ++bad;
      for (double q : {0.5, 0.75}) {
        ++checked;
        std::set<std::vector<int>> got;
        const auto basis = sp::truncated_basis(m, p, q, d);
        for (const auto& idx : basis.indices()) got.insert(idx.degrees);
        const auto ref = oracle::qnorm_bruteforce(m, p, q);
        if (got != std::set<std::vector<int>>(ref.begin(), ref.end())) ++bad;
      }
    }
  }
  return {bad == 0, std::to_string(checked - bad) + "/" + std::to_string(checked) +
                        " truncations match (q=1 binomial count, q<1 brute-force set), M<=5, p<=6"};
}

Outcome sparse_recovery() {
  std::mt19937_64 gen(31337);
  const std::vector<ob::Distribution> dists(3, ob::Distribution::uniform(-1, 1));
  const auto basis = sp::truncated_basis(3, 3, 1.0, dists);
  int recovered = 0;
  double worst_coef = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int extra = std::uniform_int_distribution<int>(1, 4)(gen);
    std::vector<std::size_t> pool(basis.size() - 1);
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i + 1;
    std::shuffle(pool.begin(), pool.end(), gen);
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
    std::uniform_real_distribution<double> mag(0.5, 2.0);
    truth[0] = mag(gen);
    for (int k = 0; k < extra; ++k) {
      truth[static_cast<Eigen::Index>(pool[k])] = (gen() & 1 ? 1.0 : -1.0) * mag(gen);
    }
    const Eigen::MatrixXd x = pcct::sampling::materialize(pcct::sampling::lhs_unit(30, 3, 1000 + trial), dists);
    const Eigen::MatrixXd a = basis.design_matrix(x);
    const Eigen::VectorXd y = a * truth;
    const auto model = sp::hybrid_lar_fit(a, y, basis);
    bool same = true;
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
      if ((truth[i] != 0.0) != (model.coeffs[i] != 0.0)) same = false;
    }
    const double err = (model.coeffs - truth).cwiseAbs().maxCoeff();
    worst_coef = std::max(worst_coef, err);
    if (same && err <= 1e-6) ++recovered;
  }
  return {recovered == 20, std::to_string(recovered) + "/20 active sets recovered exactly; max coefficient error " +
                               fmt("%.2e", worst_coef) + " (tol 1e-6)"};
}

Outcome ishigami() {
  const oracle::Ishigami f;
  const double pi = std::numbers::pi;
  const std::vector<ob::Distribution> dists(3, ob::Distribution::uniform(-pi, pi));
  const Eigen::MatrixXd x = pcct::sampling::materialize(pcct::sampling::lhs_unit(200, 3, 8675309), dists);
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) y[i] = f(x(i, 0), x(i, 1), x(i, 2));
  const std::vector<double> q_grid{0.5, 0.75, 1.0};
  const auto model = sp::adaptive_fit(x, y, 15, q_grid, dists);
  const auto s = sp::sobol_indices(model);
  const auto first = f.first();
  const auto total = f.total();
  double err_analytic = 0.0;
  for (int i = 0; i < 3; ++i) {
    err_analytic = std::max({err_analytic, std::abs(s.first[i] - first[static_cast<std::size_t>(i)]),
                             std::abs(s.total[i] - total[static_cast<std::size_t>(i)])});
  }
  const auto mc = sp::sobol_mc_oracle(
      [&](std::span<const double> v) { return sp::eval_surrogate(model, v); }, dists, 20000, 4242);
  double err_mc = 0.0;
  for (int i = 0; i < 3; ++i) {
    err_mc = std::max({err_mc, std::abs(s.first[i] - mc.indices.first[i]),
                       std::abs(s.total[i] - mc.indices.total[i])});
  }
  std::ostringstream os;
  os << "S=(" << fmt("%.4f", s.first[0]) << "," << fmt("%.4f", s.first[1]) << "," << fmt("%.4f", s.first[2])
     << ") ST=(" << fmt("%.4f", s.total[0]) << "," << fmt("%.4f", s.total[1]) << "," << fmt("%.4f", s.total[2])
     << "); max err vs closed form " << fmt("%.4f", err_analytic) << ", vs MC oracle " << fmt("%.4f", err_mc)
     << " (tol 0.02); p=" << model.meta.p << " q=" << model.meta.q << " terms=" << model.meta.active_terms;
  return {err_analytic <= 0.02 && err_mc <= 0.02, os.str()};
}

Outcome smib() {
  const std::vector<std::pair<double, double>> params{{3.0, 0.6}, {5.0, 0.8}, {4.0, 0.9}, {6.0, 1.0}, {8.0, 0.7}};
  double worst = 0.0;
  std::ostringstream os;
  for (const auto& [h, pm] : params) {
    oracle::SmibCase c;
    c.h = h;
    c.pm = pm;
    ts::CctOptions opt;
    opt.tol = 1e-4;
    const auto r = ts::compute_cct(fixture::smib(c), fixture::smib_fault(), opt);
    worst = std::max(worst, std::abs(r.cct - c.cct()));
    os << " H=" << h << ",Pm=" << pm << ":" << fmt("%.5f", r.cct) << "/" << fmt("%.5f", c.cct());
  }
  return {worst <= 2e-4, "max |CCT - equal-area| = " + fmt("%.2e", worst) + " s (tol 2e-4);" + os.str()};
}

Outcome wscc_base() {
  const auto net = ts::load_case(fixture::data("wscc9.json"));
  const auto pf = ts::solve_power_flow(net);
  const double vm[] = {1.040, 1.025, 1.025, 1.0258, 0.9956, 1.0127, 1.0258, 1.0159, 1.0324};
  const double va[] = {0.0, 9.280, 4.665, -2.217, -3.989, -3.687, 3.720, 0.728, 1.967};
  double dv = 0.0, da = 0.0;
  for (int i = 0; i < 9; ++i) {
    dv = std::max(dv, std::abs(std::abs(pf.voltage[i]) - vm[i]));
    da = std::max(da, std::abs(std::arg(pf.voltage[i]) * 180.0 / std::numbers::pi - va[i]));
  }
  const auto r = ts::compute_cct(net, ts::load_scenario(fixture::data("wscc9_bus7.json")));
  return {dv <= 1e-3 && da <= 0.1 && r.cct >= 0.05 && r.cct <= 0.30,
          "max |dV| = " + fmt("%.2e", dv) + " p.u. (tol 1e-3), max |dtheta| = " + fmt("%.3f", da) +
              " deg (tol 0.1); base CCT bus-7 fault, line 5-7 cleared = " + fmt("%.4f", r.cct) +
              " s (range [0.05, 0.30])"};
}

// Seeds for the study-level criteria; fixed before any acceptance run.
constexpr std::uint64_t kSeedPce = 20240611;
constexpr std::uint64_t kSeedMcs = 97531;

Outcome pce_vs_mcs() {
  auto cfg = fixture::wscc_config();
  cfg.workers = workers();
  cfg.seed = kSeedPce;
  cfg.n_train = 30;
  cfg.n_eval = 10000;
  const auto pce = pl::run_pce(pl::make_study(cfg)).summary;
  cfg.seed = kSeedMcs;
  cfg.n_eval = 1000;
  const auto mcs = pl::run_mcs(pl::make_study(cfg)).summary;
  const double dmu = std::abs(pce.mean - mcs.mean) / mcs.mean;
  const double dvar = std::abs(pce.variance - mcs.variance) / mcs.variance;
  const double dps = std::abs(pce.probability_of_stability - mcs.probability_of_stability);
  std::ostringstream os;
  os << "PCE(N=30,N_M=1e4) mu=" << fmt("%.5f", pce.mean) << " var=" << fmt("%.4e", pce.variance)
     << " P(S)=" << fmt("%.4f", pce.probability_of_stability) << "; MCS(N_M=1000) mu=" << fmt("%.5f", mcs.mean)
     << " var=" << fmt("%.4e", mcs.variance) << " P(S)=" << fmt("%.4f", mcs.probability_of_stability)
     << " failed=" << mcs.n_failed << "; |dmu|/mu=" << fmt("%.3f", 100 * dmu) << "% (<=0.5%), |dvar|/var="
     << fmt("%.2f", 100 * dvar) << "% (<=5%), |dP(S)|=" << fmt("%.2f", 100 * dps) << "pp (<=1pp) at FCT="
     << cfg.fct_for_ps << " s";
  return {dmu <= 0.005 && dvar <= 0.05 && dps <= 0.01, os.str()};
}

Outcome smoothing() {
  auto cfg = fixture::wscc_config();
  cfg.workers = workers();
  cfg.seed = kSeedPce;
  const auto rep = pl::run_smooth(pl::make_study(cfg));
  const auto& s = rep.summary;
  const auto& rows = s.smoothing;
  bool ok = rows.size() == 3 && s.sobol;
  std::ostringstream os;
  os << "base var=" << fmt("%.4e", s.variance) << " P(S)=" << fmt("%.4f", s.probability_of_stability) << ";";
  if (ok) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      os << " " << r.label << ": ST=" << fmt("%.4f", r.total_index) << " reduction="
         << fmt("%.1f", 100 * r.variance_reduction) << "% P(S)=" << fmt("%.4f", r.probability_of_stability)
         << (r.failed ? " FAILED" : "") << ";";
      ok = ok && !r.failed;
      if (k > 0) ok = ok && rows[k - 1].total_index >= r.total_index;
    }
    const auto& top = rows.front();
    for (std::size_t k = 1; k < rows.size(); ++k) ok = ok && top.variance_reduction > rows[k].variance_reduction;
    const double gap = std::abs(top.variance_reduction - top.total_index);
    ok = ok && gap <= 0.10 && top.probability_of_stability > s.probability_of_stability;
    os << " top-input |reduction - ST| = " << fmt("%.1f", 100 * gap) << " points (<=10), P(S) "
       << fmt("%.4f", s.probability_of_stability) << " -> " << fmt("%.4f", top.probability_of_stability);
  }
  return {ok, os.str()};
}

Outcome efficiency() {
  auto cfg = fixture::wscc_config();
  cfg.workers = 1;  // per-simulation cost is measured serially
  cfg.seed = kSeedPce;
  const auto s = pl::run_pce(pl::make_study(cfg)).summary;
  const double per_cct = s.timings.t_ed / static_cast<double>(cfg.n_train);
  const double sim_equiv = per_cct * 1e4;
  const double speedup = sim_equiv / s.timings.t_es;
  return {speedup >= 100.0 && s.timings.t_pc < 10.0,
          "per-CCT cost " + fmt("%.4f", per_cct) + " s -> 1e4 simulations ~ " + fmt("%.1f", sim_equiv) +
              " s; t_es(1e4) = " + fmt("%.4f", s.timings.t_es) + " s; speed-up " + fmt("%.0f", speedup) +
              "x (>=100x); t_pc = " + fmt("%.3f", s.timings.t_pc) + " s (<10 s)"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  auto base = fixture::wscc_config();
  base.seed = 1357;
  base.n_eval = 200;
  std::ostringstream os;
  bool ok = true;
  const auto tmp = std::filesystem::temp_directory_path() / "pcct_acceptance_det";
  for (auto mode : {pl::Mode::cct, pl::Mode::mcs, pl::Mode::pce, pl::Mode::smooth}) {
    auto cfg = base;
    cfg.mode = mode;
    std::vector<pl::StudyReport> runs;
    std::vector<std::string> sample_files;
    for (std::size_t w : {1u, 3u, 1u}) {
      cfg.workers = w;
      runs.push_back(pl::run_study(pl::make_study(cfg)));
      const auto dir = tmp / (pl::to_string(mode) + std::to_string(runs.size()));
      std::filesystem::remove_all(dir);
      pl::emit_report(runs.back(), dir);
      sample_files.push_back(slurp(dir / "samples.csv"));
    }
    const bool same_stats = runs[0].summary.same_statistics(runs[1].summary) &&
                            runs[0].summary.same_statistics(runs[2].summary);
    const bool same_bytes = sample_files[0] == sample_files[2] && !sample_files[0].empty();
    ok = ok && same_stats && same_bytes;
    os << " " << pl::to_string(mode) << ": stats " << (same_stats ? "identical" : "DIFFER") << ", samples.csv "
       << (same_bytes ? "byte-identical" : "DIFFER") << ";";
  }
  std::filesystem::remove_all(tmp);
  return {ok, "workers 1/3/1 re-runs:" + os.str()};
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "orthonormality", 5.0, orthonormality},
      {2, "truncation counts", 1.0, truncation_counts},
      {3, "sparse recovery", 10.0, sparse_recovery},
      {4, "Ishigami Sobol indices", 60.0, ishigami},
      {5, "SMIB CCT vs equal area", 60.0, smib},
      {6, "WSCC power flow and base CCT", 30.0, wscc_base},
      {7, "PCE vs MCS statistics", 1800.0, pce_vs_mcs},
      {8, "smoothing study", 2700.0, smoothing},
      {9, "surrogate efficiency", 600.0, efficiency},
      {10, "determinism", 1800.0, determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if ((a == "--criterion" || a == "-c") && i + 1 < argc) {
      selected.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = dt <= c.budget_s;
    const bool pass = out.pass && in_budget;
    if (!pass) ++failures;
    std::printf("[%s] criterion %d (%s): %s | runtime %.2f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), out.detail.c_str(), dt, c.budget_s, in_budget ? "" : ", EXCEEDED");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
