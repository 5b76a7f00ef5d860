// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "pcct/error.hpp"
#include "pcct/pipeline.hpp"
#include "pcct/sampling.hpp"

namespace pcct::pipeline {

namespace {

// Seed tags for the independent random stages of a study.
constexpr std::uint64_t kTagMcs = 0x4d435300;
constexpr std::uint64_t kTagTrain = 0x54524e00;
constexpr std::uint64_t kTagEval = 0x45564c00;
constexpr std::uint64_t kTagSmooth = 0x534d5400;
constexpr int kMaxRedraws = 3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

sampling::DesignMatrix design_for(SamplingScheme scheme, std::size_t n, std::size_t m,
                                  std::uint64_t seed) {
  return scheme == SamplingScheme::lhs ? sampling::lhs_unit(n, m, seed)
                                       : sampling::random_unit(n, m, seed);
}

std::vector<double> row_of(const Eigen::MatrixXd& x, Eigen::Index l) {
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) row[static_cast<std::size_t>(j)] = x(l, j);
  return row;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void check_study(const Study& study) {
  study.config.validate();
  if (study.dists.empty()) throw Error(ErrorKind::config, "study has no random inputs");
  if (study.labels.size() != study.dists.size()) {
    throw Error(ErrorKind::config, "one label per random input required");
  }
  if (!study.simulator) throw Error(ErrorKind::config, "study has no simulator");
}

void fill_common(StudySummary& s, const Study& study) {
  s.mode = study.config.mode;
  s.labels = study.labels;
  s.seed = study.config.seed;
  s.fct_for_ps = study.config.fct_for_ps;
  s.percentile = study.config.percentile;
}

}  // namespace

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr error;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  const auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        // Keep the lowest failing index so the surfaced error does not depend on scheduling.
        std::lock_guard lock(mu);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

Study make_study(const StudyConfig& config, std::vector<Distribution> dists,
                 std::vector<std::string> labels, Simulator simulator) {
  Study s;
  s.config = config;
  s.dists = std::move(dists);
  s.labels = std::move(labels);
  s.simulator = std::move(simulator);
  check_study(s);
  return s;
}

Study make_study(const StudyConfig& config) {
  config.validate();
  auto net = transim::load_case(config.case_path);
  auto scenario = transim::load_scenario(config.scenario_path);

  std::vector<RandomInput> inputs = config.random_inputs;
  if (inputs.empty()) {
    for (int bus : net.random_load_buses()) inputs.push_back({bus, "bus" + std::to_string(bus), {}});
  }
  if (inputs.empty()) throw Error(ErrorKind::config, "no random inputs in config or case");

  Study s;
  s.config = config;
  for (const auto& in : inputs) {
    const transim::Load* load = nullptr;
    for (const auto& l : net.loads) {
      if (l.bus == in.bus) load = &l;
    }
    if (!load) {
      throw Error(ErrorKind::config, "random input bus " + std::to_string(in.bus) + " has no load");
    }
    s.dists.push_back(in.dist ? *in.dist
                              : Distribution::gaussian(load->p, 0.1 * std::abs(load->p)));
    s.labels.push_back(in.label.empty() ? "bus" + std::to_string(in.bus) : in.label);
    s.input_buses.push_back(in.bus);
  }

  // Fail fast on an inconsistent case/scenario pair at the mean loads.
  {
    auto base = net;
    for (std::size_t j = 0; j < s.input_buses.size(); ++j) {
      base.set_load_power(s.input_buses[j], s.dists[j].mean());
    }
    (void)transim::init_dynamics(base, transim::solve_power_flow(base), scenario);
  }

  transim::CctOptions opts;
  opts.tol = config.cct_tol;
  opts.fct_max = config.fct_max;
  s.simulator = [net, scenario, buses = s.input_buses, opts](std::span<const double> x) {
    if (x.size() != buses.size()) throw Error(ErrorKind::argument, "input dimension mismatch");
    auto local = net;
    for (std::size_t j = 0; j < buses.size(); ++j) local.set_load_power(buses[j], x[j]);
    return transim::compute_cct(local, scenario, opts).cct;
  };
  s.network = std::move(net);
  s.scenario = std::move(scenario);
  check_study(s);
  return s;
}

std::filesystem::path journal_path(const std::filesystem::path& outdir) {
  return outdir / "samples.journal.csv";
}

StudyReport run_mcs(const Study& study) {
  check_study(study);
  const auto t_start = Clock::now();
  const auto& cfg = study.config;
  const std::size_t n = cfg.n_eval;
  const std::size_t m = study.dists.size();

  const auto design = design_for(cfg.mcs_sampling, n, m, sampling::derive_seed(cfg.seed, kTagMcs));
  StudyReport report;
  report.inputs = sampling::materialize(design, study.dists);
  report.values = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n),
                                            std::numeric_limits<double>::quiet_NaN());

  std::ofstream journal;
  std::mutex journal_mu;
  if (!cfg.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    journal.open(journal_path(cfg.output_dir), std::ios::trunc);
    if (!journal) {
      throw Error(ErrorKind::io, "cannot open journal in '" + cfg.output_dir.string() + "'");
    }
  }

  std::vector<std::string> failures(n);
  const auto t_sim = Clock::now();
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    const auto row = row_of(report.inputs, static_cast<Eigen::Index>(i));
    double v = std::numeric_limits<double>::quiet_NaN();
    try {
      v = study.simulator(row);
      if (!std::isfinite(v)) throw Error(ErrorKind::range, "simulator returned a non-finite value");
    } catch (const std::exception& e) {
      failures[i] = e.what();
      v = std::numeric_limits<double>::quiet_NaN();
    }
    report.values[static_cast<Eigen::Index>(i)] = v;
    if (journal.is_open()) {
      std::ostringstream line;
      line << i;
      for (double x : row) line << ',' << format_double(x);
      line << ',' << (std::isnan(v) ? std::string("nan") : format_double(v)) << '\n';
      std::lock_guard lock(journal_mu);
      journal << line.str() << std::flush;
    }
  });
  const double t_ed = seconds_since(t_sim);

  std::vector<double> ok;
  ok.reserve(n);
  std::size_t n_failed = 0;
  std::string first_failure;
  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i].empty()) {
      ok.push_back(report.values[static_cast<Eigen::Index>(i)]);
    } else {
      if (n_failed == 0) first_failure = "sample " + std::to_string(i) + ": " + failures[i];
      ++n_failed;
    }
  }
  if (static_cast<double>(n_failed) > 0.01 * static_cast<double>(n)) {
    throw Error(ErrorKind::study_aborted, std::to_string(n_failed) + " of " + std::to_string(n) +
                                              " samples failed (limit 1%); first: " + first_failure);
  }

  const auto stats = empirical_stats(ok, cfg.fct_for_ps, cfg.percentile);
  auto& s = report.summary;
  fill_common(s, study);
  s.estimator = "mcs";
  s.n_eval = n;
  s.n_failed = n_failed;
  s.mean = s.sample_mean = stats.mean;
  s.variance = s.sample_variance = stats.variance;
  s.probability_of_stability = stats.probability_of_stability;
  s.percentile_value = stats.percentile_value;
  s.histogram = stats.histogram;
  report.cdf = stats.cdf;
  s.timings.t_ed = t_ed;
  s.timings.t_total = seconds_since(t_start);
  return report;
}

StudyReport run_pce(const Study& study) {
  check_study(study);
  const auto t_start = Clock::now();
  const auto& cfg = study.config;
  const std::size_t m = study.dists.size();
  StudyReport report;
  auto& s = report.summary;
  fill_common(s, study);
  s.estimator = "pce";
  s.n_train = cfg.n_train;
  s.n_eval = cfg.n_eval;

  // Step 1: experimental design evaluated on the simulator.
  const auto t1 = Clock::now();
  const auto design = sampling::lhs_unit(cfg.n_train, m, sampling::derive_seed(cfg.seed, kTagTrain));
  report.train_inputs = sampling::materialize(design, study.dists);
  report.train_values.resize(static_cast<Eigen::Index>(cfg.n_train));
  parallel_for(cfg.n_train, cfg.workers, [&](std::size_t i) {
    const auto l = static_cast<Eigen::Index>(i);
    Eigen::RowVectorXd x = report.train_inputs.row(l);
    for (int attempt = 0;; ++attempt) {
      try {
        const double v = study.simulator(std::span<const double>(x.data(), m));
        if (!std::isfinite(v)) throw Error(ErrorKind::range, "simulator returned a non-finite value");
        report.train_values[l] = v;
        report.train_inputs.row(l) = x;
        return;
      } catch (const std::exception& e) {
        if (attempt == kMaxRedraws) {
          throw Error(ErrorKind::study_aborted, "training sample " + std::to_string(i) +
                                                    " failed after " + std::to_string(kMaxRedraws) +
                                                    " redraws: " + e.what());
        }
      }
      x = sampling::materialize_row(sampling::redraw_in_strata(design, l, attempt + 1), study.dists);
    }
  });
  s.timings.t_ed = seconds_since(t1);

  // Step 2: adaptive sparse fit.
  const auto t2 = Clock::now();
  auto model = spce::adaptive_fit(report.train_inputs, report.train_values, cfg.p_max, cfg.q_grid,
                                  study.dists);
  s.timings.t_pc = seconds_since(t2);

  // Step 3: statistics straight from the coefficients.
  const auto mom = spce::moments(model);
  s.mean = mom.mean;
  s.variance = mom.variance;
  if (mom.variance > 0.0) {
    const auto idx = spce::sobol_indices(model);
    SobolSummary sob;
    sob.first.assign(idx.first.data(), idx.first.data() + idx.first.size());
    sob.total.assign(idx.total.data(), idx.total.data() + idx.total.size());
    sob.ranking.resize(m);
    std::iota(sob.ranking.begin(), sob.ranking.end(), std::size_t{0});
    std::stable_sort(sob.ranking.begin(), sob.ranking.end(),
                     [&](std::size_t a, std::size_t b) { return sob.total[a] > sob.total[b]; });
    s.sobol = std::move(sob);
  }
  s.surrogate = SurrogateSummary{model.meta.p, model.meta.q, model.basis.size(),
                                 model.meta.active_terms, model.mloo};

  // Step 4: surrogate sweep for the distribution-level quantities.
  const auto t4 = Clock::now();
  const auto eval_design = sampling::lhs_unit(cfg.n_eval, m, sampling::derive_seed(cfg.seed, kTagEval));
  report.inputs = sampling::materialize(eval_design, study.dists);
  report.values = spce::eval_surrogate(model, report.inputs);
  s.timings.t_es = seconds_since(t4);

  const auto stats = empirical_stats(std::span<const double>(report.values.data(), cfg.n_eval),
                                     cfg.fct_for_ps, cfg.percentile);
  s.sample_mean = stats.mean;
  s.sample_variance = stats.variance;
  s.probability_of_stability = stats.probability_of_stability;
  s.percentile_value = stats.percentile_value;
  s.histogram = stats.histogram;
  report.cdf = stats.cdf;
  report.model = std::move(model);
  s.timings.t_total = seconds_since(t_start);
  return report;
}

std::vector<SmoothingRow> smoothing_study(const Study& study, const spce::PceModel& base_model) {
  check_study(study);
  if (base_model.basis.dims() != study.dists.size()) {
    throw Error(ErrorKind::argument, "base model dimension does not match the study");
  }
  const auto idx = spce::sobol_indices(base_model);
  const double base_variance = spce::moments(base_model).variance;
  std::vector<std::size_t> order(study.dists.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return idx.total[static_cast<Eigen::Index>(a)] > idx.total[static_cast<Eigen::Index>(b)];
  });

  std::vector<SmoothingRow> rows;
  for (std::size_t i : order) {
    SmoothingRow row;
    row.input = i;
    row.label = study.labels[i];
    row.total_index = idx.total[static_cast<Eigen::Index>(i)];
    Study smoothed = study;
    smoothed.dists[i] = Distribution::point_mass(study.dists[i].mean());
    smoothed.config.seed = sampling::derive_seed(study.config.seed, kTagSmooth + i);
    try {
      const auto rep = run_pce(smoothed);
      row.mean = rep.summary.mean;
      row.variance = rep.summary.variance;
      row.probability_of_stability = rep.summary.probability_of_stability;
      row.variance_reduction = base_variance > 0.0 ? 1.0 - row.variance / base_variance : 0.0;
      row.refit_total_index = rep.summary.sobol ? rep.summary.sobol->total[i] : 0.0;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

StudyReport run_smooth(const Study& study) {
  const auto t_start = Clock::now();
  auto report = run_pce(study);
  report.summary.smoothing = smoothing_study(study, *report.model);
  report.summary.mode = Mode::smooth;
  report.summary.timings.t_total = seconds_since(t_start);
  return report;
}

StudyReport run_cct(const Study& study) {
  check_study(study);
  const auto t_start = Clock::now();
  StudyReport report;
  auto& s = report.summary;
  fill_common(s, study);
  s.estimator = "deterministic";
  CctSummary c;
  std::vector<double> means;
  for (const auto& d : study.dists) means.push_back(d.mean());
  if (study.network && study.scenario) {
    auto net = *study.network;
    for (std::size_t j = 0; j < study.input_buses.size(); ++j) {
      net.set_load_power(study.input_buses[j], means[j]);
    }
    transim::CctOptions opts;
    opts.tol = study.config.cct_tol;
    opts.fct_max = study.config.fct_max;
    const auto r = transim::compute_cct(net, *study.scenario, opts);
    c = {r.cct, r.t_lo, r.t_hi, r.simulations};
  } else {
    const double v = study.simulator(means);
    c = {v, v, v, 1};
  }
  s.cct = c;
  s.mean = s.sample_mean = c.cct;
  s.probability_of_stability = c.cct >= study.config.fct_for_ps ? 1.0 : 0.0;
  s.percentile_value = c.cct;
  s.n_eval = 1;
  report.inputs = Eigen::Map<const Eigen::RowVectorXd>(means.data(),
                                                        static_cast<Eigen::Index>(means.size()));
  report.values = Eigen::VectorXd::Constant(1, c.cct);
  const auto stats = empirical_stats(std::span<const double>(&c.cct, 1), study.config.fct_for_ps,
                                     study.config.percentile);
  s.histogram = stats.histogram;
  report.cdf = stats.cdf;
  s.timings.t_ed = s.timings.t_total = seconds_since(t_start);
  return report;
}

StudyReport run_study(const Study& study) {
  switch (study.config.mode) {
    case Mode::mcs: return run_mcs(study);
    case Mode::pce: return run_pce(study);
    case Mode::smooth: return run_smooth(study);
    case Mode::cct: return run_cct(study);
  }
  throw Error(ErrorKind::config, "unknown mode");
}

}  // namespace pcct::pipeline
