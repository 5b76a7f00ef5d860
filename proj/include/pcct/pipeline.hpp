// SPDX-License-Identifier: Apache-2.0
//
// Study orchestration: configuration, the sample-simulate-fit-evaluate
// chain, empirical statistics, smoothing studies and report files.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcct/orthobasis.hpp"
#include "pcct/spce.hpp"
#include "pcct/transim.hpp"

namespace pcct::pipeline {

using orthobasis::Distribution;

enum class Mode { mcs, pce, smooth, cct };
enum class SamplingScheme { lhs, random };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);
std::string to_string(SamplingScheme scheme);
SamplingScheme scheme_from_string(const std::string& s);

struct RandomInput {
  int bus = 0;
  std::string label;
  std::optional<Distribution> dist;  // unset: Gaussian, mean = load P, std = 10% of mean
};

struct StudyConfig {
  std::filesystem::path case_path;
  std::filesystem::path scenario_path;
  std::vector<RandomInput> random_inputs;  // empty: every load flagged random in the case
  Mode mode = Mode::pce;
  std::size_t n_train = 30;
  std::size_t n_eval = 10000;
  std::uint64_t seed = 1;
  double cct_tol = 1e-4;
  double fct_max = 2.0;
  double fct_for_ps = 0.083;
  double percentile = 5.0;
  int p_max = 10;
  std::vector<double> q_grid{0.5, 0.75, 1.0};
  SamplingScheme mcs_sampling = SamplingScheme::lhs;
  std::size_t workers = 1;
  std::filesystem::path output_dir = "out";

  /// Throws Error{config} on an invalid field.
  void validate() const;
};

/// Relative paths inside the document are resolved against `base_dir`.
StudyConfig config_from_json(const std::string& text, const std::filesystem::path& base_dir = {});
std::string config_to_json(const StudyConfig& config);
StudyConfig load_config(const std::filesystem::path& path);

/// Maps one physical input vector to a PCCT value. Must be safe to call
/// concurrently from several threads.
using Simulator = std::function<double(std::span<const double>)>;

/// Everything a run needs: resolved inputs, their labels and the simulator.
struct Study {
  StudyConfig config;
  std::vector<Distribution> dists;
  std::vector<std::string> labels;
  Simulator simulator;
  // Set for power-system studies; used by the single-CCT mode.
  std::optional<transim::NetworkCase> network;
  std::optional<transim::FaultScenario> scenario;
  std::vector<int> input_buses;
};

/// Loads case and scenario, resolves default inputs and builds the CCT
/// simulator (power flow, dynamic model and binary search per call).
Study make_study(const StudyConfig& config);

/// Study over an arbitrary function, e.g. an analytic test response.
Study make_study(const StudyConfig& config, std::vector<Distribution> dists,
                 std::vector<std::string> labels, Simulator simulator);

/// Runs fn(i) for i in [0, n) on up to `workers` threads. The first
/// exception thrown by any task is rethrown after all threads join.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Statistics

struct Histogram {
  std::vector<double> edges;      // bins + 1 ascending edges
  std::vector<double> densities;  // integrate to 1 over the edges
  friend bool operator==(const Histogram&, const Histogram&) = default;
};

struct Cdf {
  std::vector<double> x;  // distinct sample values, ascending
  std::vector<double> p;  // fraction of samples <= x
};

struct EmpiricalStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double probability_of_stability = 0.0;
  double percentile_value = 0.0;
  Histogram histogram;
  Cdf cdf;
};

/// Freedman-Diaconis histogram; a constant sample gets one unit-width bin.
Histogram fd_histogram(std::span<const double> sorted);
/// Linear interpolation between order statistics, p in [0, 100].
double percentile_of(std::span<const double> sorted, double p);
EmpiricalStats empirical_stats(std::span<const double> samples, double fct, double percentile);

// ---------------------------------------------------------------------------
// Reports

struct Timings {
  double t_ed = 0.0;  // simulator evaluations (training set, or all MCS samples)
  double t_pc = 0.0;  // surrogate fit
  double t_es = 0.0;  // surrogate evaluation of the N_M points
  double t_total = 0.0;
};

struct SobolSummary {
  std::vector<double> first;
  std::vector<double> total;
  std::vector<std::size_t> ranking;  // input indices by descending total index
  friend bool operator==(const SobolSummary&, const SobolSummary&) = default;
};

struct SurrogateSummary {
  int p = 0;
  double q = 1.0;
  std::size_t basis_size = 0;
  std::size_t active_terms = 0;
  double mloo = 0.0;
  friend bool operator==(const SurrogateSummary&, const SurrogateSummary&) = default;
};

struct SmoothingRow {
  std::size_t input = 0;
  std::string label;
  double total_index = 0.0;  // in the base model
  bool failed = false;
  std::string error;
  double mean = 0.0;
  double variance = 0.0;
  double probability_of_stability = 0.0;
  double variance_reduction = 0.0;  // 1 - smoothed / base variance
  double refit_total_index = 0.0;   // of the smoothed input, in the refit
  friend bool operator==(const SmoothingRow&, const SmoothingRow&) = default;
};

struct CctSummary {
  double cct = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int simulations = 0;
  friend bool operator==(const CctSummary&, const CctSummary&) = default;
};

/// Scalar content of a report; exactly what summary.json carries.
struct StudySummary {
  Mode mode = Mode::pce;
  std::string estimator;  // "mcs" or "pce": which estimator produced mean/variance/P(S)
  std::vector<std::string> labels;
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  std::size_t n_eval = 0;
  std::size_t n_failed = 0;
  double mean = 0.0;
  double variance = 0.0;
  double sample_mean = 0.0;      // of the N_M evaluated values
  double sample_variance = 0.0;  // of the N_M evaluated values
  double fct_for_ps = 0.0;
  double probability_of_stability = 0.0;
  double percentile = 0.0;
  double percentile_value = 0.0;
  Histogram histogram;
  std::optional<SobolSummary> sobol;
  std::optional<SurrogateSummary> surrogate;
  std::optional<CctSummary> cct;
  std::vector<SmoothingRow> smoothing;
  Timings timings;

  /// Field-wise equality excluding wall-clock timings.
  [[nodiscard]] bool same_statistics(const StudySummary& other) const;
};

struct StudyReport {
  StudySummary summary;
  Cdf cdf;
  Eigen::MatrixXd inputs;      // N_M x M evaluated points
  Eigen::VectorXd values;      // PCCT per point (NaN for an excluded failure)
  Eigen::MatrixXd train_inputs;
  Eigen::VectorXd train_values;
  std::optional<spce::PceModel> model;
};

/// Monte Carlo over the simulator. When config.output_dir is set, each
/// finished sample is appended to a journal in that directory.
StudyReport run_mcs(const Study& study);
/// Training set, adaptive fit, coefficient statistics and surrogate sweep.
StudyReport run_pce(const Study& study);
/// Smoothing table over the inputs of `base_model`, ranked by total index.
std::vector<SmoothingRow> smoothing_study(const Study& study, const spce::PceModel& base_model);
/// run_pce followed by smoothing_study on its model.
StudyReport run_smooth(const Study& study);
/// Single deterministic CCT at the input means.
StudyReport run_cct(const Study& study);
/// Dispatches on config.mode.
StudyReport run_study(const Study& study);

std::string summary_to_json(const StudySummary& summary);
StudySummary summary_from_json(const std::string& text);

/// Writes summary.json, samples.csv, histogram.csv, cdf.csv and, when
/// present, training.csv and model.json into `outdir`. Returns the paths.
std::vector<std::filesystem::path> emit_report(const StudyReport& report,
                                               const std::filesystem::path& outdir);

/// Journal file used by run_mcs inside `outdir`.
std::filesystem::path journal_path(const std::filesystem::path& outdir);

}  // namespace pcct::pipeline
