// SPDX-License-Identifier: Apache-2.0
//
// pcct: command line front end for transient-stability uncertainty studies.
//
//   pcct cct    --config study.json
//   pcct mcs    --config study.json [--seed S] [--samples N_M] [--out DIR] [--workers W]
//   pcct pce    --config study.json [--seed S] [--samples N_M] [--train N] [--out DIR]
//   pcct smooth --config study.json [...]
//
// On failure a single JSON object {"status":"error","kind":...,"message":...}
// is written to stderr and the exit status is non-zero.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcct/error.hpp"
#include "pcct/pipeline.hpp"

namespace {

using json = nlohmann::ordered_json;
namespace pl = pcct::pipeline;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> train;
  std::optional<std::string> out;
  std::optional<std::size_t> workers;
};

void add_common(CLI::App* cmd, Overrides& o, bool sampling_flags) {
  cmd->add_option("--config", o.config, "study configuration file")->required();
  cmd->add_option("--out", o.out, "output directory (overrides config)");
  if (!sampling_flags) return;
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--samples", o.samples, "evaluation samples N_M");
  cmd->add_option("--train", o.train, "training samples N (pce, smooth)");
  cmd->add_option("--workers", o.workers, "worker threads");
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << json{{"status", "error"}, {"kind", kind}, {"message", message}}.dump() << '\n';
}

json brief(const pl::StudySummary& s) {
  json j{{"status", "ok"},
         {"mode", pl::to_string(s.mode)},
         {"estimator", s.estimator},
         {"mean", s.mean},
         {"variance", s.variance},
         {"probability_of_stability", s.probability_of_stability},
         {"fct_for_ps", s.fct_for_ps},
         {"percentile_value", s.percentile_value},
         {"n_failed", s.n_failed}};
  if (s.cct) j["cct"] = s.cct->cct;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic critical clearing time studies"};
  app.require_subcommand(1);
  Overrides o;
  auto* cct = app.add_subcommand("cct", "single deterministic CCT at the mean loads");
  auto* mcs = app.add_subcommand("mcs", "Monte Carlo study on the simulator");
  auto* pce = app.add_subcommand("pce", "sparse PCE study");
  auto* smooth = app.add_subcommand("smooth", "PCE study followed by single-input smoothing");
  add_common(cct, o, false);
  for (auto* cmd : {mcs, pce, smooth}) add_common(cmd, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    auto config = pl::load_config(o.config);
    if (app.got_subcommand(cct)) config.mode = pl::Mode::cct;
    if (app.got_subcommand(mcs)) config.mode = pl::Mode::mcs;
    if (app.got_subcommand(pce)) config.mode = pl::Mode::pce;
    if (app.got_subcommand(smooth)) config.mode = pl::Mode::smooth;
    if (o.seed) config.seed = *o.seed;
    if (o.samples) config.n_eval = *o.samples;
    if (o.train) config.n_train = *o.train;
    if (o.out) config.output_dir = *o.out;
    if (o.workers) config.workers = *o.workers;
    config.validate();

    const auto study = pl::make_study(config);
    const auto report = pl::run_study(study);
    pl::emit_report(report, config.output_dir);
    auto line = brief(report.summary);
    line["output_dir"] = config.output_dir.string();
    std::cout << line.dump() << '\n';
    return 0;
  } catch (const pcct::Error& e) {
    print_error(std::string(pcct::to_string(e.kind())), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
}
