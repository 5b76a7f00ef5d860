// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "oracles.hpp"
#include "pcct/pipeline.hpp"
#include "pcct/transim.hpp"

namespace fixture {

inline std::filesystem::path data(const std::string& name) {
  return std::filesystem::path(PCCT_DATA_DIR) / name;
}

inline pcct::transim::NetworkCase two_bus(double p, double x) {
  using namespace pcct::transim;
  NetworkCase net;
  net.name = "two-bus";
  net.buses = {{1, BusType::slack, 1.0, 0.0}, {2, BusType::pq, 1.0, 0.0}};
  net.branches = {{1, 2, 0.0, x, 0.0, 1.0}};
  net.loads = {{2, p, 0.0, 1.0, false}};
  return net;
}

// Bus 1 is the infinite bus (slack, no machine); bus 2 carries the machine.
inline pcct::transim::NetworkCase smib(const oracle::SmibCase& c) {
  using namespace pcct::transim;
  NetworkCase net;
  net.name = "smib";
  net.frequency = c.frequency;
  net.buses = {{1, BusType::slack, 1.0, 0.0}, {2, BusType::pv, c.vg, 0.0}};
  net.branches = {{1, 2, 0.0, c.x_line, 0.0, 1.0}, {1, 2, 0.0, c.x_line, 0.0, 1.0}};
  net.generators = {{2, c.h, 0.0, c.xd, c.pm}};
  return net;
}

inline pcct::transim::FaultScenario smib_fault() {
  pcct::transim::FaultScenario s;
  s.fault_bus = 2;
  s.t_fault = 0.5;
  s.cleared_branch = {1, 2};
  s.horizon_after_clear = 5.0;
  return s;
}

inline pcct::pipeline::StudyConfig wscc_config() {
  auto cfg = pcct::pipeline::load_config(data("wscc9_study.json"));
  cfg.output_dir.clear();
  return cfg;
}

}  // namespace fixture
