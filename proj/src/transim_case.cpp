// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "json_detail.hpp"
#include "pcct/transim.hpp"

namespace pcct::transim {

using detail::json;

namespace {

BusType bus_type_from(const std::string& s) {
  if (s == "slack" || s == "swing") return BusType::slack;
  if (s == "pv") return BusType::pv;
  if (s == "pq") return BusType::pq;
  throw Error(ErrorKind::config, "unknown bus type '" + s + "'");
}

std::string to_string(BusType t) {
  switch (t) {
    case BusType::slack: return "slack";
    case BusType::pv: return "pv";
    case BusType::pq: return "pq";
  }
  return "pq";
}

double reactive_for(double p, double pf, double sign) {
  return sign * p * std::tan(std::acos(pf));
}

}  // namespace

void NetworkCase::validate() const {
  const auto fail = [](const std::string& msg) { throw Error(ErrorKind::argument, "case: " + msg); };
  if (buses.empty()) fail("no buses");
  if (!(base_mva > 0.0) || !(frequency > 0.0)) fail("base_mva and frequency must be positive");

  std::set<int> ids;
  std::size_t slack = 0;
  for (const auto& b : buses) {
    if (!ids.insert(b.id).second) fail("duplicate bus id " + std::to_string(b.id));
    if (!(b.voltage > 0.0)) fail("bus voltage must be positive");
    if (b.type == BusType::slack) ++slack;
  }
  if (slack != 1) fail("exactly one slack bus required");

  for (const auto& br : branches) {
    if (!ids.count(br.from) || !ids.count(br.to)) fail("branch references unknown bus");
    if (br.from == br.to) fail("branch endpoints must differ");
    if (std::hypot(br.r, br.x) <= 0.0) fail("branch impedance must be non-zero");
    if (!(br.tap > 0.0)) fail("branch tap must be positive");
  }

  std::set<int> gen_buses;
  for (const auto& g : generators) {
    if (!ids.count(g.bus)) fail("generator references unknown bus");
    if (!gen_buses.insert(g.bus).second) fail("at most one generator per bus");
    if (!(g.h > 0.0)) fail("generator inertia H must be > 0");
    if (!(g.xd_prime > 0.0)) fail("generator x'd must be > 0");
    if (g.d < 0.0) fail("generator damping must be >= 0");
    if (buses[bus_index(g.bus)].type == BusType::pq) fail("generator on a PQ bus");
  }
  for (const auto& b : buses) {
    if (b.type == BusType::pv && !gen_buses.count(b.id)) fail("PV bus without generator");
  }

  std::set<int> load_buses;
  for (const auto& l : loads) {
    if (!ids.count(l.bus)) fail("load references unknown bus");
    if (!load_buses.insert(l.bus).second) fail("at most one load per bus");
    if (!(l.pf > 0.0 && l.pf <= 1.0)) fail("load power factor must lie in (0, 1]");
    const double expected = reactive_for(l.p, l.pf, l.q < 0.0 ? -1.0 : 1.0);
    if (std::abs(expected - l.q) > 1e-6 * std::max(1.0, std::abs(l.p))) {
      fail("load Q at bus " + std::to_string(l.bus) + " inconsistent with its power factor");
    }
  }

  // Connectivity (breadth-first over branches).
  std::vector<std::vector<std::size_t>> adj(buses.size());
  for (const auto& br : branches) {
    const auto a = bus_index(br.from);
    const auto b = bus_index(br.to);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(buses.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error(ErrorKind::topology, "case: network is not connected");
  }
}

std::size_t NetworkCase::bus_index(int id) const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == id) return i;
  }
  throw Error(ErrorKind::argument, "unknown bus id " + std::to_string(id));
}

const Load& NetworkCase::load_at(int bus) const {
  for (const auto& l : loads) {
    if (l.bus == bus) return l;
  }
  throw Error(ErrorKind::argument, "no load at bus " + std::to_string(bus));
}

void NetworkCase::set_load_power(int bus, double p) {
  for (auto& l : loads) {
    if (l.bus == bus) {
      const double sign = l.q < 0.0 ? -1.0 : 1.0;
      l.p = p;
      l.q = reactive_for(p, l.pf, sign);
      return;
    }
  }
  throw Error(ErrorKind::argument, "no load at bus " + std::to_string(bus));
}

std::vector<int> NetworkCase::random_load_buses() const {
  std::vector<int> out;
  for (const auto& l : loads) {
    if (l.random) out.push_back(l.bus);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON codecs

NetworkCase case_from_json(const std::string& text) {
  NetworkCase net;
  try {
    const json j = json::parse(text);
    net.name = j.value("name", std::string{});
    net.base_mva = j.value("base_mva", 100.0);
    net.frequency = j.value("frequency", 60.0);
    for (const auto& b : j.at("buses")) {
      net.buses.push_back({b.at("id"), bus_type_from(b.at("type")), b.value("voltage", 1.0),
                           b.value("angle", 0.0)});
    }
    for (const auto& b : j.at("branches")) {
      double tap = b.value("tap", 1.0);
      if (tap == 0.0) tap = 1.0;
      net.branches.push_back({b.at("from"), b.at("to"), b.value("r", 0.0), b.value("x", 0.0),
                              b.value("b", 0.0), tap});
    }
    for (const auto& g : j.at("generators")) {
      net.generators.push_back({g.at("bus"), g.at("h"), g.value("d", 0.0), g.at("xd_prime"),
                                g.value("p", 0.0)});
    }
    for (const auto& l : j.value("loads", json::array())) {
      Load load;
      load.bus = l.at("bus");
      load.p = l.at("p");
      load.q = l.value("q", 0.0);
      const double s = std::hypot(load.p, load.q);
      load.pf = l.contains("pf") ? l.at("pf").get<double>() : (s > 0.0 ? std::abs(load.p) / s : 1.0);
      if (!l.contains("q") && l.contains("pf")) load.q = reactive_for(load.p, load.pf, 1.0);
      load.random = l.value("random", false);
      net.loads.push_back(load);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("malformed case document: ") + e.what());
  }
  net.validate();
  return net;
}

std::string case_to_json(const NetworkCase& net) {
  json j;
  j["name"] = net.name;
  j["base_mva"] = net.base_mva;
  j["frequency"] = net.frequency;
  j["buses"] = json::array();
  for (const auto& b : net.buses) {
    j["buses"].push_back({{"id", b.id}, {"type", to_string(b.type)}, {"voltage", b.voltage},
                          {"angle", b.angle_deg}});
  }
  j["branches"] = json::array();
  for (const auto& b : net.branches) {
    j["branches"].push_back({{"from", b.from}, {"to", b.to}, {"r", b.r}, {"x", b.x}, {"b", b.b},
                             {"tap", b.tap}});
  }
  j["generators"] = json::array();
  for (const auto& g : net.generators) {
    j["generators"].push_back({{"bus", g.bus}, {"h", g.h}, {"d", g.d}, {"xd_prime", g.xd_prime},
                               {"p", g.p}});
  }
  j["loads"] = json::array();
  for (const auto& l : net.loads) {
    j["loads"].push_back({{"bus", l.bus}, {"p", l.p}, {"q", l.q}, {"pf", l.pf},
                          {"random", l.random}});
  }
  return j.dump(2) + "\n";
}

NetworkCase load_case(const std::filesystem::path& path) {
  return case_from_json(detail::read_json_file(path).dump());
}

void FaultScenario::validate() const {
  if (!(t_fault >= 0.0)) throw Error(ErrorKind::argument, "scenario: t_fault must be >= 0");
  if (!(horizon_after_clear > 0.0)) {
    throw Error(ErrorKind::argument, "scenario: horizon_after_clear must be > 0");
  }
  if (!(instability_threshold > 0.0)) {
    throw Error(ErrorKind::argument, "scenario: instability_threshold must be > 0");
  }
  if (std::abs(fault_admittance) == 0.0) {
    throw Error(ErrorKind::argument, "scenario: fault admittance must be non-zero");
  }
}

FaultScenario scenario_from_json(const std::string& text) {
  FaultScenario s;
  try {
    const json j = json::parse(text);
    s.fault_bus = j.at("fault_bus");
    s.t_fault = j.value("t_fault", 1.0);
    const auto br = j.at("cleared_branch").get<std::vector<int>>();
    if (br.size() != 2) throw Error(ErrorKind::config, "cleared_branch must be [from, to]");
    s.cleared_branch = {br[0], br[1]};
    s.horizon_after_clear = j.value("horizon_after_clear", 10.0);
    s.instability_threshold = j.value("instability_threshold", s.instability_threshold);
    if (j.contains("fault_admittance")) {
      const auto y = j.at("fault_admittance").get<std::vector<double>>();
      if (y.size() != 2) throw Error(ErrorKind::config, "fault_admittance must be [re, im]");
      s.fault_admittance = {y[0], y[1]};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("malformed scenario document: ") + e.what());
  }
  s.validate();
  return s;
}

std::string scenario_to_json(const FaultScenario& s) {
  json j;
  j["fault_bus"] = s.fault_bus;
  j["t_fault"] = s.t_fault;
  j["cleared_branch"] = {s.cleared_branch.first, s.cleared_branch.second};
  j["horizon_after_clear"] = s.horizon_after_clear;
  j["instability_threshold"] = s.instability_threshold;
  j["fault_admittance"] = {s.fault_admittance.real(), s.fault_admittance.imag()};
  return j.dump(2) + "\n";
}

FaultScenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(detail::read_json_file(path).dump());
}

}  // namespace pcct::transim
