// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "pcct/error.hpp"
#include "pcct/transim.hpp"

using namespace pcct::transim;
using pcct::ErrorKind;

namespace {

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const pcct::Error& e) {
    return e.kind();
  }
  FAIL("expected pcct::Error");
  return ErrorKind::argument;
}

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

TEST_SUITE("transim") {
  TEST_CASE("two-bus power flow matches the closed form") {
    const auto net = fixture::two_bus(0.5, 0.1);
    const auto pf = solve_power_flow(net);
    const auto [vm, va] = oracle::two_bus_load(0.5, 0.1);
    CHECK(std::abs(pf.voltage[1]) == doctest::Approx(vm).epsilon(1e-9));
    CHECK(std::arg(pf.voltage[1]) == doctest::Approx(va).epsilon(1e-9));
    CHECK(pf.mismatch < 1e-10);
  }

  TEST_CASE("wscc base case matches the published solution") {
    const auto net = load_case(fixture::data("wscc9.json"));
    const auto pf = solve_power_flow(net);
    const double vm[] = {1.040, 1.025, 1.025, 1.0258, 0.9956, 1.0127, 1.0258, 1.0159, 1.0324};
    const double va[] = {0.0, 9.280, 4.665, -2.217, -3.989, -3.687, 3.720, 0.728, 1.967};
    for (int i = 0; i < 9; ++i) {
      CHECK(std::abs(std::abs(pf.voltage[i]) - vm[i]) < 1e-3);
      CHECK(std::abs(std::arg(pf.voltage[i]) / kDeg - va[i]) < 0.1);
    }
    // Slack output of the published case: 0.716 + j0.270.
    CHECK(pf.gen_injection[0].real() == doctest::Approx(0.716).epsilon(2e-3));
  }

  TEST_CASE("power flow divergence is reported with the last mismatch") {
    auto net = fixture::two_bus(8.0, 0.1);
    try {
      (void)solve_power_flow(net);
      FAIL("expected divergence");
    } catch (const pcct::NonConvergenceError& e) {
      CHECK(e.kind() == ErrorKind::non_convergence);
      CHECK(e.last_mismatch() > 1e-8);
    }
  }

  TEST_CASE("case validation") {
    auto net = fixture::two_bus(0.5, 0.1);
    net.buses[1].type = BusType::slack;
    CHECK(kind_of([&] { net.validate(); }) == ErrorKind::argument);
    auto island = fixture::two_bus(0.5, 0.1);
    island.buses.push_back({3, BusType::pq, 1.0, 0.0});
    CHECK(kind_of([&] { island.validate(); }) == ErrorKind::topology);
    auto bad_pf = fixture::two_bus(0.5, 0.1);
    bad_pf.loads[0].q = 0.3;
    CHECK(kind_of([&] { bad_pf.validate(); }) == ErrorKind::argument);
  }

  TEST_CASE("load scaling keeps the power factor") {
    auto net = load_case(fixture::data("wscc9.json"));
    const double pf0 = net.load_at(5).pf;
    net.set_load_power(5, 1.5);
    CHECK(net.load_at(5).p == 1.5);
    CHECK(net.load_at(5).q == doctest::Approx(1.5 * 0.5 / 1.25));
    CHECK(net.load_at(5).pf == pf0);
    CHECK(kind_of([&] { net.set_load_power(4, 1.0); }) == ErrorKind::argument);
  }

  TEST_CASE("case and scenario documents round trip") {
    const auto net = load_case(fixture::data("wscc9.json"));
    const auto again = case_from_json(case_to_json(net));
    CHECK(case_to_json(again) == case_to_json(net));
    const auto sc = load_scenario(fixture::data("wscc9_bus7.json"));
    CHECK(scenario_to_json(scenario_from_json(scenario_to_json(sc))) == scenario_to_json(sc));
    CHECK(sc.cleared_branch == std::pair{5, 7});
    CHECK(kind_of([] { (void)case_from_json("{\"buses\": 3}"); }) == ErrorKind::config);
  }

  TEST_CASE("dynamic model starts in equilibrium") {
    const auto net = load_case(fixture::data("wscc9.json"));
    const auto sc = load_scenario(fixture::data("wscc9_bus7.json"));
    const auto model = init_dynamics(net, solve_power_flow(net), sc);
    CHECK(model.machines == 3);
    CHECK(model.sources == 0);
    CHECK(model.initial_acceleration().cwiseAbs().maxCoeff() < 1e-9);
    // Without a fault the rotor angles stay put.
    const auto r = simulate_segments(model, {{Network::pre_fault, 2.0}});
    CHECK(r.stable);
    CHECK(r.max_spread == doctest::Approx(model.delta0.maxCoeff() - model.delta0.minCoeff()).epsilon(1e-9));
  }

  TEST_CASE("trajectory recording and instability detection") {
    const auto net = load_case(fixture::data("wscc9.json"));
    const auto sc = load_scenario(fixture::data("wscc9_bus7.json"));
    const auto model = init_dynamics(net, solve_power_flow(net), sc);
    SimOptions opt;
    opt.record = true;
    opt.record_interval = 0.1;
    const auto stable = simulate_fault(model, 0.05, opt);
    CHECK(stable.stable);
    CHECK(stable.trajectory.size() >= 100);
    CHECK(stable.trajectory.front().t == 0.0);
    const auto unstable = simulate_fault(model, 0.4);
    CHECK_FALSE(unstable.stable);
    CHECK(unstable.max_spread >= sc.instability_threshold);
  }

  TEST_CASE("smib critical clearing time matches equal area") {
    oracle::SmibCase c;
    const auto net = fixture::smib(c);
    const auto r = compute_cct(net, fixture::smib_fault());
    CHECK(std::abs(r.cct - c.cct()) < 2e-4);
    CHECK(r.t_hi - r.t_lo <= 1e-4);
    CHECK(r.t_lo < c.cct() + 1e-4);
  }

  TEST_CASE("islanding clearance and search range errors") {
    const auto net = load_case(fixture::data("wscc9.json"));
    auto sc = load_scenario(fixture::data("wscc9_bus7.json"));
    auto radial = sc;
    radial.cleared_branch = {1, 4};
    CHECK(kind_of([&] { (void)init_dynamics(net, solve_power_flow(net), radial); }) == ErrorKind::topology);
    auto missing = sc;
    missing.cleared_branch = {1, 9};
    CHECK(kind_of([&] { (void)init_dynamics(net, solve_power_flow(net), missing); }) == ErrorKind::argument);
    CctOptions opt;
    opt.fct_max = 0.02;
    CHECK(kind_of([&] { (void)compute_cct(net, sc, opt); }) == ErrorKind::search_range);
  }
}
