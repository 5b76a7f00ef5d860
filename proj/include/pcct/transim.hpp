// SPDX-License-Identifier: Apache-2.0
//
// Classical-model transient stability: Newton power flow, Kron-reduced
// internal-node networks, fixed-step RK4 swing dynamics with fault
// application and clearing, and a bracketing bisection for the critical
// clearing time.
#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pcct::transim {

using Complex = std::complex<double>;

enum class BusType { slack, pv, pq };

struct Bus {
  int id = 0;
  BusType type = BusType::pq;
  double voltage = 1.0;    // magnitude setpoint / flat-start value, p.u.
  double angle_deg = 0.0;  // slack reference angle
};

struct Branch {
  int from = 0;
  int to = 0;
  double r = 0.0;
  double x = 0.0;
  double b = 0.0;    // total line charging
  double tap = 1.0;  // off-nominal ratio at the from side
};

struct Generator {
  int bus = 0;
  double h = 0.0;         // inertia constant, s
  double d = 0.0;         // damping, p.u. power / p.u. speed
  double xd_prime = 0.0;  // transient reactance, p.u.
  double p = 0.0;         // scheduled active power at PV buses, p.u.
};

struct Load {
  int bus = 0;
  double p = 0.0;
  double q = 0.0;
  double pf = 1.0;  // power factor held constant when p changes
  bool random = false;
};

struct NetworkCase {
  std::string name;
  double base_mva = 100.0;
  double frequency = 60.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  std::vector<Load> loads;

  /// Throws Error{argument} or Error{topology} when an invariant is violated.
  void validate() const;
  [[nodiscard]] std::size_t bus_index(int id) const;
  [[nodiscard]] const Load& load_at(int bus) const;
  /// New active power demand at `bus`; reactive power follows the fixed
  /// power factor.
  void set_load_power(int bus, double p);
  [[nodiscard]] std::vector<int> random_load_buses() const;
};

NetworkCase load_case(const std::filesystem::path& path);
NetworkCase case_from_json(const std::string& text);
std::string case_to_json(const NetworkCase& net);

struct FaultScenario {
  int fault_bus = 0;
  double t_fault = 1.0;
  std::pair<int, int> cleared_branch{0, 0};
  double horizon_after_clear = 10.0;
  double instability_threshold = 6.283185307179586;  // max pairwise angle spread, rad
  Complex fault_admittance{0.0, -1e6};

  void validate() const;
};

FaultScenario load_scenario(const std::filesystem::path& path);
FaultScenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const FaultScenario& scenario);

// ---------------------------------------------------------------------------
// Power flow

struct PowerFlowOptions {
  double tolerance = 1e-10;
  int max_iterations = 50;
};

struct PowerFlowResult {
  Eigen::VectorXcd voltage;            // per bus, case order
  std::vector<Complex> gen_injection;  // net complex injection per bus (generation - load)
  int iterations = 0;
  double mismatch = 0.0;  // infinity norm of the final mismatch
};

/// Bus admittance matrix; `excluded` removes one branch (either orientation).
Eigen::MatrixXcd build_ybus(const NetworkCase& net,
                            std::optional<std::pair<int, int>> excluded = std::nullopt);

PowerFlowResult solve_power_flow(const NetworkCase& net, const PowerFlowOptions& options = {});

// ---------------------------------------------------------------------------
// Dynamics

/// Constant-EMF machines behind x'd plus fixed infinite-bus sources, with the
/// three Kron-reduced admittance matrices on their internal nodes. Node order
/// is machines first (generator order), then infinite buses.
struct DynamicModel {
  std::size_t machines = 0;
  std::size_t sources = 0;
  double omega_s = 0.0;
  Eigen::VectorXd h, d, pm;
  Eigen::VectorXd e_mag;   // machines then sources
  Eigen::VectorXd delta0;  // machines then sources, rad
  Eigen::MatrixXcd y_pre, y_fault, y_post;
  Eigen::MatrixXcd ybus_post;  // unreduced post-fault bus admittance
  double threshold = 6.283185307179586;
  double t_fault = 1.0;
  double horizon_after_clear = 10.0;

  /// Electrical power of every machine at rotor angles `delta` on matrix y.
  [[nodiscard]] Eigen::VectorXd electrical_power(const Eigen::MatrixXcd& y,
                                                 const Eigen::VectorXd& delta) const;
  /// Rotor acceleration (d omega / dt, p.u./s) at the initial state on y_pre.
  [[nodiscard]] Eigen::VectorXd initial_acceleration() const;
};

DynamicModel init_dynamics(const NetworkCase& net, const PowerFlowResult& pf,
                           const FaultScenario& scenario);

struct SimOptions {
  double step = 1e-3;
  double record_interval = 1e-2;
  bool record = false;
};

struct TrajectoryPoint {
  double t = 0.0;
  std::vector<double> delta;  // machines, rad
  std::vector<double> omega;  // machines, p.u. speed deviation
  double spread = 0.0;
};

struct SimResult {
  bool stable = true;
  double max_spread = 0.0;
  std::vector<TrajectoryPoint> trajectory;
};

enum class Network { pre_fault, faulted, post_fault };

struct Segment {
  Network network = Network::pre_fault;
  double duration = 0.0;
};

/// Integrates the swing equations over consecutive network segments.
SimResult simulate_segments(const DynamicModel& model, const std::vector<Segment>& segments,
                            const SimOptions& options = {});

/// Pre-fault until t_fault, faulted for `fct`, then post-fault for the horizon.
SimResult simulate_fault(const DynamicModel& model, double fct, const SimOptions& options = {});
SimResult simulate_fault(const NetworkCase& net, const FaultScenario& scenario, double fct,
                         const SimOptions& options = {});

struct CctOptions {
  double tol = 1e-4;
  double fct_max = 2.0;
  double initial_guess = 0.1;
  SimOptions sim;
};

struct CctResult {
  double cct = 0.0;
  double t_lo = 0.0;  // stable
  double t_hi = 0.0;  // unstable
  int simulations = 0;
};

CctResult compute_cct(const DynamicModel& model, const CctOptions& options = {});
CctResult compute_cct(const NetworkCase& net, const FaultScenario& scenario,
                      const CctOptions& options = {});

}  // namespace pcct::transim
