// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pcct/error.hpp"
#include "pcct/transim.hpp"

namespace pcct::transim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool connected_without(const NetworkCase& net, const std::pair<int, int>& removed) {
  std::vector<std::vector<std::size_t>> adj(net.buses.size());
  bool skipped = false;
  for (const auto& br : net.branches) {
    if (!skipped && ((br.from == removed.first && br.to == removed.second) ||
                     (br.from == removed.second && br.to == removed.first))) {
      skipped = true;
      continue;
    }
    const auto a = net.bus_index(br.from);
    const auto b = net.bus_index(br.to);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(net.buses.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == net.buses.size();
}

// Kron reduction of `full` onto `kept` nodes.
Eigen::MatrixXcd reduce(const Eigen::MatrixXcd& full, const std::vector<Eigen::Index>& kept) {
  const Eigen::Index n = full.rows();
  std::vector<bool> is_kept(static_cast<std::size_t>(n), false);
  for (auto k : kept) is_kept[static_cast<std::size_t>(k)] = true;
  std::vector<Eigen::Index> elim;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!is_kept[static_cast<std::size_t>(i)]) elim.push_back(i);
  }
  const auto nk = static_cast<Eigen::Index>(kept.size());
  const auto ne = static_cast<Eigen::Index>(elim.size());
  Eigen::MatrixXcd ykk(nk, nk), yke(nk, ne), yek(ne, nk), yee(ne, ne);
  for (Eigen::Index a = 0; a < nk; ++a) {
    for (Eigen::Index b = 0; b < nk; ++b) ykk(a, b) = full(kept[a], kept[b]);
    for (Eigen::Index b = 0; b < ne; ++b) yke(a, b) = full(kept[a], elim[b]);
  }
  for (Eigen::Index a = 0; a < ne; ++a) {
    for (Eigen::Index b = 0; b < nk; ++b) yek(a, b) = full(elim[a], kept[b]);
    for (Eigen::Index b = 0; b < ne; ++b) yee(a, b) = full(elim[a], elim[b]);
  }
  if (ne == 0) return ykk;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(yee);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::topology, "singular network reduction (islanded node)");
  }
  return ykk - yke * lu.solve(yek);
}

}  // namespace

Eigen::VectorXd DynamicModel::electrical_power(const Eigen::MatrixXcd& y,
                                               const Eigen::VectorXd& delta) const {
  const auto n = static_cast<Eigen::Index>(machines + sources);
  Eigen::VectorXcd e(n);
  for (Eigen::Index k = 0; k < n; ++k) e[k] = std::polar(e_mag[k], delta[k]);
  const Eigen::VectorXcd current = y * e;
  Eigen::VectorXd pe(static_cast<Eigen::Index>(machines));
  for (Eigen::Index i = 0; i < pe.size(); ++i) pe[i] = (e[i] * std::conj(current[i])).real();
  return pe;
}

Eigen::VectorXd DynamicModel::initial_acceleration() const {
  const Eigen::VectorXd pe = electrical_power(y_pre, delta0);
  return (pm - pe).cwiseQuotient(2.0 * h);
}

DynamicModel init_dynamics(const NetworkCase& net, const PowerFlowResult& pf,
                           const FaultScenario& scenario) {
  scenario.validate();
  const auto nb = static_cast<Eigen::Index>(net.buses.size());
  const auto ng = static_cast<Eigen::Index>(net.generators.size());
  if (pf.voltage.size() != nb) {
    throw Error(ErrorKind::argument, "power-flow solution does not match the case");
  }
  const auto fault_idx = static_cast<Eigen::Index>(net.bus_index(scenario.fault_bus));
  if (!connected_without(net, scenario.cleared_branch)) {
    throw Error(ErrorKind::topology, "removing branch " +
                                         std::to_string(scenario.cleared_branch.first) + "-" +
                                         std::to_string(scenario.cleared_branch.second) +
                                         " islands part of the network");
  }

  DynamicModel model;
  model.machines = static_cast<std::size_t>(ng);
  model.omega_s = 2.0 * std::numbers::pi * net.frequency;
  model.threshold = scenario.instability_threshold;
  model.t_fault = scenario.t_fault;
  model.horizon_after_clear = scenario.horizon_after_clear;

  // Infinite buses: the slack bus when it has no machine attached.
  std::vector<Eigen::Index> source_bus;
  for (Eigen::Index i = 0; i < nb; ++i) {
    const auto& b = net.buses[static_cast<std::size_t>(i)];
    if (b.type != BusType::slack) continue;
    const bool has_gen = std::any_of(net.generators.begin(), net.generators.end(),
                                     [&](const Generator& g) { return g.bus == b.id; });
    if (!has_gen) source_bus.push_back(i);
  }
  model.sources = source_bus.size();
  const auto n_nodes = ng + static_cast<Eigen::Index>(model.sources);

  model.h.resize(ng);
  model.d.resize(ng);
  model.pm.resize(ng);
  model.e_mag.resize(n_nodes);
  model.delta0.resize(n_nodes);

  for (Eigen::Index g = 0; g < ng; ++g) {
    const auto& gen = net.generators[static_cast<std::size_t>(g)];
    const auto bi = static_cast<Eigen::Index>(net.bus_index(gen.bus));
    Complex s_gen = pf.gen_injection[static_cast<std::size_t>(bi)];
    for (const auto& l : net.loads) {
      if (l.bus == gen.bus) s_gen += Complex(l.p, l.q);
    }
    const Complex v = pf.voltage[bi];
    const Complex current = std::conj(s_gen / v);
    const Complex e = v + Complex(0.0, gen.xd_prime) * current;
    model.h[g] = gen.h;
    model.d[g] = gen.d;
    model.pm[g] = s_gen.real();
    model.e_mag[g] = std::abs(e);
    model.delta0[g] = std::arg(e);
  }
  for (std::size_t s = 0; s < model.sources; ++s) {
    const Complex v = pf.voltage[source_bus[s]];
    const auto k = ng + static_cast<Eigen::Index>(s);
    model.e_mag[k] = std::abs(v);
    model.delta0[k] = std::arg(v);
  }

  // Extended admittance: machine internal nodes first, then every bus.
  const auto extend = [&](const Eigen::MatrixXcd& ybus, bool faulted) {
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(ng + nb, ng + nb);
    y.bottomRightCorner(nb, nb) = ybus;
    for (const auto& l : net.loads) {
      const auto bi = static_cast<Eigen::Index>(net.bus_index(l.bus));
      const double vm2 = std::norm(pf.voltage[bi]);
      y(ng + bi, ng + bi) += Complex(l.p, -l.q) / vm2;
    }
    for (Eigen::Index g = 0; g < ng; ++g) {
      const auto& gen = net.generators[static_cast<std::size_t>(g)];
      const auto bi = ng + static_cast<Eigen::Index>(net.bus_index(gen.bus));
      const Complex yg = 1.0 / Complex(0.0, gen.xd_prime);
      y(g, g) += yg;
      y(bi, bi) += yg;
      y(g, bi) -= yg;
      y(bi, g) -= yg;
    }
    if (faulted) y(ng + fault_idx, ng + fault_idx) += scenario.fault_admittance;
    return y;
  };

  std::vector<Eigen::Index> kept;
  for (Eigen::Index g = 0; g < ng; ++g) kept.push_back(g);
  for (auto b : source_bus) kept.push_back(ng + b);

  const Eigen::MatrixXcd ybus_pre = build_ybus(net);
  model.ybus_post = build_ybus(net, scenario.cleared_branch);
  model.y_pre = reduce(extend(ybus_pre, false), kept);
  model.y_fault = reduce(extend(ybus_pre, true), kept);
  model.y_post = reduce(extend(model.ybus_post, false), kept);
  return model;
}

// ---------------------------------------------------------------------------
// Time-domain simulation

SimResult simulate_segments(const DynamicModel& model, const std::vector<Segment>& segments,
                            const SimOptions& options) {
  if (!(options.step > 0.0)) throw Error(ErrorKind::argument, "integration step must be > 0");
  const auto nm = static_cast<Eigen::Index>(model.machines);
  const auto n = nm + static_cast<Eigen::Index>(model.sources);

  Eigen::VectorXd delta = model.delta0;
  Eigen::VectorXd omega = Eigen::VectorXd::Zero(nm);
  const Eigen::VectorXd two_h = 2.0 * model.h;
  Eigen::VectorXcd e(n), current(n);

  SimResult result;
  const auto spread_of = [&](const Eigen::VectorXd& d) { return d.maxCoeff() - d.minCoeff(); };
  result.max_spread = spread_of(delta);

  double t = 0.0;
  double next_record = 0.0;
  const auto record = [&](double spread) {
    if (!options.record || t + 1e-12 < next_record) return;
    result.trajectory.push_back({t, std::vector<double>(delta.data(), delta.data() + nm),
                                 std::vector<double>(omega.data(), omega.data() + nm), spread});
    next_record += options.record_interval;
  };
  record(result.max_spread);

  // Derivatives at (d, w) on admittance y; source angles stay fixed.
  const auto rhs = [&](const Eigen::MatrixXcd& y, const Eigen::VectorXd& d, const Eigen::VectorXd& w,
                       Eigen::VectorXd& dd, Eigen::VectorXd& dw) {
    for (Eigen::Index k = 0; k < n; ++k) e[k] = std::polar(model.e_mag[k], d[k]);
    current.noalias() = y * e;
    for (Eigen::Index i = 0; i < nm; ++i) {
      const double pe = (e[i] * std::conj(current[i])).real();
      dd[i] = model.omega_s * w[i];
      dw[i] = (model.pm[i] - pe - model.d[i] * w[i]) / two_h[i];
    }
  };

  Eigen::VectorXd k1d(nm), k1w(nm), k2d(nm), k2w(nm), k3d(nm), k3w(nm), k4d(nm), k4w(nm);
  Eigen::VectorXd dtmp = delta, wtmp(nm);

  for (const auto& seg : segments) {
    if (!(seg.duration > 0.0)) continue;
    const Eigen::MatrixXcd& y = seg.network == Network::pre_fault   ? model.y_pre
                                : seg.network == Network::faulted ? model.y_fault
                                                                  : model.y_post;
    // Uniform sub-steps so segment boundaries (fault, clearing) are hit exactly.
    const auto steps = static_cast<long>(std::ceil(seg.duration / options.step - 1e-9));
    const double hs = seg.duration / static_cast<double>(std::max(steps, 1L));
    const double t0 = t;
    for (long s = 0; s < std::max(steps, 1L); ++s) {
      rhs(y, delta, omega, k1d, k1w);
      dtmp.head(nm) = delta.head(nm) + 0.5 * hs * k1d;
      wtmp = omega + 0.5 * hs * k1w;
      rhs(y, dtmp, wtmp, k2d, k2w);
      dtmp.head(nm) = delta.head(nm) + 0.5 * hs * k2d;
      wtmp = omega + 0.5 * hs * k2w;
      rhs(y, dtmp, wtmp, k3d, k3w);
      dtmp.head(nm) = delta.head(nm) + hs * k3d;
      wtmp = omega + hs * k3w;
      rhs(y, dtmp, wtmp, k4d, k4w);
      delta.head(nm) += hs / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
      omega += hs / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
      t = t0 + hs * static_cast<double>(s + 1);

      if (!delta.allFinite() || !omega.allFinite()) {
        result.stable = false;
        result.max_spread = kInf;
        return result;
      }
      const double spread = spread_of(delta);
      result.max_spread = std::max(result.max_spread, spread);
      record(spread);
      if (spread >= model.threshold) {
        result.stable = false;
        return result;
      }
    }
  }
  return result;
}

SimResult simulate_fault(const DynamicModel& model, double fct, const SimOptions& options) {
  if (!(fct >= 0.0)) throw Error(ErrorKind::argument, "fault clearing time must be >= 0");
  return simulate_segments(model,
                           {{Network::pre_fault, model.t_fault},
                            {Network::faulted, fct},
                            {Network::post_fault, model.horizon_after_clear}},
                           options);
}

SimResult simulate_fault(const NetworkCase& net, const FaultScenario& scenario, double fct,
                         const SimOptions& options) {
  const auto pf = solve_power_flow(net);
  return simulate_fault(init_dynamics(net, pf, scenario), fct, options);
}

CctResult compute_cct(const DynamicModel& model, const CctOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorKind::argument, "CCT tolerance must be > 0");
  if (!(options.fct_max > 0.0)) throw Error(ErrorKind::argument, "fct_max must be > 0");
  CctResult out;
  const auto stable_at = [&](double fct) {
    ++out.simulations;
    return simulate_fault(model, fct, options.sim).stable;
  };
  if (!stable_at(0.0)) {
    throw Error(ErrorKind::precondition, "system is unstable even for an instantaneous clearing");
  }
  double lo = 0.0;
  double hi = std::min(options.initial_guess, options.fct_max);
  while (stable_at(hi)) {
    lo = hi;
    if (hi >= options.fct_max) {
      throw Error(ErrorKind::search_range,
                  "no instability within search range (CCT exceeds fct_max = " +
                      std::to_string(options.fct_max) + " s)");
    }
    hi = std::min(2.0 * hi, options.fct_max);
  }
  while (hi - lo > options.tol) {
    const double mid = 0.5 * (lo + hi);
    if (stable_at(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.t_lo = lo;
  out.t_hi = hi;
  out.cct = 0.5 * (lo + hi);
  return out;
}

CctResult compute_cct(const NetworkCase& net, const FaultScenario& scenario,
                      const CctOptions& options) {
  const auto pf = solve_power_flow(net);
  return compute_cct(init_dynamics(net, pf, scenario), options);
}

}  // namespace pcct::transim
