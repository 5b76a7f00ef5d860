// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "pcct/error.hpp"
#include "pcct/transim.hpp"

namespace pcct::transim {

Eigen::MatrixXcd build_ybus(const NetworkCase& net, std::optional<std::pair<int, int>> excluded) {
  const auto n = static_cast<Eigen::Index>(net.buses.size());
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
  bool removed = false;
  for (const auto& br : net.branches) {
    if (excluded && !removed &&
        ((br.from == excluded->first && br.to == excluded->second) ||
         (br.from == excluded->second && br.to == excluded->first))) {
      removed = true;
      continue;
    }
    const auto f = static_cast<Eigen::Index>(net.bus_index(br.from));
    const auto t = static_cast<Eigen::Index>(net.bus_index(br.to));
    const Complex ys = 1.0 / Complex(br.r, br.x);
    const Complex ysh(0.0, 0.5 * br.b);
    const double tap = br.tap;
    y(f, f) += (ys + ysh) / (tap * tap);
    y(t, t) += ys + ysh;
    y(f, t) -= ys / tap;
    y(t, f) -= ys / tap;
  }
  if (excluded && !removed) {
    throw Error(ErrorKind::argument, "branch " + std::to_string(excluded->first) + "-" +
                                         std::to_string(excluded->second) + " not in case");
  }
  return y;
}

PowerFlowResult solve_power_flow(const NetworkCase& net, const PowerFlowOptions& options) {
  net.validate();
  const auto n = static_cast<Eigen::Index>(net.buses.size());
  const Eigen::MatrixXcd ybus = build_ybus(net);

  Eigen::VectorXcd s_spec = Eigen::VectorXcd::Zero(n);
  for (const auto& g : net.generators) {
    s_spec[static_cast<Eigen::Index>(net.bus_index(g.bus))] += Complex(g.p, 0.0);
  }
  for (const auto& l : net.loads) {
    s_spec[static_cast<Eigen::Index>(net.bus_index(l.bus))] -= Complex(l.p, l.q);
  }

  std::vector<Eigen::Index> pvpq, pq;
  Eigen::VectorXd vm(n), va(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& b = net.buses[static_cast<std::size_t>(i)];
    vm[i] = b.type == BusType::pq ? 1.0 : b.voltage;
    va[i] = b.type == BusType::slack ? b.angle_deg * std::numbers::pi / 180.0 : 0.0;
    if (b.type != BusType::slack) pvpq.push_back(i);
    if (b.type == BusType::pq) pq.push_back(i);
  }
  const auto npvpq = static_cast<Eigen::Index>(pvpq.size());
  const auto npq = static_cast<Eigen::Index>(pq.size());

  const auto phasor = [&] {
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = std::polar(vm[i], va[i]);
    return v;
  };
  const auto mismatch_vector = [&](const Eigen::VectorXcd& v) {
    const Eigen::VectorXcd mis = v.cwiseProduct((ybus * v).conjugate()) - s_spec;
    Eigen::VectorXd f(npvpq + npq);
    for (Eigen::Index k = 0; k < npvpq; ++k) f[k] = mis[pvpq[static_cast<std::size_t>(k)]].real();
    for (Eigen::Index k = 0; k < npq; ++k) f[npvpq + k] = mis[pq[static_cast<std::size_t>(k)]].imag();
    return f;
  };

  Eigen::VectorXcd v = phasor();
  Eigen::VectorXd f = mismatch_vector(v);
  double norm = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
  int iter = 0;
  while (norm >= options.tolerance) {
    if (iter >= options.max_iterations || !std::isfinite(norm)) {
      throw NonConvergenceError("power flow did not converge after " + std::to_string(iter) +
                                    " iterations (mismatch " + std::to_string(norm) + " p.u.)",
                                norm);
    }
    // dS/dVa and dS/dVm.
    const Eigen::VectorXcd ibus = ybus * v;
    Eigen::VectorXcd vnorm(n);
    for (Eigen::Index i = 0; i < n; ++i) vnorm[i] = v[i] / std::abs(v[i]);
    const Eigen::MatrixXcd dva =
        Complex(0.0, 1.0) * v.asDiagonal() *
        (Eigen::MatrixXcd(ibus.asDiagonal()) - ybus * v.asDiagonal()).conjugate();
    const Eigen::MatrixXcd dvm = v.asDiagonal() * (ybus * vnorm.asDiagonal()).conjugate() +
                                 Eigen::MatrixXcd(ibus.conjugate().asDiagonal()) * vnorm.asDiagonal();

    Eigen::MatrixXd jac(npvpq + npq, npvpq + npq);
    for (Eigen::Index r = 0; r < npvpq; ++r) {
      const auto br = pvpq[static_cast<std::size_t>(r)];
      for (Eigen::Index c = 0; c < npvpq; ++c) jac(r, c) = dva(br, pvpq[static_cast<std::size_t>(c)]).real();
      for (Eigen::Index c = 0; c < npq; ++c) jac(r, npvpq + c) = dvm(br, pq[static_cast<std::size_t>(c)]).real();
    }
    for (Eigen::Index r = 0; r < npq; ++r) {
      const auto br = pq[static_cast<std::size_t>(r)];
      for (Eigen::Index c = 0; c < npvpq; ++c) jac(npvpq + r, c) = dva(br, pvpq[static_cast<std::size_t>(c)]).imag();
      for (Eigen::Index c = 0; c < npq; ++c) jac(npvpq + r, npvpq + c) = dvm(br, pq[static_cast<std::size_t>(c)]).imag();
    }
    const Eigen::VectorXd dx = jac.partialPivLu().solve(-f);
    for (Eigen::Index k = 0; k < npvpq; ++k) va[pvpq[static_cast<std::size_t>(k)]] += dx[k];
    for (Eigen::Index k = 0; k < npq; ++k) vm[pq[static_cast<std::size_t>(k)]] += dx[npvpq + k];
    v = phasor();
    f = mismatch_vector(v);
    norm = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    ++iter;
  }

  PowerFlowResult result;
  result.voltage = v;
  result.iterations = iter;
  result.mismatch = norm;
  const Eigen::VectorXcd s = v.cwiseProduct((ybus * v).conjugate());
  result.gen_injection.assign(s.data(), s.data() + s.size());
  return result;
}

}  // namespace pcct::transim
