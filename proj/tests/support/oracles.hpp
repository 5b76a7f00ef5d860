// SPDX-License-Identifier: Apache-2.0
//
// Reference values computed without the library: closed forms, brute-force
// enumeration and adaptive quadrature from Boost.
#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// Expectation of f under the standardized measure of each family.
inline double expect_gaussian(const std::function<double(double)>& f) {
  boost::math::quadrature::sinh_sinh<double> q;
  const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return q.integrate([&](double x) {
    // Beyond |x| = 40 the density underflows; avoid 0 * inf from f.
    return std::abs(x) > 40.0 ? 0.0 : f(x) * c * std::exp(-0.5 * x * x);
  });
}

inline double expect_uniform(const std::function<double(double)>& f) {
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate([&](double x) { return 0.5 * f(x); }, -1.0, 1.0);
}

// Gamma(shape, rate 1) on [0, inf).
inline double expect_gamma(double shape, const std::function<double(double)>& f) {
  boost::math::quadrature::exp_sinh<double> q;
  const double lg = std::lgamma(shape);
  return q.integrate([&](double x) {
    if (x <= 0.0 || x > 800.0) return 0.0;
    return f(x) * std::exp((shape - 1.0) * std::log(x) - x - lg);
  });
}

// Beta(a, b) mapped to [-1, 1]: density of u = (x + 1) / 2 ~ Beta(a, b).
// Shapes >= 1 keep the integrand bounded at the endpoints.
inline double expect_beta(double a, double b, const std::function<double(double)>& f) {
  boost::math::quadrature::tanh_sinh<double> q;
  const double norm = std::pow(2.0, a + b - 1.0) * boost::math::beta(a, b);
  return q.integrate(
      [&](double x) { return f(x) * std::pow(1.0 - x, b - 1.0) * std::pow(1.0 + x, a - 1.0) / norm; },
      -1.0, 1.0);
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

// Every multi-index in [0, p]^m with (sum k_j^q)^(1/q) <= p.
inline std::vector<std::vector<int>> qnorm_bruteforce(int m, int p, double q) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(static_cast<std::size_t>(m), 0);
  while (true) {
    double s = 0.0;
    for (int v : k) s += std::pow(static_cast<double>(v), q);
    if (std::pow(s, 1.0 / q) <= p + 1e-9) out.push_back(k);
    int j = 0;
    while (j < m && ++k[static_cast<std::size_t>(j)] > p) k[static_cast<std::size_t>(j++)] = 0;
    if (j == m) break;
  }
  return out;
}

struct Ishigami {
  double a = 7.0;
  double b = 0.1;
  [[nodiscard]] double operator()(double x1, double x2, double x3) const {
    return std::sin(x1) + a * std::sin(x2) * std::sin(x2) + b * std::pow(x3, 4) * std::sin(x1);
  }
  [[nodiscard]] double variance() const {
    const double pi4 = std::pow(std::numbers::pi, 4);
    return a * a / 8.0 + b * pi4 / 5.0 + b * b * pi4 * pi4 / 18.0 + 0.5;
  }
  [[nodiscard]] std::vector<double> first() const {
    const double pi4 = std::pow(std::numbers::pi, 4);
    const double v1 = 0.5 * std::pow(1.0 + b * pi4 / 5.0, 2);
    const double v2 = a * a / 8.0;
    return {v1 / variance(), v2 / variance(), 0.0};
  }
  [[nodiscard]] std::vector<double> total() const {
    const double pi4 = std::pow(std::numbers::pi, 4);
    const double v13 = 8.0 * b * b * pi4 * pi4 / 225.0;
    const auto f = first();
    return {f[0] + v13 / variance(), f[1], v13 / variance()};
  }
};

// Lossless two-bus link: slack V1 = 1 at angle 0, PQ load P + j0 at bus 2
// through reactance x. Returns (|V2|, angle of V2).
inline std::pair<double, double> two_bus_load(double p, double x) {
  // P = V2 sin(-th) / x and 0 = (V2^2 - V2 cos th) / x (no reactive demand).
  const double s = std::asin(2.0 * p * x) / 2.0;
  return {std::cos(s), -s};
}

// Single machine behind x'd on a PV bus (|V| = vg, output pm) connected to an
// infinite bus (1 at angle 0) by two identical lossless lines of reactance x.
// Fault at the machine terminal (zero electrical output), one line opened.
struct SmibCase {
  double h = 5.0;
  double pm = 0.8;
  double xd = 0.3;
  double x_line = 0.5;
  double vg = 1.0;
  double frequency = 60.0;

  [[nodiscard]] std::complex<double> emf() const {
    const double x_pre = 0.5 * x_line;
    const double th = std::asin(pm * x_pre / vg);
    const std::complex<double> v = std::polar(vg, th);
    const std::complex<double> i = (v - 1.0) / std::complex<double>(0.0, x_pre);
    return v + std::complex<double>(0.0, xd) * i;
  }

  [[nodiscard]] double cct() const {
    const double e = std::abs(emf());
    const double d0 = std::arg(emf());
    const double p_post = e / (xd + x_line);
    const double dmax = std::numbers::pi - std::asin(pm / p_post);
    const double cdc = (pm * (dmax - d0) + p_post * std::cos(dmax)) / p_post;
    const double dc = std::acos(cdc);
    const double ws = 2.0 * std::numbers::pi * frequency;
    return std::sqrt(4.0 * h * (dc - d0) / (ws * pm));
  }
};

}  // namespace oracle
