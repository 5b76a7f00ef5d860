// SPDX-License-Identifier: Apache-2.0
#include "pcct/orthobasis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "pcct/error.hpp"

namespace pcct::orthobasis {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::argument, message);
}

std::vector<double> hermite_beta(int n) {
  std::vector<double> beta(n + 1);
  beta[0] = 1.0;
  for (int k = 1; k <= n; ++k) beta[k] = k;
  return beta;
}

std::vector<double> legendre_beta(int n) {
  std::vector<double> beta(n + 1);
  beta[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    const double kk = static_cast<double>(k) * k;
    beta[k] = kk / (4.0 * kk - 1.0);
  }
  return beta;
}

// Generalized Laguerre, weight x^s e^{-x} with s = shape - 1.
PolyFamily laguerre(double shape, int n) {
  std::vector<double> alpha(n + 1), beta(n + 1);
  beta[0] = 1.0;
  for (int k = 0; k <= n; ++k) {
    alpha[k] = 2.0 * k + shape;
    if (k > 0) beta[k] = k * (k + shape - 1.0);
  }
  return {PolyKind::laguerre, std::move(alpha), std::move(beta)};
}

// Jacobi, weight (1-x)^a (1+x)^b on (-1, 1).
PolyFamily jacobi(double a, double b, int n) {
  std::vector<double> alpha(n + 1), beta(n + 1);
  const double ab = a + b;
  alpha[0] = (b - a) / (ab + 2.0);
  beta[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    const double s = 2.0 * k + ab;
    alpha[k] = (b * b - a * a) / (s * (s + 2.0));
    if (k == 1) {
      // General formula has a removable (a + b + 1) factor.
      beta[k] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      beta[k] = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
  }
  return {PolyKind::jacobi, std::move(alpha), std::move(beta)};
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::gaussian: return "gaussian";
    case Family::uniform: return "uniform";
    case Family::gamma: return "gamma";
    case Family::beta: return "beta";
    case Family::point_mass: return "point_mass";
  }
  return "unknown";
}

std::string_view to_string(PolyKind kind) noexcept {
  switch (kind) {
    case PolyKind::hermite: return "hermite";
    case PolyKind::legendre: return "legendre";
    case PolyKind::laguerre: return "laguerre";
    case PolyKind::jacobi: return "jacobi";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  if (name == "gaussian" || name == "normal") return Family::gaussian;
  if (name == "uniform") return Family::uniform;
  if (name == "gamma") return Family::gamma;
  if (name == "beta") return Family::beta;
  if (name == "point_mass" || name == "constant") return Family::point_mass;
  throw Error(ErrorKind::unsupported, "unsupported distribution '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Distribution

Distribution Distribution::gaussian(double mean, double std) {
  require(std::isfinite(mean), "gaussian mean must be finite");
  require(positive_finite(std), "gaussian std must be > 0");
  return {Family::gaussian, {mean, std, 0.0, 0.0}, 2};
}

Distribution Distribution::uniform(double lower, double upper) {
  require(std::isfinite(lower) && std::isfinite(upper) && lower < upper,
          "uniform bounds must satisfy lower < upper");
  return {Family::uniform, {lower, upper, 0.0, 0.0}, 2};
}

Distribution Distribution::gamma(double shape, double rate) {
  require(positive_finite(shape) && positive_finite(rate), "gamma shape and rate must be > 0");
  return {Family::gamma, {shape, rate, 0.0, 0.0}, 2};
}

Distribution Distribution::beta(double shape_a, double shape_b, double lower, double upper) {
  require(positive_finite(shape_a) && positive_finite(shape_b), "beta shapes must be > 0");
  require(std::isfinite(lower) && std::isfinite(upper) && lower < upper,
          "beta bounds must satisfy lower < upper");
  return {Family::beta, {shape_a, shape_b, lower, upper}, 4};
}

Distribution Distribution::point_mass(double value) {
  require(std::isfinite(value), "point mass value must be finite");
  return {Family::point_mass, {value, 0.0, 0.0, 0.0}, 1};
}

std::span<const double> Distribution::params() const noexcept {
  return {params_.data(), count_};
}

double Distribution::mean() const noexcept {
  const auto& p = params_;
  switch (family_) {
    case Family::gaussian: return p[0];
    case Family::uniform: return 0.5 * (p[0] + p[1]);
    case Family::gamma: return p[0] / p[1];
    case Family::beta: return p[2] + (p[3] - p[2]) * p[0] / (p[0] + p[1]);
    case Family::point_mass: return p[0];
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Distribution::variance() const noexcept {
  const auto& p = params_;
  switch (family_) {
    case Family::gaussian: return p[1] * p[1];
    case Family::uniform: return (p[1] - p[0]) * (p[1] - p[0]) / 12.0;
    case Family::gamma: return p[0] / (p[1] * p[1]);
    case Family::beta: {
      const double s = p[0] + p[1];
      const double w = p[3] - p[2];
      return w * w * p[0] * p[1] / (s * s * (s + 1.0));
    }
    case Family::point_mass: return 0.0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

bool Distribution::in_support(double x) const noexcept {
  if (!std::isfinite(x)) return false;
  const auto& p = params_;
  switch (family_) {
    case Family::gaussian: return true;
    case Family::uniform: return x >= p[0] && x <= p[1];
    case Family::gamma: return x >= 0.0;
    case Family::beta: return x >= p[2] && x <= p[3];
    case Family::point_mass: return std::abs(x - p[0]) <= 1e-12 * std::max(1.0, std::abs(p[0]));
  }
  return false;
}

// ---------------------------------------------------------------------------
// PolyFamily

PolyFamily::PolyFamily(PolyKind kind, std::vector<double> alpha, std::vector<double> beta)
    : kind_(kind), alpha_(std::move(alpha)), beta_(std::move(beta)) {
  if (alpha_.empty() || alpha_.size() != beta_.size()) {
    throw Error(ErrorKind::argument, "recurrence tables must be non-empty and equally sized");
  }
  sqrt_beta_.resize(beta_.size());
  norms_sq_.resize(beta_.size());
  double running = 1.0;
  for (std::size_t k = 0; k < beta_.size(); ++k) {
    if (!(beta_[k] > 0.0)) {
      throw Error(ErrorKind::argument, "recurrence beta_k must be positive");
    }
    sqrt_beta_[k] = std::sqrt(beta_[k]);
    running *= beta_[k];
    norms_sq_[k] = running;
  }
}

double PolyFamily::eval(int degree, double x) const {
  if (degree < 0 || degree > max_degree()) {
    throw Error(ErrorKind::range, "polynomial degree " + std::to_string(degree) +
                                      " exceeds recurrence depth " + std::to_string(max_degree()));
  }
  if (degree == 0) return 1.0;
  double prev = 1.0;
  double cur = (x - alpha_[0]) / sqrt_beta_[1];
  for (int k = 1; k < degree; ++k) {
    const double next = ((x - alpha_[k]) * cur - sqrt_beta_[k] * prev) / sqrt_beta_[k + 1];
    prev = cur;
    cur = next;
  }
  return cur;
}

void PolyFamily::eval_all(double x, std::span<double> out) const {
  if (out.empty()) return;
  const auto n = static_cast<int>(out.size()) - 1;
  if (n > max_degree()) {
    throw Error(ErrorKind::range, "polynomial degree " + std::to_string(n) +
                                      " exceeds recurrence depth " + std::to_string(max_degree()));
  }
  out[0] = 1.0;
  if (n == 0) return;
  out[1] = (x - alpha_[0]) / sqrt_beta_[1];
  for (int k = 1; k < n; ++k) {
    out[k + 1] = ((x - alpha_[k]) * out[k] - sqrt_beta_[k] * out[k - 1]) / sqrt_beta_[k + 1];
  }
}

PolyFamily family_for(const Distribution& dist, int max_degree) {
  if (max_degree < 0) throw Error(ErrorKind::argument, "max_degree must be >= 0");
  const auto p = dist.params();
  switch (dist.family()) {
    case Family::gaussian:
      return {PolyKind::hermite, std::vector<double>(max_degree + 1, 0.0), hermite_beta(max_degree)};
    case Family::uniform:
      return {PolyKind::legendre, std::vector<double>(max_degree + 1, 0.0), legendre_beta(max_degree)};
    case Family::gamma:
      return laguerre(p[0], max_degree);
    case Family::beta:
      return jacobi(p[1] - 1.0, p[0] - 1.0, max_degree);
    case Family::point_mass:
      break;
  }
  throw Error(ErrorKind::unsupported,
              "unsupported distribution '" + std::string(to_string(dist.family())) +
                  "' has no orthonormal polynomial family");
}

double eval_orthonormal(const PolyFamily& family, int degree, double x) {
  return family.eval(degree, x);
}

double transform(const Distribution& dist, double value, Direction direction) {
  const auto p = dist.params();
  const auto domain_error = [&] {
    return Error(ErrorKind::domain, "value " + std::to_string(value) + " outside the support of " +
                                        std::string(to_string(dist.family())));
  };
  if (direction == Direction::to_standard) {
    if (!dist.in_support(value)) throw domain_error();
    switch (dist.family()) {
      case Family::gaussian: return (value - p[0]) / p[1];
      case Family::uniform: return 2.0 * (value - p[0]) / (p[1] - p[0]) - 1.0;
      case Family::gamma: return value * p[1];
      case Family::beta: return 2.0 * (value - p[2]) / (p[3] - p[2]) - 1.0;
      case Family::point_mass: return 0.0;
    }
  } else {
    if (!std::isfinite(value)) throw domain_error();
    switch (dist.family()) {
      case Family::gaussian: return p[0] + p[1] * value;
      case Family::uniform:
        if (value < -1.0 || value > 1.0) throw domain_error();
        return p[0] + 0.5 * (value + 1.0) * (p[1] - p[0]);
      case Family::gamma:
        if (value < 0.0) throw domain_error();
        return value / p[1];
      case Family::beta:
        if (value < -1.0 || value > 1.0) throw domain_error();
        return p[2] + 0.5 * (value + 1.0) * (p[3] - p[2]);
      case Family::point_mass: return p[0];
    }
  }
  throw domain_error();
}

GaussRule gauss_rule(const PolyFamily& family, int nodes) {
  if (nodes < 1 || nodes > family.max_degree() + 1) {
    throw Error(ErrorKind::range, "gauss rule size must be in [1, max_degree + 1]");
  }
  Eigen::VectorXd diag(nodes);
  Eigen::VectorXd sub(std::max(nodes - 1, 0));
  const auto alpha = family.alpha();
  const auto beta = family.beta();
  for (int k = 0; k < nodes; ++k) diag[k] = alpha[k];
  for (int k = 1; k < nodes; ++k) sub[k - 1] = std::sqrt(beta[k]);

  GaussRule rule;
  rule.nodes.resize(nodes);
  rule.weights.resize(nodes);
  if (nodes == 1) {
    rule.nodes[0] = diag[0];
    rule.weights[0] = 1.0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::non_convergence, "Golub-Welsch eigen decomposition failed");
  }
  for (int i = 0; i < nodes; ++i) {
    rule.nodes[i] = solver.eigenvalues()[i];
    const double v = solver.eigenvectors()(0, i);
    rule.weights[i] = v * v;
  }
  return rule;
}

}  // namespace pcct::orthobasis
