// SPDX-License-Identifier: Apache-2.0
//
// Input marginals, their matched orthonormal polynomial families and the
// isoprobabilistic map between physical and standardized variables.
//
//   gaussian(mean, std)               -> hermite   on N(0, 1)
//   uniform(lower, upper)             -> legendre  on U(-1, 1)
//   gamma(shape, rate)                -> laguerre  on Gamma(shape, 1)
//   beta(a, b, lower, upper)          -> jacobi    on (-1, 1), weight (1-x)^(b-1) (1+x)^(a-1)
//
// Polynomials are orthonormal with respect to the standardized probability
// density, so psi_0 == 1 and E[psi_m psi_n] == delta_mn.
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcct::orthobasis {

enum class Family { gaussian, uniform, gamma, beta, point_mass };
enum class PolyKind { hermite, legendre, laguerre, jacobi };
enum class Direction { to_standard, from_standard };

std::string_view to_string(Family family) noexcept;
std::string_view to_string(PolyKind kind) noexcept;
Family family_from_string(std::string_view name);

/// Marginal distribution of one random input. Immutable value type; the
/// factories validate parameters and throw Error{argument} on violation.
class Distribution {
 public:
  static Distribution gaussian(double mean, double std);
  static Distribution uniform(double lower, double upper);
  static Distribution gamma(double shape, double rate);
  static Distribution beta(double shape_a, double shape_b, double lower, double upper);
  /// Zero-variance input, used when a random input is smoothed to a constant.
  static Distribution point_mass(double value);

  [[nodiscard]] Family family() const noexcept { return family_; }
  /// Family-specific parameters in declaration order (unused slots are 0).
  [[nodiscard]] std::span<const double> params() const noexcept;

  [[nodiscard]] double mean() const noexcept;
  [[nodiscard]] double variance() const noexcept;
  [[nodiscard]] bool is_degenerate() const noexcept { return family_ == Family::point_mass; }
  [[nodiscard]] bool in_support(double x) const noexcept;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  Distribution(Family family, std::array<double, 4> params, std::size_t count)
      : family_(family), params_(params), count_(count) {}

  Family family_;
  std::array<double, 4> params_;
  std::size_t count_;
};

/// Recurrence data of a univariate orthonormal family.
///
/// The monic polynomials satisfy p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1},
/// with beta_0 = 1 (probability measure); squared norms are the running
/// products beta_0 ... beta_k.
class PolyFamily {
 public:
  PolyFamily(PolyKind kind, std::vector<double> alpha, std::vector<double> beta);

  [[nodiscard]] PolyKind kind() const noexcept { return kind_; }
  [[nodiscard]] int max_degree() const noexcept { return static_cast<int>(alpha_.size()) - 1; }
  [[nodiscard]] std::span<const double> alpha() const noexcept { return alpha_; }
  [[nodiscard]] std::span<const double> beta() const noexcept { return beta_; }
  [[nodiscard]] std::span<const double> norms_squared() const noexcept { return norms_sq_; }

  /// psi_degree(x); throws Error{range} when degree > max_degree().
  [[nodiscard]] double eval(int degree, double x) const;
  /// psi_0(x) ... psi_{out.size()-1}(x) in one recurrence sweep.
  void eval_all(double x, std::span<double> out) const;

 private:
  PolyKind kind_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  std::vector<double> sqrt_beta_;
  std::vector<double> norms_sq_;
};

inline constexpr int kDefaultMaxDegree = 24;

/// Matched family for a non-degenerate marginal; point masses throw
/// Error{unsupported}.
PolyFamily family_for(const Distribution& dist, int max_degree = kDefaultMaxDegree);

double eval_orthonormal(const PolyFamily& family, int degree, double x);

/// Physical <-> standardized variable; throws Error{domain} outside support.
double transform(const Distribution& dist, double value, Direction direction);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1 (probability measure)
};

/// Gauss rule with `nodes` points for the family's measure (Golub-Welsch).
GaussRule gauss_rule(const PolyFamily& family, int nodes);

}  // namespace pcct::orthobasis
