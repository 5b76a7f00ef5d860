// SPDX-License-Identifier: Apache-2.0
//
// Adaptive sparse polynomial chaos: q-norm truncation, hybrid LAR (LAR for
// basis ranking, OLS on each nested active set), corrected leave-one-out
// model selection, and coefficient-based moments and Sobol' indices.
#pragma once

#include <Eigen/Core>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcct/orthobasis.hpp"

namespace pcct::spce {

using orthobasis::Distribution;

struct MultiIndex {
  std::vector<int> degrees;

  [[nodiscard]] int total() const noexcept;
  [[nodiscard]] bool is_zero() const noexcept { return total() == 0; }
  [[nodiscard]] std::size_t size() const noexcept { return degrees.size(); }
  int operator[](std::size_t j) const noexcept { return degrees[j]; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// Ordered multivariate basis. The first index is always the zero index.
class BasisSet {
 public:
  BasisSet(std::vector<MultiIndex> indices, std::vector<Distribution> dists);

  [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
  [[nodiscard]] std::size_t dims() const noexcept { return dists_.size(); }
  [[nodiscard]] const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  [[nodiscard]] const std::vector<Distribution>& dists() const noexcept { return dists_; }
  const MultiIndex& operator[](std::size_t i) const noexcept { return indices_[i]; }

  /// Psi_i(x) for every basis term; x is physical.
  [[nodiscard]] Eigen::VectorXd evaluate_row(std::span<const double> x) const;
  /// N x L matrix of evaluate_row over the rows of `samples`.
  [[nodiscard]] Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& samples) const;

 private:
  void evaluate_into(std::span<const double> x, std::span<double> out,
                     std::vector<double>& scratch) const;

  std::vector<MultiIndex> indices_;
  std::vector<Distribution> dists_;
  std::vector<std::optional<orthobasis::PolyFamily>> families_;
  std::vector<int> max_degree_;
};

/// Multi-indices with (sum_j k_j^q)^(1/q) <= p, ordered by total degree and
/// then reverse-lexicographically. Degenerate (point mass) inputs only ever
/// carry degree 0.
BasisSet truncated_basis(std::size_t m, int p, double q, std::vector<Distribution> dists);

Eigen::VectorXd evaluate_basis_row(const BasisSet& basis, std::span<const double> x);

struct SearchCell {
  int p = 0;
  double q = 1.0;
  std::size_t basis_size = 0;
  std::size_t active_terms = 0;
  double mloo = 0.0;
  bool failed = false;
};

struct FitMeta {
  int p = 0;
  double q = 1.0;
  std::size_t n_samples = 0;
  std::size_t active_terms = 0;
  std::vector<SearchCell> trace;
  std::vector<std::string> warnings;
};

struct PceModel {
  BasisSet basis;
  Eigen::VectorXd coeffs;  // aligned with basis; coeffs[0] is the mean
  double mloo = 0.0;
  FitMeta meta;
};

/// Order in which LAR brings the non-constant columns of `design` into the
/// active set (column 0 is the intercept and is never ranked). At most
/// `max_steps` entries; the path stops early once the residual correlation
/// vanishes.
std::vector<Eigen::Index> lar_path(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                   std::size_t max_steps);

/// Corrected leave-one-out inflation factor T(P, N) = N / (N - P) * (1 + tr((A^T A)^-1)).
double loo_correction_factor(std::size_t active, std::size_t n, double trace_inverse_gram);

/// Hybrid LAR over the fixed `basis`; `design` must be basis.design_matrix(samples).
PceModel hybrid_lar_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                        const BasisSet& basis);

/// Searches (p, q) in [1, p_max] x q_grid and keeps the MLOO-minimal model.
PceModel adaptive_fit(const Eigen::MatrixXd& samples, const Eigen::VectorXd& y, int p_max,
                      std::span<const double> q_grid, std::vector<Distribution> dists);

/// True when `a` should be preferred over `b` (MLOO, then sparsity, p, q).
bool better_model(const SearchCell& a, const SearchCell& b) noexcept;

double eval_surrogate(const PceModel& model, std::span<const double> x);
Eigen::VectorXd eval_surrogate(const PceModel& model, const Eigen::MatrixXd& samples);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

Moments moments(const PceModel& model);

struct SobolIndices {
  Eigen::VectorXd first;
  Eigen::VectorXd total;
};

SobolIndices sobol_indices(const PceModel& model);

struct SobolEstimate {
  SobolIndices indices;
  Eigen::VectorXd first_se;
  Eigen::VectorXd total_se;
};

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Pick-and-freeze Monte Carlo estimate (Saltelli first order, Jansen total)
/// using n * (M + 2) evaluations of f.
SobolEstimate sobol_mc_oracle(const ScalarFunction& f, std::span<const Distribution> dists,
                              std::size_t n, std::uint64_t seed);

std::string model_to_json(const PceModel& model);
PceModel model_from_json(std::string_view text);
void save_model(const PceModel& model, const std::filesystem::path& path);
PceModel load_model(const std::filesystem::path& path);

}  // namespace pcct::spce
