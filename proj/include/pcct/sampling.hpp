// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

#include "pcct/orthobasis.hpp"

namespace pcct::sampling {

/// Seedable random stream. Substreams are keyed by (seed, keys...) through
/// std::seed_seq, so a column or sample index always sees the same numbers
/// regardless of how many other streams exist.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, {}) {}
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  /// Uniform double in the open interval (0, 1), 53-bit resolution.
  double uniform_open();
  /// Uniform integer in [0, bound); rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// Mixes a tag into a seed (splitmix64 finalizer). Used to derive
/// independent seeds for the stages of one study.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

struct DesignMatrix {
  Eigen::MatrixXd unit;  // N x M, entries in (0, 1)
  std::uint64_t seed = 0;

  [[nodiscard]] Eigen::Index rows() const noexcept { return unit.rows(); }
  [[nodiscard]] Eigen::Index cols() const noexcept { return unit.cols(); }
};

/// Latin hypercube design with uniform jitter inside each stratum.
DesignMatrix lhs_unit(std::size_t n, std::size_t m, std::uint64_t seed);

/// N x M matrix of independent uniforms, row l drawn from substream (seed, l).
DesignMatrix random_unit(std::size_t n, std::size_t m, std::uint64_t seed);

/// Fresh point in the same LHS strata as `row`, drawn from substream
/// (seed, row, attempt). Used to replace a failed training sample.
Eigen::RowVectorXd redraw_in_strata(const DesignMatrix& design, Eigen::Index row, int attempt);

double inverse_cdf(const orthobasis::Distribution& dist, double u);

/// Entry (l, j) = inverse CDF of dists[j] at unit(l, j).
Eigen::MatrixXd materialize(const DesignMatrix& design,
                            std::span<const orthobasis::Distribution> dists);
Eigen::RowVectorXd materialize_row(const Eigen::RowVectorXd& unit_row,
                                   std::span<const orthobasis::Distribution> dists);

}  // namespace pcct::sampling
