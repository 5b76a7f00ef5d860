// SPDX-License-Identifier: Apache-2.0
#include "pcct/sampling.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <vector>

#include "pcct/error.hpp"

namespace pcct::sampling {

namespace {

constexpr std::uint64_t kTagLhsColumn = 0x4c48'5343;  // "LHSC"
constexpr std::uint64_t kTagRandomRow = 0x524e'4452;  // "RNDR"
constexpr std::uint64_t kTagRedraw = 0x5244'5257;     // "RDRW"

void push_u64(std::vector<std::uint32_t>& out, std::uint64_t v) {
  out.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
  out.push_back(static_cast<std::uint32_t>(v >> 32));
}

// (stratum + jitter) / n, nudged so that floor(value * n) == stratum exactly.
double place_in_stratum(std::size_t stratum, double jitter, std::size_t n) {
  const double dn = static_cast<double>(n);
  const double k = static_cast<double>(stratum);
  double v = (k + jitter) / dn;
  while (v * dn >= k + 1.0) v = std::nextafter(v, 0.0);
  while (v * dn < k || v <= 0.0) v = std::nextafter(v, 1.0);
  return v;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (keys.size() + 1));
  push_u64(words, seed);
  for (auto k : keys) push_u64(words, k);
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

double Rng::uniform_open() {
  // (k + 0.5) * 2^-53 for k in [0, 2^53) never hits 0 or 1.
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorKind::argument, "Rng::below requires bound > 0");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return draw % bound;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

DesignMatrix lhs_unit(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n == 0 || m == 0) throw Error(ErrorKind::argument, "lhs_unit requires N >= 1 and M >= 1");
  DesignMatrix design;
  design.seed = seed;
  design.unit.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < m; ++j) {
    Rng rng(seed, {kTagLhsColumn, j});
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
      const auto swap_with = static_cast<std::size_t>(rng.below(i));
      std::swap(perm[i - 1], perm[swap_with]);
    }
    for (std::size_t l = 0; l < n; ++l) {
      design.unit(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) =
          place_in_stratum(perm[l], rng.uniform_open(), n);
    }
  }
  return design;
}

DesignMatrix random_unit(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n == 0 || m == 0) throw Error(ErrorKind::argument, "random_unit requires N >= 1 and M >= 1");
  DesignMatrix design;
  design.seed = seed;
  design.unit.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t l = 0; l < n; ++l) {
    Rng rng(seed, {kTagRandomRow, l});
    for (std::size_t j = 0; j < m; ++j) {
      design.unit(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = rng.uniform_open();
    }
  }
  return design;
}

Eigen::RowVectorXd redraw_in_strata(const DesignMatrix& design, Eigen::Index row, int attempt) {
  const auto n = static_cast<std::size_t>(design.rows());
  Rng rng(design.seed, {kTagRedraw, static_cast<std::uint64_t>(row),
                        static_cast<std::uint64_t>(attempt)});
  Eigen::RowVectorXd out(design.cols());
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    const double u = design.unit(row, j);
    auto stratum = static_cast<std::size_t>(std::floor(u * static_cast<double>(n)));
    if (stratum >= n) stratum = n - 1;
    out[j] = place_in_stratum(stratum, rng.uniform_open(), n);
  }
  return out;
}

double inverse_cdf(const orthobasis::Distribution& dist, double u) {
  using orthobasis::Family;
  const auto p = dist.params();
  if (!(u >= 0.0 && u <= 1.0)) {
    throw Error(ErrorKind::domain, "inverse_cdf argument must lie in [0, 1]");
  }
  const bool interior = u > 0.0 && u < 1.0;
  switch (dist.family()) {
    case Family::uniform:
      return p[0] + u * (p[1] - p[0]);
    case Family::point_mass:
      return p[0];
    case Family::gaussian:
      if (!interior) break;
      return boost::math::quantile(boost::math::normal_distribution<double>(p[0], p[1]), u);
    case Family::gamma:
      if (u == 0.0) return 0.0;
      if (!interior) break;
      return boost::math::quantile(boost::math::gamma_distribution<double>(p[0], 1.0 / p[1]), u);
    case Family::beta:
      return p[2] + (p[3] - p[2]) *
                        boost::math::quantile(boost::math::beta_distribution<double>(p[0], p[1]), u);
  }
  throw Error(ErrorKind::domain, "inverse_cdf of an unbounded distribution at 0 or 1");
}

Eigen::RowVectorXd materialize_row(const Eigen::RowVectorXd& unit_row,
                                   std::span<const orthobasis::Distribution> dists) {
  if (static_cast<std::size_t>(unit_row.size()) != dists.size()) {
    throw Error(ErrorKind::argument, "materialize: one distribution per design column required");
  }
  Eigen::RowVectorXd out(unit_row.size());
  for (Eigen::Index j = 0; j < unit_row.size(); ++j) {
    out[j] = inverse_cdf(dists[static_cast<std::size_t>(j)], unit_row[j]);
  }
  return out;
}

Eigen::MatrixXd materialize(const DesignMatrix& design,
                            std::span<const orthobasis::Distribution> dists) {
  if (static_cast<std::size_t>(design.cols()) != dists.size()) {
    throw Error(ErrorKind::argument, "materialize: one distribution per design column required");
  }
  Eigen::MatrixXd out(design.rows(), design.cols());
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    for (Eigen::Index l = 0; l < design.rows(); ++l) {
      out(l, j) = inverse_cdf(dists[static_cast<std::size_t>(j)], design.unit(l, j));
    }
  }
  return out;
}

}  // namespace pcct::sampling
