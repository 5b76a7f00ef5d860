// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pcct/error.hpp"
#include "pcct/spce.hpp"

namespace pcct::spce {

int MultiIndex::total() const noexcept {
  return std::accumulate(degrees.begin(), degrees.end(), 0);
}

BasisSet::BasisSet(std::vector<MultiIndex> indices, std::vector<Distribution> dists)
    : indices_(std::move(indices)), dists_(std::move(dists)) {
  if (indices_.empty() || !indices_.front().is_zero()) {
    throw Error(ErrorKind::argument, "basis must start with the zero multi-index");
  }
  const std::size_t m = dists_.size();
  max_degree_.assign(m, 0);
  std::set<std::vector<int>> seen;
  for (const auto& idx : indices_) {
    if (idx.size() != m) {
      throw Error(ErrorKind::argument, "multi-index length does not match input dimension");
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (idx[j] < 0) throw Error(ErrorKind::argument, "multi-index entries must be >= 0");
      if (idx[j] > 0 && dists_[j].is_degenerate()) {
        throw Error(ErrorKind::argument, "degenerate input cannot carry a non-zero degree");
      }
      max_degree_[j] = std::max(max_degree_[j], idx[j]);
    }
    if (!seen.insert(idx.degrees).second) {
      throw Error(ErrorKind::argument, "duplicate multi-index in basis");
    }
  }
  families_.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (!dists_[j].is_degenerate()) {
      families_[j] = orthobasis::family_for(dists_[j], std::max(max_degree_[j], 1));
    }
  }
}

void BasisSet::evaluate_into(std::span<const double> x, std::span<double> out,
                             std::vector<double>& scratch) const {
  const std::size_t m = dims();
  if (x.size() != m) throw Error(ErrorKind::argument, "input vector length does not match basis");
  // scratch holds psi_0..psi_maxdeg for every dimension, back to back.
  std::size_t offset_total = 0;
  for (std::size_t j = 0; j < m; ++j) offset_total += static_cast<std::size_t>(max_degree_[j]) + 1;
  scratch.resize(offset_total);
  std::vector<std::size_t> offset(m);
  std::size_t pos = 0;
  for (std::size_t j = 0; j < m; ++j) {
    offset[j] = pos;
    const auto width = static_cast<std::size_t>(max_degree_[j]) + 1;
    const double z = orthobasis::transform(dists_[j], x[j], orthobasis::Direction::to_standard);
    if (families_[j]) {
      families_[j]->eval_all(z, std::span<double>(scratch).subspan(pos, width));
    } else {
      scratch[pos] = 1.0;
    }
    pos += width;
  }
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    double v = 1.0;
    const auto& idx = indices_[i];
    for (std::size_t j = 0; j < m; ++j) {
      if (idx[j] != 0) v *= scratch[offset[j] + static_cast<std::size_t>(idx[j])];
    }
    out[i] = v;
  }
}

Eigen::VectorXd BasisSet::evaluate_row(std::span<const double> x) const {
  Eigen::VectorXd row(static_cast<Eigen::Index>(size()));
  std::vector<double> scratch;
  evaluate_into(x, std::span<double>(row.data(), size()), scratch);
  return row;
}

Eigen::MatrixXd BasisSet::design_matrix(const Eigen::MatrixXd& samples) const {
  if (static_cast<std::size_t>(samples.cols()) != dims()) {
    throw Error(ErrorKind::argument, "sample matrix column count does not match basis");
  }
  Eigen::MatrixXd a(samples.rows(), static_cast<Eigen::Index>(size()));
  std::vector<double> x(dims()), row(size()), scratch;
  for (Eigen::Index l = 0; l < samples.rows(); ++l) {
    for (std::size_t j = 0; j < dims(); ++j) x[j] = samples(l, static_cast<Eigen::Index>(j));
    evaluate_into(x, row, scratch);
    for (std::size_t i = 0; i < size(); ++i) a(l, static_cast<Eigen::Index>(i)) = row[i];
  }
  return a;
}

BasisSet truncated_basis(std::size_t m, int p, double q, std::vector<Distribution> dists) {
  if (p < 0) throw Error(ErrorKind::argument, "truncation degree p must be >= 0");
  if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorKind::argument, "q must lie in (0, 1]");
  if (dists.size() != m) throw Error(ErrorKind::argument, "one distribution per input required");

  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < m; ++j) {
    if (!dists[j].is_degenerate()) active.push_back(j);
  }
  const double bound = std::pow(static_cast<double>(p), q);
  const double slack = 1e-10 * std::max(1.0, bound);
  const auto qpow = [q](int k) { return k == 0 ? 0.0 : std::pow(static_cast<double>(k), q); };

  std::vector<MultiIndex> out;
  MultiIndex current{std::vector<int>(m, 0)};
  // Depth-first over the active dimensions with partial q-norm pruning.
  const auto recurse = [&](auto&& self, std::size_t pos, double partial) -> void {
    if (pos == active.size()) {
      out.push_back(current);
      return;
    }
    const std::size_t j = active[pos];
    for (int k = 0; k <= p; ++k) {
      const double next = partial + qpow(k);
      if (next > bound + slack) break;
      current.degrees[j] = k;
      self(self, pos + 1, next);
    }
    current.degrees[j] = 0;
  };
  recurse(recurse, 0, 0.0);

  std::sort(out.begin(), out.end(), [](const MultiIndex& a, const MultiIndex& b) {
    const int ta = a.total();
    const int tb = b.total();
    if (ta != tb) return ta < tb;
    return a.degrees > b.degrees;
  });
  return BasisSet(std::move(out), std::move(dists));
}

Eigen::VectorXd evaluate_basis_row(const BasisSet& basis, std::span<const double> x) {
  return basis.evaluate_row(x);
}

}  // namespace pcct::spce
