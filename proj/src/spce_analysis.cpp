// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <vector>

#include "pcct/error.hpp"
#include "pcct/sampling.hpp"
#include "pcct/spce.hpp"

namespace pcct::spce {

double eval_surrogate(const PceModel& model, std::span<const double> x) {
  return model.basis.evaluate_row(x).dot(model.coeffs);
}

Eigen::VectorXd eval_surrogate(const PceModel& model, const Eigen::MatrixXd& samples) {
  // Blocked so the design matrix never holds more than a few thousand rows.
  constexpr Eigen::Index kBlock = 2048;
  Eigen::VectorXd out(samples.rows());
  for (Eigen::Index start = 0; start < samples.rows(); start += kBlock) {
    const Eigen::Index len = std::min(kBlock, samples.rows() - start);
    out.segment(start, len) =
        model.basis.design_matrix(samples.middleRows(start, len)) * model.coeffs;
  }
  return out;
}

Moments moments(const PceModel& model) {
  if (model.coeffs.size() == 0) return {};
  return {model.coeffs[0], model.coeffs.tail(model.coeffs.size() - 1).squaredNorm()};
}

SobolIndices sobol_indices(const PceModel& model) {
  const std::size_t m = model.basis.dims();
  const double variance = moments(model).variance;
  if (!(variance > 0.0)) {
    throw Error(ErrorKind::undefined_indices, "Sobol indices undefined for a zero-variance model");
  }
  SobolIndices out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m)),
                   Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m))};
  const auto& indices = model.basis.indices();
  for (std::size_t i = 1; i < indices.size(); ++i) {
    const double a2 = model.coeffs[static_cast<Eigen::Index>(i)] * model.coeffs[static_cast<Eigen::Index>(i)];
    if (a2 == 0.0) continue;
    std::size_t nonzero = 0;
    std::size_t last = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (indices[i][j] != 0) {
        ++nonzero;
        last = j;
        out.total[static_cast<Eigen::Index>(j)] += a2;
      }
    }
    if (nonzero == 1) out.first[static_cast<Eigen::Index>(last)] += a2;
  }
  out.first /= variance;
  out.total /= variance;
  return out;
}

SobolEstimate sobol_mc_oracle(const ScalarFunction& f, std::span<const Distribution> dists,
                              std::size_t n, std::uint64_t seed) {
  if (n < 1000) throw Error(ErrorKind::argument, "sobol_mc_oracle requires N >= 1000");
  const std::size_t m = dists.size();
  if (m == 0) throw Error(ErrorKind::argument, "sobol_mc_oracle requires at least one input");

  const auto unit = sampling::random_unit(n, 2 * m, seed);
  std::vector<Distribution> doubled(dists.begin(), dists.end());
  doubled.insert(doubled.end(), dists.begin(), dists.end());
  const Eigen::MatrixXd ab = sampling::materialize(unit, doubled);
  const auto mi = static_cast<Eigen::Index>(m);
  const Eigen::MatrixXd a = ab.leftCols(mi);
  const Eigen::MatrixXd b = ab.rightCols(mi);

  const auto eval_rows = [&](const Eigen::MatrixXd& x) {
    Eigen::VectorXd out(x.rows());
    std::vector<double> row(m);
    for (Eigen::Index l = 0; l < x.rows(); ++l) {
      for (std::size_t j = 0; j < m; ++j) row[j] = x(l, static_cast<Eigen::Index>(j));
      out[l] = f(row);
    }
    return out;
  };

  const Eigen::VectorXd fa = eval_rows(a);
  const Eigen::VectorXd fb = eval_rows(b);
  const double dn = static_cast<double>(n);
  const double f0 = 0.5 * (fa.sum() + fb.sum()) / dn;
  const double variance =
      ((fa.array() - f0).square().sum() + (fb.array() - f0).square().sum()) / (2.0 * dn);
  if (!(variance > 0.0)) {
    throw Error(ErrorKind::undefined_indices, "Sobol indices undefined: sample variance is zero");
  }

  SobolEstimate est;
  est.indices.first.resize(mi);
  est.indices.total.resize(mi);
  est.first_se.resize(mi);
  est.total_se.resize(mi);
  const auto mean_and_se = [dn](const Eigen::ArrayXd& terms) {
    const double mean = terms.mean();
    const double var = (terms - mean).square().sum() / (dn - 1.0);
    return std::pair{mean, std::sqrt(var / dn)};
  };
  for (Eigen::Index i = 0; i < mi; ++i) {
    Eigen::MatrixXd abi = a;
    abi.col(i) = b.col(i);
    const Eigen::VectorXd fabi = eval_rows(abi);
    const Eigen::ArrayXd first_terms = (fb.array() - f0) * (fabi.array() - fa.array());
    const Eigen::ArrayXd total_terms = 0.5 * (fa.array() - fabi.array()).square();
    const auto [v1, se1] = mean_and_se(first_terms);
    const auto [vt, set] = mean_and_se(total_terms);
    est.indices.first[i] = std::clamp(v1 / variance, 0.0, 1.0);
    est.indices.total[i] = std::clamp(vt / variance, 0.0, 1.0);
    est.first_se[i] = se1 / variance;
    est.total_se[i] = set / variance;
  }
  return est;
}

}  // namespace pcct::spce
