// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pcct/error.hpp"
#include "pcct/spce.hpp"

namespace pcct::spce {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxCondition = 1e12;

// Equal within this band counts as a tie for model selection.
double tie_tolerance(double a, double b) {
  return std::max(1e-14, 1e-9 * std::max(std::abs(a), std::abs(b)));
}

struct Candidate {
  std::size_t size = 0;  // active terms including the constant
  double mloo = kInf;
};

struct SubsetFit {
  Eigen::VectorXd coef;
  double mloo = kInf;
};

// Plain OLS on the given columns with its corrected leave-one-out error.
SubsetFit fit_subset(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, double ss,
                     const std::vector<Eigen::Index>& cols) {
  const Eigen::Index n = design.rows();
  const auto k = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd a(n, k);
  for (Eigen::Index j = 0; j < k; ++j) a.col(j) = design.col(cols[static_cast<std::size_t>(j)]);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  SubsetFit out;
  if (r.diagonal().cwiseAbs().minCoeff() <= 1e-12 * std::max(1.0, r.diagonal().cwiseAbs().maxCoeff())) return out;
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  out.coef = r_inv * (q.transpose() * y);
  const Eigen::VectorXd residual = y - a * out.coef;
  const Eigen::VectorXd leverage = q.rowwise().squaredNorm();
  if (leverage.maxCoeff() >= 1.0 - 1e-10) return out;
  const double loo = (residual.array() / (1.0 - leverage.array())).square().sum() / ss;
  out.mloo = loo * loo_correction_factor(static_cast<std::size_t>(k), static_cast<std::size_t>(n), r_inv.squaredNorm());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// LAR (Efron et al.) without the lasso modification; only the entry order is
// used downstream, the coefficients come from OLS refits.

std::vector<Eigen::Index> lar_path(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                   std::size_t max_steps) {
  const Eigen::Index n = design.rows();
  const Eigen::Index l = design.cols();
  std::vector<Eigen::Index> order;
  if (l <= 1 || n < 2 || max_steps == 0) return order;

  // Centered, unit-norm predictors for columns 1..L-1.
  std::vector<Eigen::Index> cols;
  Eigen::MatrixXd x(n, l - 1);
  Eigen::Index usable = 0;
  for (Eigen::Index j = 1; j < l; ++j) {
    Eigen::VectorXd c = design.col(j).array() - design.col(j).mean();
    const double norm = c.norm();
    if (norm <= 1e-12 * std::max(1.0, design.col(j).norm())) continue;
    x.col(usable++) = c / norm;
    cols.push_back(j);
  }
  x.conservativeResize(n, usable);
  if (usable == 0) return order;

  const Eigen::VectorXd r0 = y.array() - y.mean();
  Eigen::VectorXd corr = x.transpose() * r0;
  const double c0 = corr.cwiseAbs().maxCoeff();
  if (!(c0 > 0.0)) return order;
  const double corr_floor = 1e-11 * c0;

  std::vector<bool> available(static_cast<std::size_t>(usable), true);
  std::vector<Eigen::Index> active;     // positions into x
  std::vector<double> sign;
  Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(std::min<Eigen::Index>(usable, n), std::min<Eigen::Index>(usable, n));

  // Appends predictor j to the active set; false when it is numerically
  // dependent on the active ones.
  const auto add = [&](Eigen::Index j) {
    const auto k = static_cast<Eigen::Index>(active.size());
    if (k >= chol.rows()) return false;
    const double s = corr[j] >= 0.0 ? 1.0 : -1.0;
    Eigen::VectorXd g(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      g[i] = sign[static_cast<std::size_t>(i)] * s * x.col(active[static_cast<std::size_t>(i)]).dot(x.col(j));
    }
    Eigen::VectorXd lrow = g;
    if (k > 0) {
      chol.topLeftCorner(k, k).triangularView<Eigen::Lower>().solveInPlace(lrow);
    }
    const double d2 = 1.0 - lrow.squaredNorm();
    available[static_cast<std::size_t>(j)] = false;
    if (d2 <= 1e-10) return false;
    chol.block(k, 0, 1, k) = lrow.transpose();
    chol(k, k) = std::sqrt(d2);
    active.push_back(j);
    sign.push_back(s);
    order.push_back(cols[static_cast<std::size_t>(j)]);
    return true;
  };

  const auto argmax_available = [&]() {
    Eigen::Index best = -1;
    double best_val = -1.0;
    for (Eigen::Index j = 0; j < usable; ++j) {
      if (!available[static_cast<std::size_t>(j)]) continue;
      const double v = std::abs(corr[j]);
      if (v > best_val) {
        best_val = v;
        best = j;
      }
    }
    return best;
  };

  {
    Eigen::Index first = argmax_available();
    while (first >= 0 && !add(first)) first = argmax_available();
    if (first < 0) return order;
  }

  while (order.size() < max_steps) {
    const auto k = static_cast<Eigen::Index>(active.size());
    double big_c = 0.0;
    for (auto j : active) big_c = std::max(big_c, std::abs(corr[j]));
    if (big_c <= corr_floor) break;

    // Equiangular direction: G w = 1, A = (1^T w)^-1/2.
    Eigen::VectorXd w = Eigen::VectorXd::Ones(k);
    auto lower = chol.topLeftCorner(k, k).triangularView<Eigen::Lower>();
    lower.solveInPlace(w);
    lower.transpose().solveInPlace(w);
    const double a_norm = 1.0 / std::sqrt(w.sum());
    w *= a_norm;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < k; ++i) {
      u += sign[static_cast<std::size_t>(i)] * w[i] * x.col(active[static_cast<std::size_t>(i)]);
    }
    const Eigen::VectorXd a = x.transpose() * u;

    const double gamma_full = big_c / a_norm;
    double gamma = kInf;
    Eigen::Index next = -1;
    for (Eigen::Index j = 0; j < usable; ++j) {
      if (!available[static_cast<std::size_t>(j)]) continue;
      for (const double s : {1.0, -1.0}) {
        const double denom = a_norm - s * a[j];
        if (denom <= 1e-14) continue;
        const double g = (big_c - s * corr[j]) / denom;
        if (g > 1e-14 * gamma_full && g < gamma) {
          gamma = g;
          next = j;
        }
      }
    }
    // Reaching the least-squares point on the active set first means every
    // remaining correlation vanishes together with the residual.
    if (next < 0 || gamma >= gamma_full * (1.0 - 1e-9)) break;
    corr -= gamma * a;
    if (!add(next)) continue;
  }
  return order;
}

double loo_correction_factor(std::size_t active, std::size_t n, double trace_inverse_gram) {
  if (active >= n) return kInf;
  const double dn = static_cast<double>(n);
  return dn / (dn - static_cast<double>(active)) * (1.0 + trace_inverse_gram);
}

bool better_model(const SearchCell& a, const SearchCell& b) noexcept {
  if (a.failed != b.failed) return !a.failed;
  const bool fa = std::isfinite(a.mloo);
  const bool fb = std::isfinite(b.mloo);
  if (fa != fb) return fa;
  if (fa && std::abs(a.mloo - b.mloo) > tie_tolerance(a.mloo, b.mloo)) return a.mloo < b.mloo;
  if (a.active_terms != b.active_terms) return a.active_terms < b.active_terms;
  if (a.p != b.p) return a.p < b.p;
  return a.q < b.q;
}

PceModel hybrid_lar_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                        const BasisSet& basis) {
  const Eigen::Index n = design.rows();
  const Eigen::Index l = design.cols();
  if (n < 2) throw Error(ErrorKind::argument, "hybrid_lar_fit requires N >= 2");
  if (y.size() != n) throw Error(ErrorKind::argument, "response length does not match design");
  if (static_cast<std::size_t>(l) != basis.size()) {
    throw Error(ErrorKind::argument, "design column count does not match basis size");
  }

  PceModel model{basis, Eigen::VectorXd::Zero(l), 0.0, {}};
  model.meta.n_samples = static_cast<std::size_t>(n);

  const double y_mean = y.mean();
  const double ss = (y.array() - y_mean).square().sum();
  const double y_scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  if (ss <= static_cast<double>(n) * std::pow(1e-14 * y_scale, 2)) {
    // Constant response: the intercept is exact.
    model.coeffs[0] = y_mean;
    model.meta.active_terms = 1;
    return model;
  }

  const Eigen::Index max_size = std::min<Eigen::Index>(l, n - 1);
  std::vector<Eigen::Index> order{0};
  for (auto j : lar_path(design, y, static_cast<std::size_t>(max_size - 1))) order.push_back(j);

  const auto p_max = static_cast<Eigen::Index>(order.size());
  Eigen::MatrixXd q(n, p_max);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(p_max, p_max);
  Eigen::MatrixXd r_inv = Eigen::MatrixXd::Zero(p_max, p_max);
  Eigen::VectorXd qty(p_max);
  Eigen::VectorXd residual = y;
  Eigen::VectorXd leverage = Eigen::VectorXd::Zero(n);
  double trace_inv_gram = 0.0;
  double fro_sq = 0.0;

  std::vector<Candidate> candidates;
  Eigen::Index built = 0;
  for (Eigen::Index k = 0; k < p_max; ++k) {
    const auto column = design.col(order[static_cast<std::size_t>(k)]);
    Eigen::VectorXd v = column;
    for (int pass = 0; pass < 2 && k > 0; ++pass) {
      const Eigen::VectorXd proj = q.leftCols(k).transpose() * v;
      v -= q.leftCols(k) * proj;
      r.col(k).head(k) += proj;
    }
    const double rkk = v.norm();
    if (rkk <= 1e-12 * std::max(1.0, column.norm())) {
      std::ostringstream msg;
      msg << "rank-deficient active set at size " << k + 1 << "; larger candidates skipped";
      model.meta.warnings.push_back(msg.str());
      break;
    }
    q.col(k) = v / rkk;
    r(k, k) = rkk;
    if (k > 0) {
      r_inv.col(k).head(k) = -(r_inv.topLeftCorner(k, k) * r.col(k).head(k)) / rkk;
    }
    r_inv(k, k) = 1.0 / rkk;
    trace_inv_gram += r_inv.col(k).head(k + 1).squaredNorm();
    fro_sq += column.squaredNorm();
    if (std::sqrt(fro_sq * trace_inv_gram) > kMaxCondition) {
      std::ostringstream msg;
      msg << "ill-conditioned active set at size " << k + 1 << "; larger candidates skipped";
      model.meta.warnings.push_back(msg.str());
      break;
    }
    qty[k] = q.col(k).dot(residual);
    residual -= qty[k] * q.col(k);
    leverage += q.col(k).cwiseAbs2();
    built = k + 1;

    Candidate cand{static_cast<std::size_t>(k + 1), kInf};
    if (leverage.maxCoeff() < 1.0 - 1e-10) {
      const double loo =
          (residual.array() / (1.0 - leverage.array())).square().sum() / ss;
      cand.mloo = loo * loo_correction_factor(cand.size, static_cast<std::size_t>(n), trace_inv_gram);
    }
    candidates.push_back(cand);
  }

  const Candidate* best = nullptr;
  for (const auto& c : candidates) {
    if (!std::isfinite(c.mloo)) continue;
    if (!best) {
      best = &c;
      continue;
    }
    SearchCell a{0, 1.0, 0, c.size, c.mloo, false};
    SearchCell b{0, 1.0, 0, best->size, best->mloo, false};
    if (better_model(a, b)) best = &c;
  }
  if (!best || built == 0) {
    throw Error(ErrorKind::fit_failure, "hybrid LAR: every candidate active set was rejected");
  }

  const auto size = static_cast<Eigen::Index>(best->size);
  const Eigen::VectorXd coef = r_inv.topLeftCorner(size, size) * qty.head(size);
  for (Eigen::Index k = 0; k < size; ++k) {
    model.coeffs[order[static_cast<std::size_t>(k)]] = coef[k];
  }
  model.mloo = std::max(0.0, best->mloo);
  model.meta.active_terms = best->size;

  // A nested LAR set can keep a term whose least-squares coefficient is zero
  // up to round-off. Refit without such terms and keep the smaller set unless
  // its MLOO is worse.
  const double coef_scale = coef.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> kept{order[0]};
  for (Eigen::Index k = 1; k < size; ++k) {
    if (std::abs(coef[k]) > 1e-10 * coef_scale) kept.push_back(order[static_cast<std::size_t>(k)]);
  }
  if (static_cast<Eigen::Index>(kept.size()) < size) {
    const auto pruned = fit_subset(design, y, ss, kept);
    if (std::isfinite(pruned.mloo) && pruned.mloo <= model.mloo + tie_tolerance(pruned.mloo, model.mloo)) {
      model.coeffs.setZero();
      for (std::size_t k = 0; k < kept.size(); ++k) model.coeffs[kept[k]] = pruned.coef[static_cast<Eigen::Index>(k)];
      model.mloo = std::max(0.0, pruned.mloo);
      model.meta.active_terms = kept.size();
    }
  }
  return model;
}

PceModel adaptive_fit(const Eigen::MatrixXd& samples, const Eigen::VectorXd& y, int p_max,
                      std::span<const double> q_grid, std::vector<Distribution> dists) {
  if (p_max < 1) throw Error(ErrorKind::argument, "adaptive_fit requires p_max >= 1");
  if (q_grid.empty()) throw Error(ErrorKind::argument, "adaptive_fit requires a non-empty q grid");
  for (double q : q_grid) {
    if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorKind::argument, "q values must lie in (0, 1]");
  }
  if (static_cast<std::size_t>(samples.cols()) != dists.size()) {
    throw Error(ErrorKind::argument, "sample columns do not match distribution count");
  }
  if (samples.rows() != y.size()) {
    throw Error(ErrorKind::argument, "sample rows do not match response length");
  }

  const std::size_t m = dists.size();
  std::optional<PceModel> best;
  SearchCell best_cell;
  std::vector<SearchCell> trace;
  std::string last_error;
  int stall = 0;

  for (int p = 1; p <= p_max; ++p) {
    bool improved = false;
    for (double q : q_grid) {
      SearchCell cell{p, q, 0, 0, kInf, false};
      try {
        BasisSet basis = truncated_basis(m, p, q, dists);
        cell.basis_size = basis.size();
        const Eigen::MatrixXd design = basis.design_matrix(samples);
        PceModel model = hybrid_lar_fit(design, y, basis);
        cell.active_terms = model.meta.active_terms;
        cell.mloo = model.mloo;
        trace.push_back(cell);
        if (!best || better_model(cell, best_cell)) {
          if (!best || best_cell.mloo - cell.mloo > tie_tolerance(best_cell.mloo, cell.mloo)) {
            improved = true;
          }
          model.meta.p = p;
          model.meta.q = q;
          best = std::move(model);
          best_cell = cell;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::fit_failure) throw;
        cell.failed = true;
        trace.push_back(cell);
        last_error = e.what();
      }
    }
    if (improved) {
      stall = 0;
    } else if (++stall >= 2) {
      break;
    }
  }
  if (!best) {
    throw Error(ErrorKind::fit_failure, "adaptive_fit: every (p, q) cell failed: " + last_error);
  }
  best->meta.trace = std::move(trace);
  return *std::move(best);
}

}  // namespace pcct::spce
