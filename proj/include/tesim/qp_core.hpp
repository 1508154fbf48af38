// Copyright (c) 2026 the tesim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Embedded convex solver for the household subproblems.
//
// solve_qp handles convex quadratic programs with a diagonal Hessian, sparse
// equality rows, sparse two-sided inequality rows, and variable boxes. The
// method is a Mehrotra-style primal-dual interior point: inequalities are
// converted to bounded slacks, each Newton step is reduced to a dense
// Cholesky solve on the equality-row Schur complement (the Hessian plus
// barrier terms stay diagonal), and infeasibility is certified by an L1
// phase-1 problem when the main iteration fails to converge.
//
// solve_log_quadratic handles the payment subproblem: a quadratic plus a
// single -ln(delta - sum pi) term, reduced to a scalar root-find.

#ifndef TESIM_QP_CORE_HPP
#define TESIM_QP_CORE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tesim/errors.hpp"

namespace tesim::qp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct SparseRow {
  std::vector<std::pair<int, double>> entries;  // (variable index, coefficient)
  std::string label;
};

// Canonical problem form:
//   minimize 0.5 * sum_j quad[j] * x_j^2 + sum_j linear[j] * x_j
//   subject to  eq[r] . x = eq_rhs[r]
//               ineq_lower[r] <= ineq[r] . x <= ineq_upper[r]
//               lower[j] <= x_j <= upper[j]
// quad[j] >= 0 keeps the problem convex. Use +-kInf for absent bounds.
struct Problem {
  int num_vars = 0;
  std::vector<double> quad;
  std::vector<double> linear;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<SparseRow> eq;
  std::vector<double> eq_rhs;
  std::vector<SparseRow> ineq;
  std::vector<double> ineq_lower;
  std::vector<double> ineq_upper;

  int add_var(double q, double c, double lo, double hi) {
    quad.push_back(q);
    linear.push_back(c);
    lower.push_back(lo);
    upper.push_back(hi);
    return num_vars++;
  }

  void add_eq(SparseRow row, double rhs) {
    eq.push_back(std::move(row));
    eq_rhs.push_back(rhs);
  }

  void add_ineq(SparseRow row, double lo, double hi) {
    ineq.push_back(std::move(row));
    ineq_lower.push_back(lo);
    ineq_upper.push_back(hi);
  }
};

enum class SolveStatus { optimal, infeasible, iteration_limit };

struct SolveReport {
  SolveStatus status = SolveStatus::iteration_limit;
  double objective = 0.0;
  std::vector<double> x;
  double max_violation = 0.0;
  int iterations = 0;
  std::string note;  // infeasibility certificate or diagnostic
};

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 50000;
  std::vector<double> warm;  // optional primal warm start, size num_vars
};

namespace detail {

// Standard form after slack conversion and fixed-variable elimination:
//   minimize 0.5 x'Qx + c'x  s.t.  A x = b,  lo <= x <= hi.
struct Standard {
  int n = 0;
  Eigen::VectorXd q, c, lo, hi;
  std::vector<std::vector<std::pair<int, double>>> rows;
  Eigen::VectorXd b;
  std::vector<std::string> labels;
  double obj_const = 0.0;
};

struct BuildOutcome {
  Standard std_form;
  bool infeasible = false;
  std::string reason;
  // Per pre-elimination variable: index into the active vector, or -1 with a
  // pinned value. The first Problem::num_vars entries map the caller's x.
  std::vector<int> active_index;
  std::vector<double> pinned;
};

inline BuildOutcome build_standard(const Problem& p) {
  BuildOutcome out;
  const int num_slack = static_cast<int>(p.ineq.size());
  const int total = p.num_vars + num_slack;

  std::vector<double> q(static_cast<std::size_t>(total), 0.0);
  std::vector<double> c(static_cast<std::size_t>(total), 0.0);
  std::vector<double> lo(static_cast<std::size_t>(total), -kInf);
  std::vector<double> hi(static_cast<std::size_t>(total), kInf);
  for (int j = 0; j < p.num_vars; ++j) {
    const auto u = static_cast<std::size_t>(j);
    q[u] = p.quad[u];
    c[u] = p.linear[u];
    lo[u] = p.lower[u];
    hi[u] = p.upper[u];
  }
  for (int r = 0; r < num_slack; ++r) {
    const auto u = static_cast<std::size_t>(p.num_vars + r);
    lo[u] = p.ineq_lower[static_cast<std::size_t>(r)];
    hi[u] = p.ineq_upper[static_cast<std::size_t>(r)];
  }

  struct RawRow {
    std::vector<std::pair<int, double>> entries;
    double rhs;
    std::string label;
  };
  std::vector<RawRow> rows;
  rows.reserve(p.eq.size() + p.ineq.size());
  for (std::size_t r = 0; r < p.eq.size(); ++r) {
    std::string label = p.eq[r].label.empty() ? "eq[" + std::to_string(r) + "]" : p.eq[r].label;
    rows.push_back({p.eq[r].entries, p.eq_rhs[r], std::move(label)});
  }
  for (std::size_t r = 0; r < p.ineq.size(); ++r) {
    if (p.ineq_lower[r] == -kInf && p.ineq_upper[r] == kInf) continue;  // vacuous
    std::string label =
        p.ineq[r].label.empty() ? "ineq[" + std::to_string(r) + "]" : p.ineq[r].label;
    RawRow row{p.ineq[r].entries, 0.0, std::move(label)};
    row.entries.emplace_back(p.num_vars + static_cast<int>(r), -1.0);
    rows.push_back(std::move(row));
  }

  out.active_index.assign(static_cast<std::size_t>(total), -1);
  out.pinned.assign(static_cast<std::size_t>(total), 0.0);

  // Crossed bounds are an immediate certificate; near-equal bounds pin the
  // variable so the interior-point iteration never divides by a zero gap.
  std::vector<char> fixed(static_cast<std::size_t>(total), 0);
  for (int j = 0; j < total; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const double gap = hi[u] - lo[u];
    const double scale = 1.0 + std::abs(lo[u]) + (std::isfinite(hi[u]) ? std::abs(hi[u]) : 0.0);
    if (gap < -1e-9 * scale) {
      out.infeasible = true;
      if (j < p.num_vars) {
        out.reason = "variable " + std::to_string(j) + " has lower bound above upper bound";
      } else {
        const auto r = static_cast<std::size_t>(j - p.num_vars);
        const std::string& lbl = p.ineq[r].label;
        out.reason = "inequality " + (lbl.empty() ? "ineq[" + std::to_string(r) + "]" : lbl) +
                     " has crossed bounds";
      }
      return out;
    }
    if (std::isfinite(gap) && gap <= 1e-11 * scale) {
      fixed[u] = 1;
      out.pinned[u] = 0.5 * (lo[u] + hi[u]);
    }
  }

  Standard& s = out.std_form;
  int next = 0;
  for (int j = 0; j < total; ++j) {
    const auto u = static_cast<std::size_t>(j);
    if (fixed[u]) {
      s.obj_const += 0.5 * q[u] * out.pinned[u] * out.pinned[u] + c[u] * out.pinned[u];
    } else {
      out.active_index[u] = next++;
    }
  }
  s.n = next;
  s.q.resize(s.n);
  s.c.resize(s.n);
  s.lo.resize(s.n);
  s.hi.resize(s.n);
  for (int j = 0; j < total; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const int a = out.active_index[u];
    if (a < 0) continue;
    s.q[a] = q[u];
    s.c[a] = c[u];
    s.lo[a] = lo[u];
    s.hi[a] = hi[u];
  }

  std::vector<std::vector<std::pair<int, double>>> kept_rows;
  std::vector<double> kept_rhs;
  for (auto& row : rows) {
    double rhs = row.rhs;
    std::vector<std::pair<int, double>> entries;
    entries.reserve(row.entries.size());
    for (auto [j, coef] : row.entries) {
      if (j < 0 || j >= total) throw ContractViolation("solve_qp: row references unknown variable");
      const auto u = static_cast<std::size_t>(j);
      if (fixed[u]) {
        rhs -= coef * out.pinned[u];
      } else {
        entries.emplace_back(out.active_index[u], coef);
      }
    }
    if (entries.empty()) {
      if (std::abs(rhs) > 1e-8 * (1.0 + std::abs(row.rhs))) {
        out.infeasible = true;
        out.reason = "constraint " + row.label + " contradicts fixed variables";
        return out;
      }
      continue;
    }
    kept_rows.push_back(std::move(entries));
    kept_rhs.push_back(rhs);
    s.labels.push_back(std::move(row.label));
  }
  s.rows = std::move(kept_rows);
  s.b = Eigen::Map<Eigen::VectorXd>(kept_rhs.data(), static_cast<Eigen::Index>(kept_rhs.size()));
  return out;
}

// Factored Schur-complement solver for the Newton systems
//   D dx + A' dy = rx,   A dx = rp
// with diagonal D > 0. Builds S = A diag(1/D) A' + delta_d I once per
// barrier iteration and serves both predictor and corrector solves.
class KktSolver {
 public:
  KktSolver(const Standard& s) : s_(s), m_(static_cast<int>(s.rows.size())) {
    cols_.resize(static_cast<std::size_t>(s.n));
    for (int r = 0; r < m_; ++r) {
      for (auto [j, coef] : s_.rows[static_cast<std::size_t>(r)]) {
        cols_[static_cast<std::size_t>(j)].emplace_back(r, coef);
      }
    }
  }

  bool factor(const Eigen::VectorXd& diag) {
    dinv_ = diag.cwiseInverse();
    if (m_ == 0) return true;
    Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(m_, m_);
    for (int j = 0; j < s_.n; ++j) {
      const auto& col = cols_[static_cast<std::size_t>(j)];
      const double w = dinv_[j];
      for (std::size_t a = 0; a < col.size(); ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
          schur(col[a].first, col[b].first) += w * col[a].second * col[b].second;
        }
      }
    }
    Eigen::MatrixXd full = schur.selfadjointView<Eigen::Lower>();
    double shift = 1e-10;
    for (int attempt = 0; attempt < 4; ++attempt) {
      Eigen::MatrixXd reg = full;
      reg.diagonal().array() += shift;
      llt_.compute(reg);
      if (llt_.info() == Eigen::Success) return true;
      shift *= 1e3;
    }
    return false;
  }

  void solve(const Eigen::VectorXd& rx, const Eigen::VectorXd& rp, Eigen::VectorXd& dx,
             Eigen::VectorXd& dy) const {
    if (m_ == 0) {
      dx = dinv_.cwiseProduct(rx);
      dy.resize(0);
      return;
    }
    Eigen::VectorXd rhs = rp;
    for (int r = 0; r < m_; ++r) {
      double acc = 0.0;
      for (auto [j, coef] : s_.rows[static_cast<std::size_t>(r)]) {
        acc += coef * dinv_[j] * rx[j];
      }
      rhs[r] = acc - rp[r];
    }
    dy = llt_.solve(rhs);
    dx = rx;
    for (int r = 0; r < m_; ++r) {
      for (auto [j, coef] : s_.rows[static_cast<std::size_t>(r)]) {
        dx[j] -= coef * dy[r];
      }
    }
    dx = dinv_.cwiseProduct(dx);
  }

 private:
  const Standard& s_;
  int m_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  Eigen::VectorXd dinv_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

inline void residual_rows(const Standard& s, const Eigen::VectorXd& x, Eigen::VectorXd& rp) {
  const int m = static_cast<int>(s.rows.size());
  rp.resize(m);
  for (int r = 0; r < m; ++r) {
    double acc = 0.0;
    for (auto [j, coef] : s.rows[static_cast<std::size_t>(r)]) acc += coef * x[j];
    rp[r] = acc - s.b[r];
  }
}

inline void add_at_y(const Standard& s, const Eigen::VectorXd& y, Eigen::VectorXd& acc) {
  for (int r = 0; r < static_cast<int>(s.rows.size()); ++r) {
    for (auto [j, coef] : s.rows[static_cast<std::size_t>(r)]) acc[j] += coef * y[r];
  }
}

struct IpmResult {
  bool converged = false;
  Eigen::VectorXd x;
  int iterations = 0;
};

// Primal-dual interior point with Mehrotra predictor-corrector steps.
inline IpmResult run_ipm(const Standard& s, double tol, int iter_cap,
                         const Eigen::VectorXd* warm) {
  IpmResult result;
  const int n = s.n;
  const int m = static_cast<int>(s.rows.size());

  std::vector<char> has_lo(static_cast<std::size_t>(n)), has_hi(static_cast<std::size_t>(n));
  int nb = 0;
  for (int j = 0; j < n; ++j) {
    has_lo[static_cast<std::size_t>(j)] = std::isfinite(s.lo[j]);
    has_hi[static_cast<std::size_t>(j)] = std::isfinite(s.hi[j]);
    nb += has_lo[static_cast<std::size_t>(j)] + has_hi[static_cast<std::size_t>(j)];
  }

  KktSolver kkt(s);
  Eigen::VectorXd x(n), y = Eigen::VectorXd::Zero(m);

  if (nb == 0) {
    // Pure equality QP: one regularized Newton solve from the origin is
    // exact, since D x + A'y = -c, A x = b is the full KKT system.
    Eigen::VectorXd diag = s.q.array() + 1e-12;
    if (!kkt.factor(diag)) return result;
    Eigen::VectorXd dx, dy;
    kkt.solve(-s.c, s.b, dx, dy);
    x = dx;
    y = dy;
    Eigen::VectorXd rp;
    residual_rows(s, x, rp);
    Eigen::VectorXd rd = s.q.cwiseProduct(x) + s.c;
    add_at_y(s, y, rd);
    const double pinf = m > 0 ? rp.cwiseAbs().maxCoeff() : 0.0;
    const double dinf = n > 0 ? rd.cwiseAbs().maxCoeff() : 0.0;
    const double bscale = 1.0 + (m > 0 ? s.b.cwiseAbs().maxCoeff() : 0.0);
    const double cscale = 1.0 + (n > 0 ? s.c.cwiseAbs().maxCoeff() : 0.0);
    result.converged = pinf <= 1e-6 * bscale && dinf <= 1e-6 * cscale;
    result.x = x;
    result.iterations = 1;
    return result;
  }

  // Interior starting point.
  for (int j = 0; j < n; ++j) {
    const auto u = static_cast<std::size_t>(j);
    double v;
    if (has_lo[u] && has_hi[u]) {
      v = 0.5 * (s.lo[j] + s.hi[j]);
    } else if (has_lo[u]) {
      v = s.lo[j] + 1.0;
    } else if (has_hi[u]) {
      v = s.hi[j] - 1.0;
    } else {
      v = 0.0;
    }
    if (warm != nullptr) {
      double w = (*warm)[j];
      if (std::isfinite(w)) {
        double margin_lo = has_lo[u] ? (has_hi[u] ? 0.05 * (s.hi[j] - s.lo[j]) : 1e-3) : 0.0;
        double margin_hi = has_hi[u] ? (has_lo[u] ? 0.05 * (s.hi[j] - s.lo[j]) : 1e-3) : 0.0;
        if (has_lo[u]) w = std::max(w, s.lo[j] + std::min(margin_lo, 1.0));
        if (has_hi[u]) w = std::min(w, s.hi[j] - std::min(margin_hi, 1.0));
        if ((!has_lo[u] || w > s.lo[j]) && (!has_hi[u] || w < s.hi[j])) v = w;
      }
    }
    x[j] = v;
  }
  Eigen::VectorXd zl = Eigen::VectorXd::Zero(n), zu = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (has_lo[static_cast<std::size_t>(j)]) zl[j] = 1.0;
    if (has_hi[static_cast<std::size_t>(j)]) zu[j] = 1.0;
  }

  Eigen::VectorXd rp, rd(n), wl(n), wu(n);
  Eigen::VectorXd rx(n), dxa(n), dya, dzl(n), dzu(n), dx(n), dy, rcl(n), rcu(n);
  const double bscale = 1.0 + (m > 0 ? s.b.cwiseAbs().maxCoeff() : 0.0);
  const double cscale = 1.0 + (n > 0 ? s.c.cwiseAbs().maxCoeff() : 0.0);

  for (int iter = 1; iter <= iter_cap; ++iter) {
    result.iterations = iter;
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<std::size_t>(j);
      wl[j] = has_lo[u] ? std::max(x[j] - s.lo[j], 1e-300) : 1.0;
      wu[j] = has_hi[u] ? std::max(s.hi[j] - x[j], 1e-300) : 1.0;
    }
    residual_rows(s, x, rp);
    rd = s.q.cwiseProduct(x) + s.c - zl + zu;
    add_at_y(s, y, rd);

    double comp = 0.0;
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (has_lo[u]) comp += zl[j] * wl[j];
      if (has_hi[u]) comp += zu[j] * wu[j];
    }
    const double mu = comp / nb;
    const double obj =
        0.5 * x.cwiseProduct(s.q.cwiseProduct(x)).sum() + s.c.dot(x) + s.obj_const;
    const double pinf = m > 0 ? rp.cwiseAbs().maxCoeff() : 0.0;
    const double dinf = rd.cwiseAbs().maxCoeff();
    if (pinf <= tol * bscale && dinf <= tol * cscale &&
        comp / nb <= tol * (1.0 + std::abs(obj))) {
      result.converged = true;
      result.x = x;
      return result;
    }
    if (mu < 1e-18 && pinf <= 1e2 * tol * bscale) {
      result.converged = dinf <= 1e2 * tol * cscale;
      result.x = x;
      return result;
    }

    Eigen::VectorXd diag = s.q;
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (has_lo[u]) diag[j] += zl[j] / wl[j];
      if (has_hi[u]) diag[j] += zu[j] / wu[j];
      diag[j] += 1e-11;
    }
    if (!kkt.factor(diag)) return result;

    // Predictor (affine scaling) direction.
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<std::size_t>(j);
      rcl[j] = has_lo[u] ? zl[j] * wl[j] : 0.0;
      rcu[j] = has_hi[u] ? zu[j] * wu[j] : 0.0;
      rx[j] = -rd[j] - (has_lo[u] ? rcl[j] / wl[j] : 0.0) + (has_hi[u] ? rcu[j] / wu[j] : 0.0);
    }
    kkt.solve(rx, -rp, dxa, dya);
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<std::size_t>(j);
      dzl[j] = has_lo[u] ? (-rcl[j] - zl[j] * dxa[j]) / wl[j] : 0.0;
      dzu[j] = has_hi[u] ? (-rcu[j] + zu[j] * dxa[j]) / wu[j] : 0.0;
    }
    auto primal_step = [&](const Eigen::VectorXd& d) {
      double a = 1.0;
      for (int j = 0; j < n; ++j) {
        const auto u = static_cast<std::size_t>(j);
        if (has_lo[u] && d[j] < 0.0) a = std::min(a, wl[j] / -d[j]);
        if (has_hi[u] && d[j] > 0.0) a = std::min(a, wu[j] / d[j]);
      }
      return a;
    };
    const double ap_aff = primal_step(dxa);
    double ad_aff = 1.0;
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (has_lo[u] && dzl[j] < 0.0) ad_aff = std::min(ad_aff, zl[j] / -dzl[j]);
      if (has_hi[u] && dzu[j] < 0.0) ad_aff = std::min(ad_aff, zu[j] / -dzu[j]);
    }
    double comp_aff = 0.0;
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (has_lo[u]) comp_aff += (zl[j] + ad_aff * dzl[j]) * (wl[j] + ap_aff * dxa[j]);
      if (has_hi[u]) comp_aff += (zu[j] + ad_aff * dzu[j]) * (wu[j] - ap_aff * dxa[j]);
    }
    const double mu_aff = std::max(comp_aff / nb, 0.0);
    double sigma = mu > 0 ? std::pow(mu_aff / mu, 3.0) : 0.0;
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector: recenter toward sigma*mu and absorb the affine cross terms.
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<std::size_t>(j);
      rcl[j] = has_lo[u] ? zl[j] * wl[j] - sigma * mu + dxa[j] * dzl[j] : 0.0;
      rcu[j] = has_hi[u] ? zu[j] * wu[j] - sigma * mu - dxa[j] * dzu[j] : 0.0;
      rx[j] = -rd[j] - (has_lo[u] ? rcl[j] / wl[j] : 0.0) + (has_hi[u] ? rcu[j] / wu[j] : 0.0);
    }
    kkt.solve(rx, -rp, dx, dy);
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<std::size_t>(j);
      dzl[j] = has_lo[u] ? (-rcl[j] - zl[j] * dx[j]) / wl[j] : 0.0;
      dzu[j] = has_hi[u] ? (-rcu[j] + zu[j] * dx[j]) / wu[j] : 0.0;
    }
    const double tau = mu < 1e-6 ? 0.9995 : 0.995;
    double ap = tau * primal_step(dx);
    double ad = 1.0;
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (has_lo[u] && dzl[j] < 0.0) ad = std::min(ad, zl[j] / -dzl[j]);
      if (has_hi[u] && dzu[j] < 0.0) ad = std::min(ad, zu[j] / -dzu[j]);
    }
    ad *= tau;
    ap = std::min(ap, 1.0);
    ad = std::min(ad, 1.0);

    x += ap * dx;
    if (m > 0) y += ad * dy;
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (has_lo[u]) zl[j] = std::max(zl[j] + ad * dzl[j], 1e-300);
      if (has_hi[u]) zu[j] = std::max(zu[j] + ad * dzu[j], 1e-300);
    }
  }
  result.x = x;
  return result;
}

// L1 elastic feasibility probe: minimize the total equality-row violation
// subject to the original bounds. A strictly positive optimum certifies
// infeasibility and names the worst row.
inline std::pair<double, std::string> phase1_violation(const Standard& s,
                                                       const Eigen::VectorXd* hint) {
  Standard s1;
  const int m = static_cast<int>(s.rows.size());
  s1.n = s.n + 2 * m;
  s1.q = Eigen::VectorXd::Zero(s1.n);
  s1.c = Eigen::VectorXd::Zero(s1.n);
  s1.lo = Eigen::VectorXd::Constant(s1.n, -kInf);
  s1.hi = Eigen::VectorXd::Constant(s1.n, kInf);
  for (int j = 0; j < s.n; ++j) {
    s1.q[j] = 1e-8;  // keeps the reduced system well conditioned
    s1.lo[j] = s.lo[j];
    s1.hi[j] = s.hi[j];
  }
  for (int r = 0; r < m; ++r) {
    s1.c[s.n + 2 * r] = 1.0;
    s1.c[s.n + 2 * r + 1] = 1.0;
    s1.lo[s.n + 2 * r] = 0.0;
    s1.lo[s.n + 2 * r + 1] = 0.0;
  }
  s1.rows = s.rows;
  s1.b = s.b;
  s1.labels = s.labels;
  for (int r = 0; r < m; ++r) {
    s1.rows[static_cast<std::size_t>(r)].emplace_back(s.n + 2 * r, 1.0);
    s1.rows[static_cast<std::size_t>(r)].emplace_back(s.n + 2 * r + 1, -1.0);
  }
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(s1.n);
  if (hint != nullptr && hint->size() == s.n) warm.head(s.n) = *hint;
  Eigen::VectorXd res;
  residual_rows(s, warm.head(s.n), res);
  for (int r = 0; r < m; ++r) {
    warm[s.n + 2 * r] = std::max(-res[r], 0.0) + 0.1;
    warm[s.n + 2 * r + 1] = std::max(res[r], 0.0) + 0.1;
  }
  IpmResult probe = run_ipm(s1, 1e-9, 200, &warm);
  double total = 0.0;
  double worst = -1.0;
  std::string worst_label;
  for (int r = 0; r < m; ++r) {
    const double v = probe.x.size() == s1.n
                         ? probe.x[s.n + 2 * r] + probe.x[s.n + 2 * r + 1]
                         : kInf;
    total += v;
    if (v > worst) {
      worst = v;
      worst_label = s.labels[static_cast<std::size_t>(r)];
    }
  }
  return {total, worst_label};
}

}  // namespace detail

inline SolveReport solve_qp(const Problem& p, const SolveOptions& opt = {}) {
  if (p.quad.size() != static_cast<std::size_t>(p.num_vars) ||
      p.linear.size() != static_cast<std::size_t>(p.num_vars) ||
      p.lower.size() != static_cast<std::size_t>(p.num_vars) ||
      p.upper.size() != static_cast<std::size_t>(p.num_vars) ||
      p.eq.size() != p.eq_rhs.size() || p.ineq.size() != p.ineq_lower.size() ||
      p.ineq.size() != p.ineq_upper.size()) {
    throw ContractViolation("solve_qp: inconsistent problem arrays");
  }
  for (double q : p.quad) {
    if (q < 0.0) throw ContractViolation("solve_qp: negative quadratic weight");
  }

  SolveReport report;
  detail::BuildOutcome built = detail::build_standard(p);
  if (built.infeasible) {
    report.status = SolveStatus::infeasible;
    report.note = built.reason;
    return report;
  }
  const detail::Standard& s = built.std_form;

  auto finish = [&](const Eigen::VectorXd& xs) {
    report.x.assign(static_cast<std::size_t>(p.num_vars), 0.0);
    double obj = 0.0;
    for (int j = 0; j < p.num_vars; ++j) {
      const auto u = static_cast<std::size_t>(j);
      const int a = built.active_index[u];
      const double v = a >= 0 ? xs[a] : built.pinned[u];
      report.x[u] = v;
      obj += 0.5 * p.quad[u] * v * v + p.linear[u] * v;
    }
    report.objective = obj;
    double viol = 0.0;
    for (std::size_t r = 0; r < p.eq.size(); ++r) {
      double acc = -p.eq_rhs[r];
      for (auto [j, coef] : p.eq[r].entries) acc += coef * report.x[static_cast<std::size_t>(j)];
      viol = std::max(viol, std::abs(acc));
    }
    for (std::size_t r = 0; r < p.ineq.size(); ++r) {
      double acc = 0.0;
      for (auto [j, coef] : p.ineq[r].entries) acc += coef * report.x[static_cast<std::size_t>(j)];
      if (acc < p.ineq_lower[r]) viol = std::max(viol, p.ineq_lower[r] - acc);
      if (acc > p.ineq_upper[r]) viol = std::max(viol, acc - p.ineq_upper[r]);
    }
    for (int j = 0; j < p.num_vars; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (report.x[u] < p.lower[u]) viol = std::max(viol, p.lower[u] - report.x[u]);
      if (report.x[u] > p.upper[u]) viol = std::max(viol, report.x[u] - p.upper[u]);
    }
    report.max_violation = viol;
  };

  if (s.n == 0) {
    report.status = SolveStatus::optimal;
    finish(Eigen::VectorXd());
    return report;
  }

  Eigen::VectorXd warm;
  const Eigen::VectorXd* warm_ptr = nullptr;
  if (!opt.warm.empty()) {
    if (opt.warm.size() != static_cast<std::size_t>(p.num_vars)) {
      throw ContractViolation("solve_qp: warm start size mismatch");
    }
    warm = Eigen::VectorXd::Zero(s.n);
    bool any = false;
    for (int j = 0; j < p.num_vars; ++j) {
      const int a = built.active_index[static_cast<std::size_t>(j)];
      if (a >= 0) {
        warm[a] = opt.warm[static_cast<std::size_t>(j)];
        any = true;
      }
    }
    // Seed slack variables with their row values at the warm primal point.
    for (std::size_t r = 0; r < p.ineq.size(); ++r) {
      const int a = built.active_index[static_cast<std::size_t>(p.num_vars) + r];
      if (a < 0) continue;
      double acc = 0.0;
      for (auto [j, coef] : p.ineq[r].entries) acc += coef * opt.warm[static_cast<std::size_t>(j)];
      warm[a] = acc;
    }
    if (any) warm_ptr = &warm;
  }

  const int cap = std::max(10, std::min(opt.max_iter, 300));
  detail::IpmResult main = detail::run_ipm(s, opt.tol, cap, warm_ptr);
  report.iterations = main.iterations;
  if (main.converged) {
    report.status = SolveStatus::optimal;
    finish(main.x);
    return report;
  }

  auto [violation, worst_row] =
      detail::phase1_violation(s, main.x.size() == s.n ? &main.x : nullptr);
  const double bscale = 1.0 + (s.b.size() > 0 ? s.b.cwiseAbs().maxCoeff() : 0.0);
  if (violation > 1e-6 * bscale) {
    report.status = SolveStatus::infeasible;
    report.note = "no feasible point; minimum total constraint violation " +
                  std::to_string(violation) + ", dominated by " + worst_row;
    if (main.x.size() == s.n) finish(main.x);
    return report;
  }
  report.status = SolveStatus::iteration_limit;
  report.note = "interior point did not reach tolerance; problem appears feasible";
  if (main.x.size() == s.n) finish(main.x);
  return report;
}

// Payment subproblem: minimize over pi
//   -ln(delta - sum_j pi_j) + sum_j [ rho2/2 * (aux_j - pi_j)^2 - dual_j * pi_j ]
// Stationarity gives pi_j = aux_j + (dual_j - nu)/rho2 with the shared
// multiplier nu = 1/(delta - sum pi) > 0, so the whole problem reduces to the
// scalar strictly increasing root-find
//   g(sum) = sum - S0 + (M/rho2) / (delta - sum) = 0,   sum < delta,
// where S0 = sum_j (aux_j + dual_j/rho2). Solved by safeguarded Newton.
inline std::vector<double> solve_log_quadratic(double delta, const std::vector<double>& pay_aux,
                                               const std::vector<double>& pay_dual, double rho2) {
  if (!(rho2 > 0.0) || !std::isfinite(rho2)) {
    throw ContractViolation("solve_log_quadratic: rho2 must be positive");
  }
  if (!std::isfinite(delta)) throw ContractViolation("solve_log_quadratic: delta must be finite");
  if (pay_aux.size() != pay_dual.size()) {
    throw ContractViolation("solve_log_quadratic: aux/dual size mismatch");
  }
  const std::size_t m = pay_aux.size();
  if (m == 0) return {};

  double s0 = 0.0;
  for (std::size_t j = 0; j < m; ++j) s0 += pay_aux[j] + pay_dual[j] / rho2;
  const double k = static_cast<double>(m) / rho2;

  auto g = [&](double sv) { return sv - s0 + k / (delta - sv); };

  // Bracket the root: g -> +inf as s -> delta-, g -> -inf as s -> -inf.
  double hi = delta - 1e-12 * (1.0 + std::abs(delta));
  double lo = std::min(s0, delta - 1.0);
  double width = 1.0;
  while (g(lo) > 0.0) {
    width *= 2.0;
    lo = delta - width;
    if (!std::isfinite(lo)) throw ContractViolation("solve_log_quadratic: bracketing failed");
  }
  if (g(hi) < 0.0) hi = delta;  // degenerate; Newton below still converges leftward

  double sv = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double gap = delta - sv;
    const double val = sv - s0 + k / gap;
    const double slope = 1.0 + k / (gap * gap);
    if (val > 0.0) {
      hi = sv;
    } else {
      lo = sv;
    }
    double next = sv - val / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double move = std::abs(next - sv);
    sv = next;
    if (move <= 1e-15 * (1.0 + std::abs(sv)) && std::abs(val) <= 1e-12 * (1.0 + std::abs(sv))) {
      break;
    }
  }

  const double nu = 1.0 / (delta - sv);
  std::vector<double> out(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) out[j] = pay_aux[j] + (pay_dual[j] - nu) / rho2;
  return out;
}

}  // namespace tesim::qp

#endif  // TESIM_QP_CORE_HPP
