// Copyright 2026 The mdirand Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mdirand/sdp_solver.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdirand {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Constraint rows grouped by block, each block's rows stored as columns
// vec(A_ik) of a dense matrix.
class ConstraintOperator {
 public:
  explicit ConstraintOperator(const SdpProblem& p) : m_(p.num_constraints()), sizes_(p.block_sizes) {
    const auto by_block = rows_by_block(p);
    blocks_.resize(by_block.size());
    for (size_t k = 0; k < by_block.size(); ++k) {
      const Index s = sizes_[k];
      auto& blk = blocks_[k];
      blk.v.resize(s * s, static_cast<Index>(by_block[k].size()));
      for (size_t j = 0; j < by_block[k].size(); ++j) {
        const auto& [row, term] = by_block[k][j];
        blk.rows.push_back(row);
        blk.v.col(static_cast<Index>(j)) =
            p.constraints[static_cast<size_t>(row)].terms[static_cast<size_t>(term)].matrix.reshaped();
      }
    }
  }

  RealVector apply(const BlockMatrix& x) const {
    RealVector out = RealVector::Zero(m_);
    for (size_t k = 0; k < blocks_.size(); ++k) {
      const auto& blk = blocks_[k];
      if (blk.rows.empty()) continue;
      const RealVector local = blk.v.transpose() * x[k].reshaped();
      for (size_t j = 0; j < blk.rows.size(); ++j) out(blk.rows[j]) += local(static_cast<Index>(j));
    }
    return out;
  }

  BlockMatrix adjoint(const RealVector& y) const {
    BlockMatrix out = zero_blocks(sizes_);
    for (size_t k = 0; k < blocks_.size(); ++k) {
      const auto& blk = blocks_[k];
      if (blk.rows.empty()) continue;
      RealVector local(static_cast<Index>(blk.rows.size()));
      for (size_t j = 0; j < blk.rows.size(); ++j) local(static_cast<Index>(j)) = y(blk.rows[j]);
      out[k].reshaped() = blk.v * local;
    }
    return out;
  }

  // M_ij = tr(A_i X A_j Z^{-1}), using vec(X A Zinv) = (Zinv (x) X) vec(A).
  RealMatrix schur(const BlockMatrix& x, const BlockMatrix& zinv) const {
    RealMatrix out = RealMatrix::Zero(m_, m_);
    for (size_t k = 0; k < blocks_.size(); ++k) {
      const auto& blk = blocks_[k];
      if (blk.rows.empty()) continue;
      const RealMatrix w = kron(zinv[k], x[k]) * blk.v;
      const RealMatrix local = blk.v.transpose() * w;
      const size_t c = blk.rows.size();
      for (size_t b = 0; b < c; ++b)
        for (size_t a = 0; a < c; ++a)
          out(blk.rows[a], blk.rows[b]) += local(static_cast<Index>(a), static_cast<Index>(b));
    }
    return 0.5 * (out + out.transpose());
  }

 private:
  struct Block {
    std::vector<Index> rows;
    RealMatrix v;
  };
  Index m_;
  std::vector<Index> sizes_;
  std::vector<Block> blocks_;
};

double min_eig_blocks(const BlockMatrix& z) {
  double lmin = std::numeric_limits<double>::infinity();
  for (const auto& blk : z) lmin = std::min(lmin, min_symmetric_eigenvalue(blk));
  return lmin;
}

bool all_positive_definite(const BlockMatrix& x) {
  for (const auto& blk : x) {
    Eigen::LLT<RealMatrix> llt(blk);
    if (llt.info() != Eigen::Success) return false;
  }
  return true;
}

// Largest alpha with x + alpha dx >= 0 (infinity if unbounded). x must be PD.
double max_step(const BlockMatrix& x, const BlockMatrix& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < x.size(); ++k) {
    Eigen::LLT<RealMatrix> llt(x[k]);
    if (llt.info() != Eigen::Success) return 0.0;
    RealMatrix s = llt.matrixL().solve(dx[k]);
    s = llt.matrixL().solve(s.transpose().eval());
    const double lmin = min_symmetric_eigenvalue(0.5 * (s + s.transpose()));
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

// Fraction-to-boundary step, confirmed by Cholesky probes.
double step_length(const BlockMatrix& x, const BlockMatrix& dx, double fraction) {
  double alpha = std::min(1.0, fraction * max_step(x, dx));
  for (int probe = 0; probe < 30 && alpha > 0.0; ++probe) {
    BlockMatrix trial = x;
    for (size_t k = 0; k < x.size(); ++k) trial[k] += alpha * dx[k];
    if (all_positive_definite(trial)) return alpha;
    alpha *= 0.8;
  }
  return 0.0;
}

struct Direction {
  RealVector dy;
  BlockMatrix dx;
  BlockMatrix dz;
};

struct Iterate {
  BlockMatrix x;
  RealVector y;
  BlockMatrix z;
};

double merit(double gap, double pres, double dmin) {
  return std::max({gap, pres, std::max(0.0, -dmin)});
}

}  // namespace

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kNearOptimal: return "near-optimal";
    case SolveStatus::kInfeasibleDetected: return "infeasible-detected";
    case SolveStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

SolverOptions SolverOptions::from(const Tolerances& tol) {
  SolverOptions o;
  o.gap_tol = tol.gap;
  o.feas_tol = tol.feas;
  o.max_iter = tol.max_iter;
  o.step_fraction = tol.step_fraction;
  o.certify_max_shift = tol.certify_max_shift;
  return o;
}

SdpSolution solve(const SdpProblem& p, const SolverOptions& opts) {
  p.validate();
  if (p.num_constraints() > opts.max_constraints) {
    throw std::invalid_argument("solve: " + std::to_string(p.num_constraints()) +
                                " constraints exceed the cap of " + std::to_string(opts.max_constraints));
  }
  for (Index s : p.block_sizes) {
    if (s > opts.max_block_size) {
      throw std::invalid_argument("solve: block of size " + std::to_string(s) + " exceeds the cap");
    }
  }

  const Index m = p.num_constraints();
  const double n = static_cast<double>(p.total_dim());
  const ConstraintOperator op(p);
  const RealVector b = p.rhs();
  const double b_inf = m > 0 ? b.lpNorm<Eigen::Infinity>() : 0.0;
  const double tau = 1.0 + b_inf;

  Iterate it{identity_blocks(p.block_sizes, tau), RealVector::Zero(m), identity_blocks(p.block_sizes, tau)};
  Iterate best = it;
  double best_merit = std::numeric_limits<double>::infinity();
  // Dual iterates are ranked separately by the bound they would certify.
  double group_weight = 0.0;
  for (const auto& g : p.certificate_groups)
    for (const auto& [row, coeff] : g.rows) group_weight += coeff * b(row);
  RealVector best_y;
  double best_bound = std::numeric_limits<double>::infinity();
  int since_progress = 0;
  SdpSolution sol;
  sol.status = SolveStatus::kNumericalFailure;
  sol.message = "iteration limit reached";
  int stalled = 0;
  double last_sigma = 0.0, last_ap = 0.0, last_ad = 0.0;
  const double near_tol = std::max(1e-6, 100.0 * std::max(opts.gap_tol, opts.feas_tol));

  for (int iter = 0;; ++iter) {
    const RealVector ax = op.apply(it.x);
    const RealVector rp = b - ax;
    const BlockMatrix aty = op.adjoint(it.y);
    BlockMatrix zt(aty.size()), rd(aty.size());
    for (size_t k = 0; k < aty.size(); ++k) {
      zt[k] = aty[k] - p.objective[k];
      rd[k] = it.z[k] - zt[k];
    }
    const double pobj = inner(p.objective, it.x);
    const double dobj = m > 0 ? b.dot(it.y) : 0.0;
    const double mu = inner(it.x, it.z) / n;
    const double pres = (m > 0 ? rp.lpNorm<Eigen::Infinity>() : 0.0) / (1.0 + b_inf);
    const double dmin = min_eig_blocks(zt);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    IterationRecord rec;
    rec.iteration = iter;
    rec.primal_objective = pobj;
    rec.dual_objective = dobj;
    rec.primal_residual = m > 0 ? rp.norm() : 0.0;
    double rd_norm = 0.0, trace_x = 0.0;
    for (size_t k = 0; k < rd.size(); ++k) {
      rd_norm += rd[k].squaredNorm();
      trace_x += it.x[k].trace();
    }
    rec.dual_residual = std::sqrt(rd_norm);
    rec.mu = mu;
    rec.sigma = last_sigma;
    rec.step_primal = last_ap;
    rec.step_dual = last_ad;
    rec.dual_slack_min_eig = dmin;
    rec.trace_x = trace_x;
    rec.y_norm = m > 0 ? it.y.norm() : 0.0;
    sol.log.push_back(rec);

    const double cur = merit(gap, pres, dmin);
    ++since_progress;
    if (cur < best_merit * (1.0 - 1e-3)) since_progress = 0;
    if (cur < best_merit) {
      best_merit = cur;
      best = it;
    }
    const bool certifiable = p.certificate_groups.empty() ? dmin >= 0.0 : dmin > -opts.certify_max_shift;
    if (certifiable) {
      const double bound = dobj + std::max(0.0, -dmin) * std::abs(group_weight);
      if (bound < best_bound) {
        if (bound < best_bound - 1e-12 * (1.0 + std::abs(bound))) since_progress = 0;
        best_bound = bound;
        best_y = it.y;
      }
    }
    if (gap < opts.gap_tol && pres < opts.feas_tol && dmin > -opts.feas_tol) {
      sol.status = SolveStatus::kOptimal;
      sol.message = "converged";
      best = it;
      best_y = it.y;
      break;
    }
    double x_max = 0.0;
    for (const auto& blk : it.x) x_max = std::max(x_max, blk.cwiseAbs().maxCoeff());
    if ((m > 0 && it.y.lpNorm<Eigen::Infinity>() > 1e10) || x_max > 1e10) {
      sol.status = SolveStatus::kInfeasibleDetected;
      sol.message = "iterates diverged (primal or dual infeasible)";
      break;
    }
    if (iter >= opts.max_iter) break;
    if (since_progress >= 15 || mu < 1e-15 * (1.0 + std::abs(pobj))) {
      sol.message = "no further progress";
      break;
    }

    BlockMatrix zinv(it.z.size());
    bool lost = false;
    for (size_t k = 0; k < it.z.size(); ++k) {
      Eigen::LLT<RealMatrix> llt(it.z[k]);
      if (llt.info() != Eigen::Success) {
        sol.message = "dual slack lost definiteness";
        lost = true;
        break;
      }
      zinv[k] = llt.solve(RealMatrix::Identity(it.z[k].rows(), it.z[k].cols()));
      zinv[k] = 0.5 * (zinv[k] + zinv[k].transpose());
    }
    if (lost) break;

    {
      const RealMatrix schur = op.schur(it.x, zinv);
      Eigen::LLT<RealMatrix> factor(schur);
      // Near the boundary the Schur matrix loses definiteness to rounding;
      // a diagonal shift relative to its scale restores it, and the
      // refinement steps below recover the unshifted solution.
      const double scale = m > 0 ? std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff()) : 1.0;
      for (double rel = 1e-15; factor.info() != Eigen::Success && rel <= 1e-6; rel *= 10.0) {
        RealMatrix shifted = schur;
        shifted.diagonal().array() += rel * scale;
        factor.compute(shifted);
      }
      if (factor.info() != Eigen::Success) {
        sol.message = "Schur complement not positive definite";
        break;
      }
      auto schur_solve = [&](const RealVector& rhs) {
        RealVector v = factor.solve(rhs);
        for (int k = 0; k < 2; ++k) v += factor.solve(rhs - schur * v);
        return v;
      };

      // rc: right-hand side of the linearized complementarity, per block.
      auto direction = [&](const BlockMatrix& rc) {
        Direction d;
        BlockMatrix kmat(rc.size());
        for (size_t k = 0; k < rc.size(); ++k) kmat[k] = (rc[k] + it.x[k] * rd[k]) * zinv[k];
        const RealVector rhs = op.apply(kmat) - rp;
        d.dy = m > 0 ? schur_solve(rhs) : RealVector();
        d.dz = op.adjoint(d.dy);
        d.dx.resize(rc.size());
        for (size_t k = 0; k < rc.size(); ++k) {
          d.dz[k] -= rd[k];
          const RealMatrix t = (rc[k] - it.x[k] * d.dz[k]) * zinv[k];
          d.dx[k] = 0.5 * (t + t.transpose());
        }
        return d;
      };

      BlockMatrix rc(it.x.size());
      for (size_t k = 0; k < it.x.size(); ++k) rc[k] = -(it.x[k] * it.z[k]);
      const Direction pred = direction(rc);
      const double ap_aff = std::min(1.0, max_step(it.x, pred.dx));
      const double ad_aff = std::min(1.0, max_step(it.z, pred.dz));
      double mu_aff = 0.0;
      for (size_t k = 0; k < it.x.size(); ++k) {
        mu_aff += (it.x[k] + ap_aff * pred.dx[k]).cwiseProduct(it.z[k] + ad_aff * pred.dz[k]).sum();
      }
      mu_aff /= n;
      const double expon = std::max(1.0, 3.0 * std::pow(std::min(ap_aff, ad_aff), 2));
      const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, expon), 0.0, 1.0);

      for (size_t k = 0; k < it.x.size(); ++k) {
        rc[k] = -(it.x[k] * it.z[k]) - pred.dx[k] * pred.dz[k];
        rc[k].diagonal().array() += sigma * mu;
      }
      const Direction corr = direction(rc);
      const double ap = step_length(it.x, corr.dx, opts.step_fraction);
      const double ad = step_length(it.z, corr.dz, opts.step_fraction);
      for (size_t k = 0; k < it.x.size(); ++k) {
        it.x[k] += ap * corr.dx[k];
        it.z[k] += ad * corr.dz[k];
        it.x[k] = 0.5 * (it.x[k] + it.x[k].transpose());
        it.z[k] = 0.5 * (it.z[k] + it.z[k].transpose());
      }
      if (m > 0) it.y += ad * corr.dy;
      last_sigma = sigma;
      last_ap = ap;
      last_ad = ad;
      stalled = (ap < 1e-8 && ad < 1e-8) ? stalled + 1 : 0;
      if (stalled >= 3) {
        sol.message = "step lengths collapsed";
        break;
      }
    }
  }
  sol.iterations = static_cast<int>(sol.log.size()) - 1;
  sol.x = best.x;
  sol.y = best_y.size() == m ? best_y : best.y;
  sol.z = dual_slack(p, sol.y);
  sol.primal_objective = inner(p.objective, best.x);
  sol.dual_objective = m > 0 ? b.dot(sol.y) : 0.0;
  const RealVector rp = b - op.apply(best.x);
  sol.primal_residual = (m > 0 ? rp.lpNorm<Eigen::Infinity>() : 0.0) / (1.0 + b_inf);
  sol.dual_min_eig = min_eig_blocks(sol.z);
  sol.relative_gap = std::abs(sol.primal_objective - sol.dual_objective) /
                     (1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective));
  if (sol.status == SolveStatus::kNumericalFailure && sol.relative_gap < near_tol &&
      sol.primal_residual < near_tol && sol.dual_min_eig > -near_tol) {
    sol.status = SolveStatus::kNearOptimal;
  }
  if (!p.certificate_groups.empty() || sol.dual_min_eig >= 0.0) {
    const CertifiedBound cert = certify_upper_bound(p, sol, opts.certify_max_shift);
    if (cert.ok) {
      sol.certified_upper_bound = cert.value;
      sol.certificate_shift = cert.shift;
    }
  }
  return sol;
}

CertifiedBound certify_upper_bound(const SdpProblem& p, const SdpSolution& sol, double max_shift) {
  CertifiedBound out;
  if (sol.y.size() != p.num_constraints()) {
    throw std::invalid_argument("certify_upper_bound: multiplier count does not match the problem");
  }
  const BlockMatrix z = dual_slack(p, sol.y);
  // Rounding in forming and diagonalizing z scales with the magnitude of the
  // terms summed into each block.
  std::vector<double> magnitude(static_cast<size_t>(p.num_blocks()), 0.0);
  for (Index k = 0; k < p.num_blocks(); ++k) magnitude[static_cast<size_t>(k)] = p.objective[static_cast<size_t>(k)].norm();
  for (Index i = 0; i < p.num_constraints(); ++i) {
    const double yi = std::abs(sol.y(i));
    for (const auto& t : p.constraints[static_cast<size_t>(i)].terms)
      magnitude[static_cast<size_t>(t.block)] += yi * t.matrix.norm();
  }
  std::vector<char> covered(static_cast<size_t>(p.num_blocks()), 0);
  for (const auto& g : p.certificate_groups)
    for (Index k : g.blocks) covered[static_cast<size_t>(k)] = 1;

  double shift = 0.0;
  for (Index k = 0; k < p.num_blocks(); ++k) {
    const auto& blk = z[static_cast<size_t>(k)];
    const double margin = 16.0 * static_cast<double>(blk.rows()) * kEps * (1.0 + magnitude[static_cast<size_t>(k)]);
    const double need = margin - min_symmetric_eigenvalue(blk);
    if (need <= 0.0) continue;
    if (!covered[static_cast<size_t>(k)]) {
      out.reason = "block " + std::to_string(k) + " is not PSD and has no certificate group";
      return out;
    }
    shift = std::max(shift, need);
  }
  if (shift > max_shift) {
    out.reason = "required identity shift " + std::to_string(shift) + " exceeds " + std::to_string(max_shift);
    out.shift = shift;
    return out;
  }
  double value = p.num_constraints() > 0 ? p.rhs().dot(sol.y) : 0.0;
  if (shift > 0.0) {
    for (const auto& g : p.certificate_groups)
      for (const auto& [row, coeff] : g.rows) value += shift * coeff * p.constraints[static_cast<size_t>(row)].rhs;
  }
  out.ok = true;
  out.value = value;
  out.shift = shift;
  return out;
}

SdpSolution solve_certified(const SdpProblem& input, const Preprocessed& pre, const SolverOptions& opts) {
  if (pre.status == PreprocessStatus::kInfeasible) {
    SdpSolution sol;
    sol.status = SolveStatus::kInfeasibleDetected;
    sol.message = pre.message;
    return sol;
  }
  SdpSolution sol = solve(pre.problem, opts);
  sol.y = pre.lift_dual(sol.y, input.num_constraints());
  sol.z = dual_slack(input, sol.y);
  sol.dual_objective = input.num_constraints() > 0 ? input.rhs().dot(sol.y) : 0.0;
  sol.dual_min_eig = min_eig_blocks(sol.z);
  const CertifiedBound cert = certify_upper_bound(input, sol, opts.certify_max_shift);
  if (cert.ok) {
    sol.certified_upper_bound = cert.value;
    sol.certificate_shift = cert.shift;
  } else {
    sol.certified_upper_bound = std::numeric_limits<double>::quiet_NaN();
    sol.certificate_shift = cert.shift;
    if (usable(sol.status)) {
      sol.status = SolveStatus::kNumericalFailure;
      sol.message = "certification refused: " + cert.reason;
    }
  }
  return sol;
}

SdpSolution solve_certified(const SdpProblem& input, const SolverOptions& opts) {
  return solve_certified(input, preprocess(input), opts);
}

}  // namespace mdirand
