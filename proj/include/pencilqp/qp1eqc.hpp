#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pencilqp/errors.hpp"
#include "pencilqp/krein.hpp"
#include "pencilqp/pencil.hpp"
#include "pencilqp/spectral.hpp"
#include "pencilqp/tolerances.hpp"

namespace pencilqp {

/// minimize <A(x-w0), x-w0>  subject to  <B(x-z0), x-z0> = 0, with B
/// indefinite.
struct QP1EQCProblem {
  SymMatrix A;
  SymMatrix B;
  Eigen::VectorXd w0;
  Eigen::VectorXd z0;

  QP1EQCProblem(SymMatrix a, SymMatrix b, Eigen::VectorXd w, Eigen::VectorXd z)
      : A(std::move(a)), B(std::move(b)), w0(std::move(w)), z0(std::move(z)) {
    if (A.dim() != B.dim() || w0.size() != A.dim() || z0.size() != A.dim()) {
      throw DimensionMismatch("QP1EQCProblem: inconsistent dimensions");
    }
  }

  Pencil pencil() const { return Pencil(A, B); }

  double objective(const Eigen::VectorXd& x) const {
    return A.quad(x - w0);
  }

  double constraint(const Eigen::VectorXd& x) const {
    return B.quad(x - z0);
  }
};

enum class Certificate { GlobalMin, StationaryOnly, Infeasible, NoPSDMultiplier };

inline const char* to_string(Certificate c) {
  switch (c) {
    case Certificate::GlobalMin: return "global_min";
    case Certificate::StationaryOnly: return "stationary_only";
    case Certificate::Infeasible: return "infeasible";
    case Certificate::NoPSDMultiplier: return "no_psd_multiplier";
  }
  return "?";
}

struct QPSolution {
  Eigen::VectorXd x;
  double lambda = 0.0;
  double objective = 0.0;
  double residual_stationarity = 0.0;
  double residual_feasibility = 0.0;
  Certificate certificate = Certificate::StationaryOnly;
  bool endpoint_case = false;
};

enum class SolveStatus { Candidates, NoPSDMultiplier, NoCandidates };

struct QPSolveResult {
  SolveStatus status = SolveStatus::NoCandidates;
  std::vector<QPSolution> solutions;
  PositivityInterval interval;
  std::string diagnostic;

  bool has_global_min() const {
    for (const auto& s : solutions) {
      if (s.certificate == Certificate::GlobalMin) return true;
    }
    return false;
  }
};

namespace detail {

inline QPSolution make_solution(const QP1EQCProblem& prob,
                                const PositivityInterval& interval,
                                const Eigen::VectorXd& x, double lambda,
                                bool endpoint_case,
                                const ToleranceConfig& cfg) {
  const double scale = prob.pencil().scale();
  QPSolution s;
  s.x = x;
  s.lambda = lambda;
  s.endpoint_case = endpoint_case;
  s.objective = prob.objective(x);
  const SymMatrix lagrangian = prob.pencil().at(lambda);
  const Eigen::VectorXd rhs =
      prob.A.mat() * prob.w0 + lambda * (prob.B.mat() * prob.z0);
  s.residual_stationarity = (lagrangian.mat() * x - rhs).norm();
  s.residual_feasibility = std::abs(prob.constraint(x));
  const double tol = cfg.root_tol * scale;
  const bool multiplier_ok = interval.contains(lambda, tol);
  // The global bound obj(y) >= obj(x) + <(A + lambda B)(y-x), y-x> only
  // survives rounding when the Lagrangian's negative part is negligible
  // against the candidate's excursion: a slightly indefinite multiplier
  // must not certify a far-away point.
  const double psd_slack = std::max(0.0, -min_eigenvalue(lagrangian));
  const double reach =
      1.0 + x.norm() + prob.w0.norm() + prob.z0.norm();
  const bool definite_enough = psd_slack * reach * reach <= tol;
  s.certificate = (s.residual_stationarity <= tol &&
                   s.residual_feasibility <= tol && multiplier_ok &&
                   definite_enough)
                      ? Certificate::GlobalMin
                      : Certificate::StationaryOnly;
  return s;
}

}  // namespace detail

/// Lagrange-based global solver.  Over the positivity interval of the
/// pencil, any stationary pair (x, lambda) with A + lambda*B PSD is a
/// global minimizer: for feasible y the PSD Lagrangian gives
/// objective(y) >= objective(x).  The solver locates stationary pairs by
/// root-finding the constraint value of x_lambda on the interior grid and
/// by nullspace corrections at the endpoints (the hard case).
inline QPSolveResult solve_qp1eqc(const QP1EQCProblem& prob,
                                  const ToleranceConfig& cfg = {},
                                  int grid_points = 256) {
  const Pencil pencil = prob.pencil();
  const double scale = pencil.scale();
  QPSolveResult result;
  result.interval = positivity_interval(pencil, cfg);

  if (result.interval.kind == IntervalKind::Empty) {
    result.status = SolveStatus::NoPSDMultiplier;
    result.diagnostic =
        "I>=(A,B) is empty: no PSD multiplier exists and the method "
        "certifies nothing";
    return result;
  }

  const Eigen::VectorXd a_w0 = prob.A.mat() * prob.w0;
  const Eigen::VectorXd b_z0 = prob.B.mat() * prob.z0;
  const auto x_at = [&](double lambda) -> Eigen::VectorXd {
    const SymMatrix m = pencil.at(lambda);
    return pinv(m, cfg).mat() * (a_w0 + lambda * b_z0);
  };
  const auto h_at = [&](double lambda) {
    return prob.constraint(x_at(lambda));
  };

  struct Candidate {
    Eigen::VectorXd x;
    double lambda;
    bool endpoint;
  };
  std::vector<Candidate> candidates;

  // Interior grid + bisection of sign changes of h.
  if (result.interval.kind == IntervalKind::Interval && grid_points >= 2) {
    const double delta = 100.0 * cfg.root_tol * scale;
    const double lo = result.interval.lambda_minus + delta;
    const double hi = result.interval.lambda_plus - delta;
    if (hi > lo) {
      const double step = (hi - lo) / (grid_points - 1);
      std::vector<double> h(grid_points);
      for (int i = 0; i < grid_points; ++i) h[i] = h_at(lo + i * step);

      const double h_tol = cfg.root_tol * scale;
      bool in_flat_run = false;
      for (int i = 0; i < grid_points; ++i) {
        const double lam = lo + i * step;
        if (std::abs(h[i]) <= h_tol) {
          if (!in_flat_run) candidates.push_back({x_at(lam), lam, false});
          in_flat_run = true;
          continue;
        }
        in_flat_run = false;
        if (i + 1 < grid_points && std::abs(h[i + 1]) > h_tol &&
            h[i] * h[i + 1] < 0.0) {
          double a = lam, b = lam + step;
          double ha = h[i];
          for (int it = 0; it < 200; ++it) {
            const double wtol = 4.0 * std::numeric_limits<double>::epsilon() *
                                std::max({1.0, std::abs(a), std::abs(b)});
            if (std::abs(b - a) <= wtol) break;
            const double m = 0.5 * (a + b);
            const double hm = h_at(m);
            if (hm == 0.0) {
              a = b = m;
              break;
            }
            if ((hm < 0.0) == (ha < 0.0)) {
              a = m;
              ha = hm;
            } else {
              b = m;
            }
          }
          const double root = 0.5 * (a + b);
          candidates.push_back({x_at(root), root, false});
        }
      }
    }
  }

  // Endpoint hard case: x = x_endpoint + t v over nullspace directions v
  // with <Bv,v> != 0, t solving the scalar feasibility quadratic.
  std::vector<double> endpoints;
  endpoints.push_back(result.interval.lambda_minus);
  if (result.interval.kind == IntervalKind::Interval) {
    endpoints.push_back(result.interval.lambda_plus);
  }
  for (double lam0 : endpoints) {
    const double lam = detail::polish_endpoint(pencil, lam0, cfg);
    EigenDecomp ed = eig(pencil.at(lam));
    const double null_tol = 10.0 * cfg.eig_tol * scale;
    const Eigen::VectorXd xbar = x_at(lam);
    const Eigen::VectorXd diff = xbar - prob.z0;
    const double c0 = prob.B.quad(diff);
    for (Eigen::Index j = 0; j < ed.values.size(); ++j) {
      if (std::abs(ed.values(j)) > null_tol) continue;
      const Eigen::VectorXd v = ed.vectors.col(j);
      const double a2 = prob.B.quad(v);
      if (std::abs(a2) <= cfg.rank_tol * scale) continue;
      const double a1 = 2.0 * prob.B.bilin(diff, v);
      const double disc = a1 * a1 - 4.0 * a2 * c0;
      if (disc < 0.0) continue;
      const double sq = std::sqrt(disc);
      for (double sign : {+1.0, -1.0}) {
        const double t = (-a1 + sign * sq) / (2.0 * a2);
        candidates.push_back({xbar + t * v, lam, true});
      }
    }
  }

  // Dedupe nearby candidates; grid runs of h ~ 0 and double quadratic
  // roots otherwise produce repeats.
  std::vector<QPSolution> solutions;
  for (const auto& c : candidates) {
    bool duplicate = false;
    for (const auto& s : solutions) {
      const bool same_lambda =
          std::abs(c.lambda - s.lambda) <= 1e-7 * std::max(1.0, std::abs(s.lambda));
      const bool same_x = (c.x - s.x).norm() <= 1e-7 * std::max(1.0, s.x.norm());
      if (same_lambda && same_x) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      solutions.push_back(
          detail::make_solution(prob, result.interval, c.x, c.lambda,
                                c.endpoint, cfg));
    }
  }

  std::stable_sort(solutions.begin(), solutions.end(),
                   [](const QPSolution& a, const QPSolution& b) {
                     return a.objective < b.objective;
                   });
  result.solutions = std::move(solutions);
  if (result.solutions.empty()) {
    result.status = SolveStatus::NoCandidates;
    result.diagnostic =
        "constraint value h(lambda) has no sign change on the interior grid "
        "and no endpoint quadratic has real roots";
  } else {
    result.status = SolveStatus::Candidates;
  }
  return result;
}

/// Solves the rho-regularized unconstrained problem through its normal
/// equation (T#T + rho V#V) x = T#w0 + rho V#z0.  For rho interior to the
/// admissible interval the normal operator is PSD, so a consistent
/// solution is a global minimizer of the rho-functional; if the operator
/// is PD it is the unique one.
inline QPSolution solve_regularized(const RegularizationProblem& prob,
                                    double rho,
                                    const ToleranceConfig& cfg = {}) {
  const AdmissibleInterval adm = admissible_interval(prob, cfg);
  const double margin =
      cfg.root_tol * std::max({1.0, prob.normal_t().norm(),
                               prob.normal_v().norm()});
  const bool interior =
      adm.interval.kind == IntervalKind::Interval &&
      rho > adm.interval.lambda_minus + margin &&
      rho < adm.interval.lambda_plus - margin;
  if (!interior) {
    throw RhoOutsideInterior(
        "solve_regularized: rho is not interior to the admissible interval");
  }

  const SymMatrix M = normal_operator(prob, rho);
  const Eigen::VectorXd rhs = prob.normal_rhs(rho);
  const Eigen::VectorXd x = pinv(M, cfg).mat() * rhs;
  const double res = (M.mat() * x - rhs).norm();
  const double scale = std::max(1.0, M.norm());

  QPSolution s;
  s.x = x;
  s.lambda = rho;
  s.endpoint_case = false;
  const Eigen::VectorXd tr = prob.T * x - prob.w0;
  const Eigen::VectorXd vr = prob.V * x - prob.z0;
  s.objective = prob.K.inner(tr, tr) + rho * prob.E.inner(vr, vr);
  s.residual_stationarity = res;
  s.residual_feasibility = 0.0;
  const bool pd =
      psd_status(M, cfg).kind == Definiteness::PositiveDefinite;
  s.certificate = (pd && res <= cfg.root_tol * scale)
                      ? Certificate::GlobalMin
                      : Certificate::StationaryOnly;
  return s;
}

}  // namespace pencilqp
