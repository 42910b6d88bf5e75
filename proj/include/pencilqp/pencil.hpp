#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pencilqp/errors.hpp"
#include "pencilqp/spectral.hpp"
#include "pencilqp/tolerances.hpp"

namespace pencilqp {

/// Linear pencil P(lambda) = A + lambda*B of symmetric matrices.
struct Pencil {
  SymMatrix A;
  SymMatrix B;

  Pencil(SymMatrix a, SymMatrix b) : A(std::move(a)), B(std::move(b)) {
    if (A.dim() != B.dim()) {
      throw DimensionMismatch("Pencil: A and B dimensions differ");
    }
  }

  Eigen::Index dim() const { return A.dim(); }
  double scale() const { return std::max({1.0, A.norm(), B.norm()}); }

  SymMatrix at(double lambda) const {
    return SymMatrix(A.mat() + lambda * B.mat());
  }
};

enum class IntervalKind { Empty, Singleton, Interval };

inline const char* to_string(IntervalKind k) {
  switch (k) {
    case IntervalKind::Empty: return "empty";
    case IntervalKind::Singleton: return "singleton";
    case IntervalKind::Interval: return "interval";
  }
  return "?";
}

/// The set of lambda with A + lambda*B positive semidefinite: empty, a
/// single point, or a closed interval [lambda_minus, lambda_plus].
/// strict_nonempty records whether the positive-definite set (the open
/// interior) is nonempty.
struct PositivityInterval {
  IntervalKind kind = IntervalKind::Empty;
  double lambda_minus = std::numeric_limits<double>::quiet_NaN();
  double lambda_plus = std::numeric_limits<double>::quiet_NaN();
  bool strict_nonempty = false;

  double midpoint() const { return 0.5 * (lambda_minus + lambda_plus); }
  double width() const {
    return kind == IntervalKind::Empty ? 0.0 : lambda_plus - lambda_minus;
  }
  bool contains(double lambda, double slack = 0.0) const {
    if (kind == IntervalKind::Empty) return false;
    return lambda >= lambda_minus - slack && lambda <= lambda_plus + slack;
  }
};

/// Smallest eigenvalue of A + lambda*B.  As a function of lambda this is a
/// pointwise infimum of affine functions, hence concave; all interval
/// computation rests on that.
inline double min_eig_at(const Pencil& p, double lambda) {
  return min_eigenvalue(p.at(lambda));
}

namespace detail {

struct IntervalSearch {
  PositivityInterval interval;
  double arg_max = 0.0;  // maximizer of f(lambda) = lambda_min(A + lambda B)
  double f_max = 0.0;
};

inline void require_indefinite_b(const Pencil& p, const ToleranceConfig& cfg) {
  const PsdStatus st = psd_status(p.B, cfg);
  if (st.kind != Definiteness::Indefinite) {
    throw BNotIndefinite(
        std::string("positivity interval requires an indefinite B; got ") +
        to_string(st.kind));
  }
}

/// Bisects the predicate f(lambda) >= level between an inside point a and
/// an outside point b (f(a) >= level > f(b)); returns the inside end of the
/// final bracket.
template <class F>
double bisect_crossing(F&& f, double a, double b, double level,
                       int max_iters = 200) {
  for (int i = 0; i < max_iters; ++i) {
    const double wtol = 4.0 * std::numeric_limits<double>::epsilon() *
                        std::max({1.0, std::abs(a), std::abs(b)});
    if (std::abs(b - a) <= wtol) break;
    const double m = 0.5 * (a + b);
    (f(m) >= level ? a : b) = m;
  }
  return a;
}

/// Locates the maximum of the concave f by geometric bracket expansion
/// from 0 followed by trisection, then finds the two crossings of a level
/// just below zero by outward expansion plus bisection.
inline IntervalSearch interval_search(const Pencil& p,
                                      const ToleranceConfig& cfg) {
  require_indefinite_b(p, cfg);
  const double scale = p.scale();
  const auto f = [&](double lambda) { return min_eig_at(p, lambda); };

  // Bracket the maximizer.  B indefinite forces f -> -inf on both sides,
  // so expansion terminates.
  const double step0 = 1.0 + p.A.norm() / std::max(1.0, p.B.norm());
  const double f0 = f(0.0);
  double lo = -step0, hi = step0;
  double flo = f(lo), fhi = f(hi);
  int guard = 0;
  while (fhi >= f0 && ++guard < 80) {
    hi *= 2.0;
    fhi = f(hi);
  }
  guard = 0;
  while (flo >= f0 && ++guard < 80) {
    lo *= 2.0;
    flo = f(lo);
  }
  if (fhi >= f0 || flo >= f0) {
    throw NonConvergence("interval_search: could not bracket the maximum");
  }

  // Trisection; concavity makes all three branch decisions safe, including
  // plateaus (equal midpoint values pinch the bracket from both sides).
  for (int i = 0; i < 200; ++i) {
    const double wtol = 1e-10 * std::max({1.0, std::abs(lo), std::abs(hi)});
    if (hi - lo <= wtol) break;
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const double fm1 = f(m1), fm2 = f(m2);
    if (fm1 < fm2) {
      lo = m1;
    } else if (fm1 > fm2) {
      hi = m2;
    } else {
      lo = m1;
      hi = m2;
    }
  }

  IntervalSearch out;
  out.arg_max = 0.5 * (lo + hi);
  out.f_max = f(out.arg_max);

  if (out.f_max < -cfg.psd_tol * scale) {
    out.interval.kind = IntervalKind::Empty;
    return out;
  }

  // Crossing level: slightly below both zero and f_max so that the
  // maximizer itself always satisfies the inside predicate, even when
  // f_max is a hair negative (singleton case) or an exact-zero plateau
  // rattles at rounding level.
  const double level = std::min(-1e-13 * scale, 2.0 * out.f_max);

  const auto locate = [&](double direction) {
    double step = step0;
    double outside = out.arg_max + direction * step;
    int expand_guard = 0;
    while (f(outside) >= level && ++expand_guard < 200) {
      step *= 2.0;
      outside = out.arg_max + direction * step;
    }
    if (f(outside) >= level) {
      throw NonConvergence("interval_search: no sign change found");
    }
    return bisect_crossing(f, out.arg_max, outside, level);
  };

  double lambda_minus = locate(-1.0);
  double lambda_plus = locate(+1.0);

  PositivityInterval& iv = out.interval;
  if (lambda_plus - lambda_minus <= cfg.width_tol * scale) {
    iv.kind = IntervalKind::Singleton;
    iv.lambda_minus = iv.lambda_plus = 0.5 * (lambda_minus + lambda_plus);
    iv.strict_nonempty = false;
  } else {
    iv.kind = IntervalKind::Interval;
    iv.lambda_minus = lambda_minus;
    iv.lambda_plus = lambda_plus;
    iv.strict_nonempty = f(iv.midpoint()) > cfg.psd_tol * scale;
  }
  return out;
}

/// One guarded Newton polish of an endpoint: the derivative of
/// f(lambda) = lambda_min is <Bv, v> for the minimizing eigenvector v.
inline double polish_endpoint(const Pencil& p, double lambda,
                              const ToleranceConfig& cfg) {
  const double scale = p.scale();
  for (int i = 0; i < 3; ++i) {
    EigenDecomp ed = eig(p.at(lambda));
    const double fval = ed.values(0);
    const Eigen::VectorXd v = ed.vectors.col(0);
    const double slope = p.B.quad(v);
    if (std::abs(slope) < 1e-8 * scale) break;
    double delta = -fval / slope;
    const double cap = cfg.width_tol * std::max(1.0, std::abs(lambda));
    delta = std::clamp(delta, -cap, cap);
    lambda += delta;
    if (std::abs(delta) <
        1e-15 * std::max(1.0, std::abs(lambda))) {
      break;
    }
  }
  return lambda;
}

/// Orthonormal basis of N(A) intersected with N(B): kernel of the stacked
/// matrix [A; B].
inline Eigen::MatrixXd joint_kernel(const Pencil& p,
                                    const ToleranceConfig& cfg) {
  Eigen::MatrixXd stacked(2 * p.dim(), p.dim());
  stacked << p.A.mat(), p.B.mat();
  return kernel_basis(stacked, cfg);
}

}  // namespace detail

/// Computes I>=(A,B).  Requires B indefinite; a semidefinite B would make
/// the set a half-line, which this library treats as a hard error rather
/// than a silent special case.
inline PositivityInterval positivity_interval(const Pencil& p,
                                              const ToleranceConfig& cfg = {}) {
  return detail::interval_search(p, cfg).interval;
}

/// Outcome of the neutral-cone positivity check: either the nonempty
/// interval certifying <Ax,x> >= 0 on Q(B), or a unit witness x with
/// <Bx,x> ~ 0 and <Ax,x> < 0 falsifying it.
struct NeutralCertificate {
  bool certified = false;
  PositivityInterval interval;      // set when certified
  Eigen::VectorXd witness;          // set when falsified; unit norm
  double witness_constraint = 0.0;  // <B w, w>
  double witness_objective = 0.0;   // <A w, w>
};

namespace detail {

/// Neutral vectors inside the span of the bottom eigenvectors of
/// A + lambda* B, where lambda* maximizes the minimum eigenvalue.  At the
/// maximizer the restricted B-form straddles zero, so a neutral
/// combination of its extreme eigendirections exists and inherits the
/// negative A-form value.
inline std::vector<Eigen::VectorXd> witness_candidates(
    const Pencil& p, double arg_max, const ToleranceConfig& cfg) {
  std::vector<Eigen::VectorXd> cands;
  EigenDecomp ed = eig(p.at(arg_max));
  const Eigen::Index n = p.dim();
  const Eigen::Index kmax = std::min<Eigen::Index>(n, 6);

  for (Eigen::Index k = 1; k <= kmax; ++k) {
    const Eigen::MatrixXd E = ed.vectors.leftCols(k);
    if (k == 1) {
      cands.push_back(E.col(0));
      continue;
    }
    const Eigen::MatrixXd BE = E.transpose() * p.B.mat() * E;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bs(
        0.5 * (BE + BE.transpose()));
    const double bmin = bs.eigenvalues()(0);
    const double bmax = bs.eigenvalues()(k - 1);
    if (bmin > 0.0 || bmax < 0.0) continue;
    const Eigen::VectorXd a = E * bs.eigenvectors().col(k - 1);  // <Ba,a>=bmax
    const Eigen::VectorXd b = E * bs.eigenvectors().col(0);      // <Bb,b>=bmin
    if (std::abs(bmin) < 1e-14) {
      cands.push_back(b);
      continue;
    }
    const double cross = p.B.bilin(a, b);
    const double disc = std::max(0.0, cross * cross - bmin * bmax);
    for (double sign : {+1.0, -1.0}) {
      const double t = (-cross + sign * std::sqrt(disc)) / bmin;
      Eigen::VectorXd x = a + t * b;
      if (x.norm() > 0) cands.push_back(x);
    }
  }

  // Exact-root polish: move each candidate along eigendirections of B to
  // kill its residual B-form value, choosing the smaller quadratic root.
  EigenDecomp bd = eig(p.B);
  std::vector<Eigen::VectorXd> polished = cands;
  for (const auto& c : cands) {
    Eigen::VectorXd x = c.normalized();
    const double bx = p.B.quad(x);
    if (std::abs(bx) < 1e-15) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::VectorXd dir = bd.vectors.col(j);
      const double a2 = bd.values(j);
      const double a1 = 2.0 * p.B.bilin(x, dir);
      const double disc = a1 * a1 - 4.0 * a2 * bx;
      if (disc < 0.0) continue;
      double t;
      if (std::abs(a2) < 1e-14) {
        if (std::abs(a1) < 1e-14) continue;
        t = -bx / a1;
      } else {
        const double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
        const double t1 = q / a2;
        const double t2 = std::abs(q) > 1e-300 ? bx / q : t1;
        t = std::abs(t1) < std::abs(t2) ? t1 : t2;
      }
      polished.push_back(x + t * dir);
    }
  }
  return polished;
}

}  // namespace detail

/// Decides whether the quadratic form of A is nonnegative on the neutral
/// cone Q(B), which is equivalent to I>=(A,B) being nonempty.
inline NeutralCertificate neutral_positivity_certificate(
    const Pencil& p, const ToleranceConfig& cfg = {}) {
  detail::IntervalSearch search = detail::interval_search(p, cfg);
  NeutralCertificate cert;
  if (search.interval.kind != IntervalKind::Empty) {
    cert.certified = true;
    cert.interval = search.interval;
    return cert;
  }

  const double scale = p.scale();
  double best = 0.0;
  for (const auto& cand : detail::witness_candidates(p, search.arg_max, cfg)) {
    const Eigen::VectorXd x = cand.normalized();
    const double bx = p.B.quad(x);
    const double ax = p.A.quad(x);
    if (std::abs(bx) <= cfg.root_tol * scale && ax < -cfg.psd_tol * scale &&
        ax < best) {
      best = ax;
      cert.witness = x;
      cert.witness_constraint = bx;
      cert.witness_objective = ax;
    }
  }
  if (cert.witness.size() == 0) {
    throw NonConvergence(
        "neutral_positivity_certificate: interval empty but no witness "
        "located");
  }
  return cert;
}

/// Basis of N(A + lambda B) at the interval midpoint, asserted against the
/// independently computed N(A) \cap N(B); on the open interior the two
/// coincide.
inline Eigen::MatrixXd interior_nullspace(const Pencil& p,
                                          const PositivityInterval& interval,
                                          const ToleranceConfig& cfg = {}) {
  if (interval.kind != IntervalKind::Interval) {
    throw IntervalNotOpen("interior_nullspace: interval has empty interior");
  }
  const double mid = interval.midpoint();
  EigenDecomp ed = eig(p.at(mid));
  const double tol = cfg.rank_tol * p.scale();
  Eigen::Index k = 0;
  while (k < ed.values.size() && std::abs(ed.values(k)) <= tol) ++k;
  Eigen::MatrixXd basis = ed.vectors.leftCols(k);

  Eigen::MatrixXd joint = detail::joint_kernel(p, cfg);
  const double proj_gap =
      (basis * basis.transpose() - joint * joint.transpose()).norm();
  if (basis.cols() != joint.cols() || proj_gap > 1e-6) {
    throw InconsistentChecks(
        "interior_nullspace: midpoint kernel disagrees with N(A) \\cap N(B)");
  }
  return basis;
}

enum class EndpointSide { Lower, Upper };

/// A null vector of the endpoint operator lying outside the joint kernel,
/// together with its Rayleigh data.
struct MWitness {
  Eigen::VectorXd v;
  double b_form;          // <Bv, v>
  double rayleigh_ratio;  // <Av, v> / <Bv, v>, equals -lambda at endpoints
};

struct EndpointAnalysis {
  EndpointSide endpoint;
  double lambda;
  Eigen::MatrixXd null_basis;  // orthonormal columns spanning N(A+lambda B)
  Eigen::Index joint_kernel_dim;
  std::vector<MWitness> m_witnesses;
};

/// Nullspace structure at an endpoint of I>=(A,B): the kernel splits into
/// the joint kernel and Rayleigh-extremal directions whose B-form sign
/// identifies the side.
inline EndpointAnalysis endpoint_analysis(const Pencil& p,
                                          const PositivityInterval& interval,
                                          EndpointSide which,
                                          const ToleranceConfig& cfg = {}) {
  if (interval.kind == IntervalKind::Empty) {
    throw EmptyInterval("endpoint_analysis: interval is empty");
  }
  double lambda = which == EndpointSide::Lower ? interval.lambda_minus
                                               : interval.lambda_plus;
  // Endpoint kernels are rank-revealed only if lambda is accurate, so
  // re-polish before reading eigenvectors.
  lambda = detail::polish_endpoint(p, lambda, cfg);

  const double scale = p.scale();
  EigenDecomp ed = eig(p.at(lambda));
  const double tol = 10.0 * cfg.eig_tol * scale;
  std::vector<Eigen::Index> null_idx;
  for (Eigen::Index i = 0; i < ed.values.size(); ++i) {
    if (std::abs(ed.values(i)) <= tol) null_idx.push_back(i);
  }
  Eigen::MatrixXd basis(p.dim(), static_cast<Eigen::Index>(null_idx.size()));
  for (std::size_t j = 0; j < null_idx.size(); ++j) {
    basis.col(static_cast<Eigen::Index>(j)) = ed.vectors.col(null_idx[j]);
  }

  EndpointAnalysis out;
  out.endpoint = which;
  out.lambda = lambda;
  out.null_basis = basis;

  Eigen::MatrixXd joint = detail::joint_kernel(p, cfg);
  out.joint_kernel_dim = joint.cols();

  // Witnesses: the part of the nullspace orthogonal to the joint kernel.
  Eigen::MatrixXd complement = basis;
  if (joint.cols() > 0 && basis.cols() > 0) {
    complement = basis - joint * (joint.transpose() * basis);
  }
  if (complement.cols() > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(complement);
    qr.setThreshold(cfg.rank_tol);
    const Eigen::Index r = qr.rank();
    Eigen::MatrixXd q = qr.householderQ() *
                        Eigen::MatrixXd::Identity(complement.rows(), r);
    for (Eigen::Index j = 0; j < r; ++j) {
      const Eigen::VectorXd v = q.col(j);
      const double b = p.B.quad(v);
      const double a = p.A.quad(v);
      out.m_witnesses.push_back(MWitness{v, b, b != 0.0 ? a / b : 0.0});
    }
  }
  return out;
}

/// The seminorm ||x||_lambda = <(A + lambda B)x, x>^(1/2), defined for
/// lambda in the positivity interval.
inline double seminorm(const Pencil& p, double lambda,
                       const Eigen::VectorXd& x,
                       const ToleranceConfig& cfg = {}) {
  const SymMatrix M = p.at(lambda);
  if (!is_psd(psd_status(M, cfg))) {
    throw OutsideInterval("seminorm: lambda outside I>=(A,B)");
  }
  return std::sqrt(std::max(0.0, M.quad(x)));
}

/// Result of reducing P(lambda) to the congruent pencil I + eta*G with
/// G = (A + rho B)^(-1/2) B (A + rho B)^(-1/2); the positivity interval of
/// (I, G) is available in closed form from the extreme eigenvalues of G,
/// and I>=(A,B) = rho + I>=(I,G).
struct CongruenceReduction {
  SymMatrix G;
  PositivityInterval interval_of_ig;
  double rho;

  PositivityInterval shifted_interval() const {
    PositivityInterval s = interval_of_ig;
    if (s.kind != IntervalKind::Empty) {
      s.lambda_minus += rho;
      s.lambda_plus += rho;
    }
    return s;
  }
};

inline CongruenceReduction congruence_reduction(const Pencil& p, double rho,
                                                const ToleranceConfig& cfg = {}) {
  const SymMatrix M = p.at(rho);
  if (psd_status(M, cfg).kind != Definiteness::PositiveDefinite) {
    throw NotPositiveDefiniteAtRho(
        "congruence_reduction: A + rho*B is not positive definite");
  }
  EigenDecomp ed = eig(M);
  const Eigen::VectorXd inv_sqrt = ed.values.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd S =
      ed.vectors * inv_sqrt.asDiagonal() * ed.vectors.transpose();
  const SymMatrix G = SymMatrix(S * p.B.mat() * S, 1e-8);

  const Eigen::VectorXd gw = eigenvalues_only(G);
  const double gmin = gw(0), gmax = gw(gw.size() - 1);
  const double gtol = cfg.psd_tol * G.scale();
  if (!(gmax > gtol && gmin < -gtol)) {
    throw BNotIndefinite("congruence_reduction: G inherits a semidefinite B");
  }

  CongruenceReduction out{G, PositivityInterval{}, rho};
  PositivityInterval& iv = out.interval_of_ig;
  const double eta_minus = -1.0 / gmax;
  const double eta_plus = -1.0 / gmin;
  if (eta_plus - eta_minus <= cfg.width_tol * G.scale()) {
    iv.kind = IntervalKind::Singleton;
    iv.lambda_minus = iv.lambda_plus = 0.5 * (eta_minus + eta_plus);
    iv.strict_nonempty = false;
  } else {
    iv.kind = IntervalKind::Interval;
    iv.lambda_minus = eta_minus;
    iv.lambda_plus = eta_plus;
    iv.strict_nonempty = true;
  }
  return out;
}

/// Simultaneous diagonalization by congruence at an interior lambda:
/// S = (A + lambda B)^(-1/2), U orthonormal with U^T (SBS) U = diag(d),
/// and then U^T (SAS) U = diag(1 - lambda d).
struct SimultaneousDiagonalization {
  SymMatrix S;
  Eigen::MatrixXd U;
  Eigen::VectorXd d;
};

inline SimultaneousDiagonalization simultaneous_diagonalization(
    const Pencil& p, double lambda, const ToleranceConfig& cfg = {}) {
  const SymMatrix M = p.at(lambda);
  if (psd_status(M, cfg).kind != Definiteness::PositiveDefinite) {
    throw NotPositiveDefiniteAtLambda(
        "simultaneous_diagonalization: A + lambda*B is not positive definite");
  }
  EigenDecomp ed = eig(M);
  const Eigen::VectorXd inv_sqrt = ed.values.cwiseSqrt().cwiseInverse();
  const SymMatrix S = SymMatrix(
      ed.vectors * inv_sqrt.asDiagonal() * ed.vectors.transpose(), 1e-8);
  const SymMatrix SBS = SymMatrix(S.mat() * p.B.mat() * S.mat(), 1e-8);
  EigenDecomp sd = eig(SBS);
  return SimultaneousDiagonalization{S, sd.vectors, sd.values};
}

}  // namespace pencilqp
