#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "pencilqp/errors.hpp"
#include "pencilqp/pencil.hpp"
#include "pencilqp/spectral.hpp"
#include "pencilqp/tolerances.hpp"

namespace pencilqp {

/// Finite-dimensional Krein space: R^n with the indefinite inner product
/// <x,y>_J = (Jx)^T y for a symmetric invertible Gram matrix J.  General
/// invertible Grams are allowed, not only +-1 signatures.
class KreinSpace {
 public:
  explicit KreinSpace(Eigen::MatrixXd J, const ToleranceConfig& cfg = {})
      : J_(SymMatrix(std::move(J), cfg.sym_tol)) {
    EigenDecomp ed = eig(J_);
    const double tol = cfg.rank_tol * J_.scale();
    if (ed.values.cwiseAbs().minCoeff() <= tol) {
      throw GramNotInvertible("KreinSpace: Gram matrix is singular");
    }
    Jinv_ = ed.vectors * ed.values.cwiseInverse().asDiagonal() *
            ed.vectors.transpose();
  }

  static KreinSpace hilbert(Eigen::Index n) {
    return KreinSpace(Eigen::MatrixXd::Identity(n, n));
  }

  static KreinSpace from_signature(const std::vector<int>& signs) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(signs.size()));
    for (std::size_t i = 0; i < signs.size(); ++i) {
      d(static_cast<Eigen::Index>(i)) = signs[i] < 0 ? -1.0 : 1.0;
    }
    return KreinSpace(Eigen::MatrixXd(d.asDiagonal()));
  }

  Eigen::Index dim() const { return J_.dim(); }
  const SymMatrix& gram() const { return J_; }
  const Eigen::MatrixXd& gram_inverse() const { return Jinv_; }

  double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return (J_.mat() * x).dot(y);
  }

 private:
  SymMatrix J_;
  Eigen::MatrixXd Jinv_;
};

/// K x E with the rho-weighted product <(y,z),(y',z')> =
/// <y,y'>_K + rho <z,z'>_E, realized by the block Gram diag(J_K, rho J_E).
struct ProductKreinSpace {
  KreinSpace K;
  KreinSpace E;
  double rho;

  ProductKreinSpace(KreinSpace k, KreinSpace e, double r)
      : K(std::move(k)), E(std::move(e)), rho(r) {
    if (rho == 0.0) {
      throw RhoZero("ProductKreinSpace: rho must be nonzero");
    }
  }

  Eigen::Index dim() const { return K.dim() + E.dim(); }

  Eigen::MatrixXd gram() const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim(), dim());
    J.topLeftCorner(K.dim(), K.dim()) = K.gram().mat();
    J.bottomRightCorner(E.dim(), E.dim()) = rho * E.gram().mat();
    return J;
  }
};

/// Krein adjoint of T : (from, J_from) -> (to, J_to), i.e. the unique T#
/// with <Tx,y>_to = <x,T#y>_from; in Gram form T# = J_from^-1 T^T J_to.
inline Eigen::MatrixXd krein_adjoint(const Eigen::MatrixXd& T,
                                     const KreinSpace& from,
                                     const KreinSpace& to) {
  if (T.cols() != from.dim() || T.rows() != to.dim()) {
    throw DimensionMismatch("krein_adjoint: operator shape does not match spaces");
  }
  return from.gram_inverse() * T.transpose() * to.gram().mat();
}

/// The stacked operator Lx = (Tx, Vx).
inline Eigen::MatrixXd build_L(const Eigen::MatrixXd& T,
                               const Eigen::MatrixXd& V) {
  if (T.cols() != V.cols()) {
    throw DimensionMismatch("build_L: column dimensions differ");
  }
  Eigen::MatrixXd L(T.rows() + V.rows(), T.cols());
  L << T, V;
  return L;
}

/// Data of the regularization problem: T : H -> K and V : H -> E between
/// the Hilbert space H = R^n and Krein spaces K, E, plus the target pair
/// (w0, z0).
struct RegularizationProblem {
  Eigen::MatrixXd T;
  Eigen::MatrixXd V;
  KreinSpace K;
  KreinSpace E;
  Eigen::VectorXd w0;
  Eigen::VectorXd z0;

  RegularizationProblem(Eigen::MatrixXd t, Eigen::MatrixXd v, KreinSpace k,
                        KreinSpace e, Eigen::VectorXd w, Eigen::VectorXd z)
      : T(std::move(t)),
        V(std::move(v)),
        K(std::move(k)),
        E(std::move(e)),
        w0(std::move(w)),
        z0(std::move(z)) {
    if (T.cols() != V.cols() || T.rows() != K.dim() || V.rows() != E.dim() ||
        w0.size() != K.dim() || z0.size() != E.dim()) {
      throw DimensionMismatch("RegularizationProblem: inconsistent dimensions");
    }
  }

  Eigen::Index dim_h() const { return T.cols(); }

  /// T#T = T^T J_K T, a symmetric operator on H.
  SymMatrix normal_t() const {
    return SymMatrix(T.transpose() * K.gram().mat() * T, 1e-8);
  }

  /// V#V = V^T J_E V.
  SymMatrix normal_v() const {
    return SymMatrix(V.transpose() * E.gram().mat() * V, 1e-8);
  }

  /// Right-hand side of the normal equation, T#w0 + rho V#z0.
  Eigen::VectorXd normal_rhs(double rho) const {
    return T.transpose() * (K.gram().mat() * w0) +
           rho * (V.transpose() * (E.gram().mat() * z0));
  }
};

/// L#L = T#T + rho V#V, the normal operator of the rho-weighted problem.
inline SymMatrix normal_operator(const RegularizationProblem& prob,
                                 double rho) {
  if (rho == 0.0) {
    throw RhoZero("normal_operator: rho must be nonzero");
  }
  return SymMatrix(prob.normal_t().mat() + rho * prob.normal_v().mat(), 1e-8);
}

/// Classification of R(L) as a subspace of (K x E, <.,.>_rho).  The
/// pseudo-regular/regular distinction collapses in finite dimension
/// (M + M^perp is always closed), which the note records.
struct SubspaceClassification {
  Eigen::Index isotropic_dim = 0;
  bool nondegenerate = false;
  bool regular = false;
  bool nonnegative = false;
  bool uniformly_positive = false;
  bool corollary_checks_applied = false;  // false when V is not surjective
  std::string note = "pseudo-regular holds automatically in finite dimension";
};

/// Classifies R(L) inside the rho-weighted product space.  Every flag is
/// computed from the Gram form restricted to an orthonormal basis of R(L)
/// and cross-checked against an independent criterion on the normal
/// operator; disagreement raises InconsistentChecks.
inline SubspaceClassification classify_range_of_L(
    const RegularizationProblem& prob, double rho,
    const ToleranceConfig& cfg = {}) {
  if (rho == 0.0) {
    throw RhoZero("classify_range_of_L: rho must be nonzero");
  }
  const Eigen::MatrixXd L = build_L(prob.T, prob.V);
  const ProductKreinSpace product(prob.K, prob.E, rho);
  const Eigen::MatrixXd Jrho = product.gram();

  const Eigen::MatrixXd Q = range_basis(L, cfg);
  const Eigen::Index rank_l = Q.cols();
  const Eigen::Index ker_l = L.cols() - rank_l;

  SubspaceClassification out;

  const SymMatrix gram_r =
      SymMatrix(Q.transpose() * Jrho * Q, 1e-8);
  EigenDecomp gd = eig(gram_r);
  const double iso_tol = cfg.rank_tol * gram_r.scale();
  for (Eigen::Index i = 0; i < gd.values.size(); ++i) {
    if (std::abs(gd.values(i)) <= iso_tol) ++out.isotropic_dim;
  }
  out.nondegenerate = out.isotropic_dim == 0;

  // Independent criterion: R(L) nondegenerate iff N(L#L) = N(T) cap N(V),
  // i.e. the kernel dimensions of the normal operator and of L agree.
  const SymMatrix M = normal_operator(prob, rho);
  EigenDecomp md = eig(M);
  const double ker_tol = cfg.rank_tol * M.scale();
  Eigen::Index ker_m = 0;
  for (Eigen::Index i = 0; i < md.values.size(); ++i) {
    if (std::abs(md.values(i)) <= ker_tol) ++ker_m;
  }
  if ((ker_m == ker_l) != out.nondegenerate) {
    throw InconsistentChecks(
        "classify_range_of_L: Gram-form isotropy and N(L#L) kernel "
        "criterion disagree");
  }

  // In finite dimension dim(M + M^perp) = dim(K x E) - isotropic_dim, so
  // regular coincides with nondegenerate.
  out.regular = out.nondegenerate;

  const bool v_surjective =
      rank_with_threshold(prob.V, cfg.rank_tol * matrix_scale(prob.V)) ==
      prob.E.dim();
  if (v_surjective) {
    out.corollary_checks_applied = true;
    const Eigen::MatrixXd t_sharp =
        krein_adjoint(prob.T, KreinSpace::hilbert(prob.dim_h()), prob.K);
    const bool inclusion = range_included(t_sharp, M.mat(), cfg);
    if (inclusion != out.regular) {
      throw InconsistentChecks(
          "classify_range_of_L: R(T#) range-inclusion criterion disagrees");
    }
    // R(L#L) = N(T)^perp + N(V)^perp = R([T^T V^T]) exactly when regular.
    Eigen::MatrixXd tv(prob.dim_h(), prob.T.rows() + prob.V.rows());
    tv << prob.T.transpose(), prob.V.transpose();
    const bool sum_equal =
        range_included(tv, M.mat(), cfg) && range_included(M.mat(), tv, cfg);
    if (sum_equal != out.regular) {
      throw InconsistentChecks(
          "classify_range_of_L: kernel-sum range criterion disagrees");
    }
  }

  out.nonnegative = is_psd(psd_status(gram_r, cfg));
  out.uniformly_positive = out.regular && out.nonnegative;

  if (ker_l == 0) {
    const bool normal_pd =
        psd_status(M, cfg).kind == Definiteness::PositiveDefinite;
    if (normal_pd != out.uniformly_positive) {
      throw InconsistentChecks(
          "classify_range_of_L: uniform positivity and L#L definiteness "
          "disagree");
    }
  }
  return out;
}

/// Admissible regularization interval plus whether T#T is indefinite (the
/// hypothesis under which 0 is guaranteed to stay outside the interval).
struct AdmissibleInterval {
  PositivityInterval interval;
  bool t_normal_indefinite = false;
};

/// The set of rho with T#T + rho V#V positive semidefinite, delegated to
/// the pencil machinery on (T#T, V#V).
inline AdmissibleInterval admissible_interval(const RegularizationProblem& prob,
                                              const ToleranceConfig& cfg = {}) {
  const SymMatrix A = prob.normal_t();
  const SymMatrix B = prob.normal_v();
  if (psd_status(B, cfg).kind != Definiteness::Indefinite) {
    throw VNotIndefinite("admissible_interval: V#V is not indefinite");
  }
  AdmissibleInterval out;
  Pencil pencil(A, B);
  try {
    out.interval = positivity_interval(pencil, cfg);
  } catch (const BNotIndefinite&) {
    throw VNotIndefinite("admissible_interval: V#V is not indefinite");
  }
  out.t_normal_indefinite =
      psd_status(A, cfg).kind == Definiteness::Indefinite;
  if (out.t_normal_indefinite && out.interval.kind != IntervalKind::Empty &&
      out.interval.contains(0.0, cfg.root_tol * pencil.scale())) {
    throw InconsistentChecks(
        "admissible_interval: T#T indefinite yet 0 lies in the interval");
  }
  return out;
}

}  // namespace pencilqp
