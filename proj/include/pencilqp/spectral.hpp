#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>

#include "pencilqp/errors.hpp"
#include "pencilqp/tolerances.hpp"

namespace pencilqp {

/// Scale factor used to make all tolerances relative: max(1, ||M||_F).
inline double matrix_scale(const Eigen::MatrixXd& m) {
  return std::max(1.0, m.norm());
}

/// Dense real symmetric matrix.  The constructor verifies symmetry up to
/// sym_tol (relative to the largest entry) and stores the exactly
/// symmetrized part (M + M^T)/2.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(Eigen::MatrixXd m,
                     double sym_tol = ToleranceConfig{}.sym_tol) {
    if (m.rows() != m.cols()) {
      throw DimensionMismatch("SymMatrix: input must be square");
    }
    const double ref = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double defect = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (defect > sym_tol * ref) {
      throw NotSymmetric("SymMatrix: symmetry defect " + std::to_string(defect) +
                         " exceeds tolerance");
    }
    m_ = 0.5 * (m + m.transpose().eval());
  }

  static SymMatrix Identity(Eigen::Index n) {
    return SymMatrix(Eigen::MatrixXd::Identity(n, n));
  }

  static SymMatrix Zero(Eigen::Index n) {
    return SymMatrix(Eigen::MatrixXd::Zero(n, n));
  }

  static SymMatrix Diagonal(const Eigen::VectorXd& d) {
    return SymMatrix(Eigen::MatrixXd(d.asDiagonal()));
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double norm() const { return m_.norm(); }
  double scale() const { return std::max(1.0, m_.norm()); }

  /// Quadratic form <Mx, x>.
  double quad(const Eigen::VectorXd& x) const { return x.dot(m_ * x); }

  /// Bilinear form <Mx, y>.
  double bilin(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return y.dot(m_ * x);
  }

 private:
  Eigen::MatrixXd m_;
};

/// Eigendecomposition M = V diag(values) V^T with values sorted ascending
/// and orthonormal columns in V.
struct EigenDecomp {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

inline EigenDecomp eig(const SymMatrix& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M.mat());
  if (solver.info() != Eigen::Success) {
    throw NonConvergence("eig: eigensolver did not converge");
  }
  return EigenDecomp{solver.eigenvalues(), solver.eigenvectors()};
}

/// Eigenvalues-only fast path; used heavily by the interval search.
inline Eigen::VectorXd eigenvalues_only(const SymMatrix& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M.mat(),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NonConvergence("eigenvalues_only: eigensolver did not converge");
  }
  return solver.eigenvalues();
}

inline double min_eigenvalue(const SymMatrix& M) {
  return eigenvalues_only(M)(0);
}

enum class Definiteness {
  PositiveDefinite,
  PositiveSemidefinite,
  Indefinite,
  NegativeSemidefinite,
  NegativeDefinite,
};

inline const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return "positive_definite";
    case Definiteness::PositiveSemidefinite: return "positive_semidefinite";
    case Definiteness::Indefinite: return "indefinite";
    case Definiteness::NegativeSemidefinite: return "negative_semidefinite";
    case Definiteness::NegativeDefinite: return "negative_definite";
  }
  return "?";
}

struct PsdStatus {
  Definiteness kind;
  double min_eigenvalue;
  double max_eigenvalue;
};

/// Classifies M by its extreme eigenvalues against +-psd_tol * scale.
inline PsdStatus psd_status(const SymMatrix& M,
                            const ToleranceConfig& cfg = {}) {
  const Eigen::VectorXd w = eigenvalues_only(M);
  const double lo = w(0);
  const double hi = w(w.size() - 1);
  const double tol = cfg.psd_tol * M.scale();
  Definiteness kind;
  if (lo > tol) {
    kind = Definiteness::PositiveDefinite;
  } else if (hi < -tol) {
    kind = Definiteness::NegativeDefinite;
  } else if (lo >= -tol) {
    kind = Definiteness::PositiveSemidefinite;
  } else if (hi <= tol) {
    kind = Definiteness::NegativeSemidefinite;
  } else {
    kind = Definiteness::Indefinite;
  }
  return PsdStatus{kind, lo, hi};
}

inline bool is_psd(const PsdStatus& st) {
  return st.kind == Definiteness::PositiveDefinite ||
         st.kind == Definiteness::PositiveSemidefinite;
}

/// Symmetric PSD square root via eigendecomposition.  Eigenvalues in
/// [-psd_tol*scale, 0) are clamped to zero, so endpoint operators that are
/// PSD only up to rounding still have a root.
inline SymMatrix sqrt_psd(const SymMatrix& M, const ToleranceConfig& cfg = {}) {
  EigenDecomp ed = eig(M);
  const double tol = cfg.psd_tol * M.scale();
  if (ed.values(0) < -tol) {
    throw NotPSD("sqrt_psd: min eigenvalue " + std::to_string(ed.values(0)) +
                 " below -psd_tol*scale");
  }
  Eigen::VectorXd r = ed.values.cwiseMax(0.0).cwiseSqrt();
  return SymMatrix(ed.vectors * r.asDiagonal() * ed.vectors.transpose());
}

/// Moore-Penrose pseudo-inverse of a symmetric matrix via its
/// eigendecomposition; eigenvalues with |w| <= rank_tol*scale are treated
/// as zero.
inline SymMatrix pinv(const SymMatrix& M, const ToleranceConfig& cfg = {}) {
  EigenDecomp ed = eig(M);
  const double tol = cfg.rank_tol * M.scale();
  Eigen::VectorXd inv = ed.values;
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    inv(i) = std::abs(inv(i)) > tol ? 1.0 / inv(i) : 0.0;
  }
  return SymMatrix(ed.vectors * inv.asDiagonal() * ed.vectors.transpose());
}

/// Number of singular values above the absolute threshold.
inline Eigen::Index rank_with_threshold(const Eigen::MatrixXd& m,
                                        double abs_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > abs_tol) ++r;
  return r;
}

/// Orthonormal basis of the kernel of a (possibly rectangular) matrix:
/// right singular vectors whose singular value is <= rank_tol*scale.
inline Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m,
                                    const ToleranceConfig& cfg = {}) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const double tol = cfg.rank_tol * matrix_scale(m);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > tol) ++r;
  // Full V also spans directions beyond min(rows, cols); those belong to
  // the kernel as well when cols > rows.
  return svd.matrixV().rightCols(m.cols() - r);
}

/// Orthonormal basis of the range (left singular vectors above threshold).
inline Eigen::MatrixXd range_basis(const Eigen::MatrixXd& m,
                                   const ToleranceConfig& cfg = {}) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const double tol = cfg.rank_tol * matrix_scale(m);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > tol) ++r;
  return svd.matrixU().leftCols(r);
}

/// Finite-dimensional Douglas criterion: R(B) is contained in R(A) iff
/// appending the columns of B to A does not increase the rank.  A common
/// threshold taken from the concatenated matrix keeps the two rank
/// decisions coherent.
inline bool range_included(const Eigen::MatrixXd& Bm, const Eigen::MatrixXd& Am,
                           const ToleranceConfig& cfg = {}) {
  if (Bm.rows() != Am.rows()) {
    throw DimensionMismatch("range_included: row dimensions differ");
  }
  Eigen::MatrixXd cat(Am.rows(), Am.cols() + Bm.cols());
  cat << Am, Bm;
  const double tol = cfg.rank_tol * matrix_scale(cat);
  return rank_with_threshold(cat, tol) == rank_with_threshold(Am, tol);
}

}  // namespace pencilqp
