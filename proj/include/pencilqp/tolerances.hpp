#pragma once

#include "pencilqp/errors.hpp"

namespace pencilqp {

/// Relative tolerances governing every rank, sign and root decision in the
/// library.  Each one is multiplied by a per-call scale factor
/// max(1, ||.||_F) before use, so the defaults behave identically for
/// pencils of any magnitude.
struct ToleranceConfig {
  double sym_tol = 1e-10;    ///< accepted symmetry defect on input matrices
  double eig_tol = 1e-9;     ///< eigendecomposition residual / orthogonality
  double psd_tol = 1e-8;     ///< sign threshold for (semi)definiteness
  double rank_tol = 1e-9;    ///< singular/eigen values below this count as 0
  double root_tol = 1e-8;    ///< accepted residual at located roots
  double width_tol = 1e-7;   ///< interval width below which we collapse to a singleton

  void validate() const {
    if (!(sym_tol > 0 && eig_tol > 0 && psd_tol > 0 && rank_tol > 0 &&
          root_tol > 0 && width_tol > 0)) {
      throw Error("ToleranceConfig: all tolerances must be strictly positive");
    }
  }
};

}  // namespace pencilqp
