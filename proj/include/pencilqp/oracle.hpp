#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "pencilqp/errors.hpp"
#include "pencilqp/krein.hpp"
#include "pencilqp/pencil.hpp"
#include "pencilqp/qp1eqc.hpp"
#include "pencilqp/spectral.hpp"
#include "pencilqp/tolerances.hpp"

namespace pencilqp::oracle {

/// Knobs for the brute-force verification paths.  Identical seeds produce
/// bit-identical outputs.
struct OracleConfig {
  int grid_points = 4096;
  int refine_iters = 60;
  int samples = 10000;
  std::uint64_t seed = 42;

  void validate() const {
    if (grid_points <= 1 || refine_iters <= 0 || samples <= 0) {
      throw Error("OracleConfig: all counts must be positive");
    }
  }
};

namespace detail {

inline Eigen::VectorXd gaussian_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

inline Eigen::MatrixXd random_orthogonal(Eigen::Index n,
                                         std::mt19937_64& rng) {
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) g.col(j) = gaussian_vector(n, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

inline void require_indefinite(const SymMatrix& B, const ToleranceConfig& cfg) {
  const Eigen::VectorXd w = eigenvalues_only(B);
  const double tol = cfg.psd_tol * B.scale();
  if (!(w(0) < -tol && w(w.size() - 1) > tol)) {
    throw BNotIndefinite("oracle: B is not indefinite");
  }
}

}  // namespace detail

/// Independent interval oracle: PSD-tests A + lambda*B on a geometric
/// sweep followed by a uniform grid and bisects the outermost sign changes
/// of the minimum eigenvalue.  Shares only the eigensolver with the
/// analytic path in pencil.hpp.
inline PositivityInterval grid_interval(const Pencil& p,
                                        const OracleConfig& ocfg = {},
                                        const ToleranceConfig& cfg = {}) {
  ocfg.validate();
  detail::require_indefinite(p.B, cfg);
  const double scale = p.scale();
  const double level = -cfg.psd_tol * scale;
  const auto g = [&](double lambda) { return min_eig_at(p, lambda); };

  // Geometric sweep to find the neighborhood of the maximum.
  const double unit = 1.0 + p.A.norm();
  double best_lambda = 0.0;
  double best_val = g(0.0);
  for (int k = 0; k < 26; ++k) {
    for (double sgn : {+1.0, -1.0}) {
      const double lam = sgn * unit * std::pow(3.0, k);
      const double val = g(lam);
      if (val > best_val) {
        best_val = val;
        best_lambda = lam;
      }
    }
  }

  // Uniform grid around the sweep maximizer; the true maximizer lies
  // between the geometric neighbors of best_lambda.
  const double span = 3.0 * std::max(unit, std::abs(best_lambda));
  const double lo = best_lambda - span;
  const double hi = best_lambda + span;
  const int n = ocfg.grid_points;
  const double step = (hi - lo) / (n - 1);
  std::vector<double> vals(static_cast<std::size_t>(n));
  int first_in = -1, last_in = -1;
  int arg_best = 0;
  for (int i = 0; i < n; ++i) {
    vals[static_cast<std::size_t>(i)] = g(lo + i * step);
    if (vals[static_cast<std::size_t>(i)] >
        vals[static_cast<std::size_t>(arg_best)]) {
      arg_best = i;
    }
    if (vals[static_cast<std::size_t>(i)] >= level) {
      if (first_in < 0) first_in = i;
      last_in = i;
    }
  }

  double inner_lo, inner_hi;
  if (first_in >= 0) {
    inner_lo = lo + first_in * step;
    inner_hi = lo + last_in * step;
  } else {
    // The PSD set may sit between grid points; refine around the best
    // grid value before giving up.
    double a = lo + std::max(0, arg_best - 1) * step;
    double b = lo + std::min(n - 1, arg_best + 1) * step;
    for (int it = 0; it < ocfg.refine_iters; ++it) {
      const double m1 = a + (b - a) / 3.0;
      const double m2 = b - (b - a) / 3.0;
      if (g(m1) < g(m2)) {
        a = m1;
      } else {
        b = m2;
      }
    }
    const double peak = 0.5 * (a + b);
    if (g(peak) < level) {
      return PositivityInterval{};  // Empty
    }
    inner_lo = inner_hi = peak;
  }

  const auto bisect = [&](double inside, double outside) {
    for (int it = 0; it < ocfg.refine_iters; ++it) {
      const double m = 0.5 * (inside + outside);
      (g(m) >= level ? inside : outside) = m;
    }
    return inside;
  };

  // Expand outward when the grid border is still inside (the bracket is
  // generous, so this is only a guard).
  double out_lo = inner_lo - step, out_hi = inner_hi + step;
  int guard = 0;
  while (g(out_lo) >= level && ++guard < 80) out_lo -= (inner_lo - out_lo) * 2.0;
  guard = 0;
  while (g(out_hi) >= level && ++guard < 80) out_hi += (out_hi - inner_hi) * 2.0;

  const double lambda_minus = bisect(inner_lo, out_lo);
  const double lambda_plus = bisect(inner_hi, out_hi);

  PositivityInterval iv;
  if (lambda_plus - lambda_minus <= cfg.width_tol * scale) {
    iv.kind = IntervalKind::Singleton;
    iv.lambda_minus = iv.lambda_plus = 0.5 * (lambda_minus + lambda_plus);
    iv.strict_nonempty = false;
  } else {
    iv.kind = IntervalKind::Interval;
    iv.lambda_minus = lambda_minus;
    iv.lambda_plus = lambda_plus;
    iv.strict_nonempty = g(iv.midpoint()) > cfg.psd_tol * scale;
  }
  return iv;
}

/// Monte-Carlo estimates of mu+ = inf{<Az,z> : <Bz,z>=1} and
/// mu- = sup{<Ay,y> : <By,y>=-1}.  One-sided by construction:
/// the returned pair satisfies first >= mu+ and second <= mu-.
inline std::pair<double, double> rayleigh_estimates(
    const Pencil& p, const OracleConfig& ocfg = {},
    const ToleranceConfig& cfg = {}) {
  ocfg.validate();
  detail::require_indefinite(p.B, cfg);
  std::mt19937_64 rng(ocfg.seed);
  const double floor = 1e-14 * p.scale();
  double mu_plus = std::numeric_limits<double>::infinity();
  double mu_minus = -std::numeric_limits<double>::infinity();
  bool hit_pos = false, hit_neg = false;
  for (int i = 0; i < ocfg.samples; ++i) {
    Eigen::VectorXd z = detail::gaussian_vector(p.dim(), rng).normalized();
    const double b = p.B.quad(z);
    if (std::abs(b) <= floor) continue;
    const double ratio = p.A.quad(z) / b;
    if (b > 0.0) {
      hit_pos = true;
      mu_plus = std::min(mu_plus, ratio);
    } else {
      hit_neg = true;
      mu_minus = std::max(mu_minus, ratio);
    }
  }
  if (!hit_pos || !hit_neg) {
    throw NoSamplesOnSide(
        "rayleigh_estimates: sampling never hit one sign of <Bz,z>");
  }
  return {mu_plus, mu_minus};
}

/// Exactly neutral unit vectors for the form of B, built by combining a
/// positive-eigenvalue mix u (<Bu,u> = p > 0) with a negative one v
/// (<Bv,v> = q < 0) as u/sqrt(p) + v/sqrt(-q); the two pieces are
/// B-orthogonal, so the combination is neutral up to rounding.
inline std::vector<Eigen::VectorXd> sample_neutral(const SymMatrix& B,
                                                   int count,
                                                   std::uint64_t seed,
                                                   const ToleranceConfig& cfg = {}) {
  detail::require_indefinite(B, cfg);
  EigenDecomp ed = eig(B);
  const double tol = cfg.rank_tol * B.scale();
  std::vector<Eigen::Index> pos, neg;
  for (Eigen::Index i = 0; i < ed.values.size(); ++i) {
    if (ed.values(i) > tol) pos.push_back(i);
    if (ed.values(i) < -tol) neg.push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(B.dim());
    Eigen::VectorXd cp =
        detail::gaussian_vector(static_cast<Eigen::Index>(pos.size()), rng)
            .normalized();
    double p = 0.0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      u += cp(static_cast<Eigen::Index>(i)) * ed.vectors.col(pos[i]);
      p += ed.values(pos[i]) * cp(static_cast<Eigen::Index>(i)) *
           cp(static_cast<Eigen::Index>(i));
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(B.dim());
    Eigen::VectorXd cn =
        detail::gaussian_vector(static_cast<Eigen::Index>(neg.size()), rng)
            .normalized();
    double q = 0.0;
    for (std::size_t i = 0; i < neg.size(); ++i) {
      v += cn(static_cast<Eigen::Index>(i)) * ed.vectors.col(neg[i]);
      q += ed.values(neg[i]) * cn(static_cast<Eigen::Index>(i)) *
           cn(static_cast<Eigen::Index>(i));
    }
    out.push_back((u / std::sqrt(p) + v / std::sqrt(-q)).normalized());
  }
  return out;
}

/// Feasible points of <B(x - z0), x - z0> = 0, sampled as z0 + r q with q
/// neutral and r a random radius; this parametrizes the whole feasible
/// set.
inline std::vector<Eigen::VectorXd> sample_feasible(const QP1EQCProblem& prob,
                                                    int count,
                                                    std::uint64_t seed,
                                                    const ToleranceConfig& cfg = {}) {
  std::vector<Eigen::VectorXd> neutral =
      sample_neutral(prob.B, count, seed, cfg);
  std::mt19937_64 rng(seed ^ 0x5bf0'3635'dcf8'2ca7ull);
  const double radius =
      3.0 * std::max({1.0, prob.w0.norm(), prob.z0.norm()});
  std::uniform_real_distribution<double> uni(0.0, radius);
  std::vector<Eigen::VectorXd> out;
  out.reserve(neutral.size());
  for (const auto& q : neutral) {
    out.push_back(prob.z0 + uni(rng) * q);
  }
  return out;
}

/// Deterministic random pencil with a guaranteed nonempty positivity
/// interval: A = M - lambda0 * B with M positive semidefinite, so that
/// lambda0 lies inside the interval.  An optional shared kernel of the
/// requested dimension is planted by zero-padding and rotating.
struct GeneratedPencil {
  Pencil pencil;
  double interior_lambda;  // the planted lambda0
};

inline GeneratedPencil make_random_pencil(Eigen::Index n, std::uint64_t seed,
                                          Eigen::Index joint_kernel_dim = 0) {
  if (n - joint_kernel_dim < 2) {
    throw Error("make_random_pencil: need at least 2 active dimensions");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::uniform_real_distribution<double> pd_mag(0.3, 3.0);
  std::uniform_real_distribution<double> shift(-3.0, 3.0);

  const Eigen::Index m = n - joint_kernel_dim;
  Eigen::VectorXd b_vals(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    b_vals(i) = (i < (m + 1) / 2 ? 1.0 : -1.0) * mag(rng);
  }
  const Eigen::MatrixXd qb = detail::random_orthogonal(m, rng);
  const Eigen::MatrixXd b_small =
      qb * b_vals.asDiagonal() * qb.transpose();

  Eigen::VectorXd m_vals(m);
  for (Eigen::Index i = 0; i < m; ++i) m_vals(i) = pd_mag(rng);
  const Eigen::MatrixXd qm = detail::random_orthogonal(m, rng);
  const Eigen::MatrixXd psd_small =
      qm * m_vals.asDiagonal() * qm.transpose();

  const double lambda0 = shift(rng);
  const Eigen::MatrixXd a_small = psd_small - lambda0 * b_small;

  Eigen::MatrixXd a_full = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd b_full = Eigen::MatrixXd::Zero(n, n);
  a_full.topLeftCorner(m, m) = a_small;
  b_full.topLeftCorner(m, m) = b_small;
  if (joint_kernel_dim > 0) {
    const Eigen::MatrixXd rot = detail::random_orthogonal(n, rng);
    a_full = (rot * a_full * rot.transpose()).eval();
    b_full = (rot * b_full * rot.transpose()).eval();
  }
  return GeneratedPencil{
      Pencil(SymMatrix(a_full, 1e-8), SymMatrix(b_full, 1e-8)), lambda0};
}

/// Deterministic regularization problem whose admissible interval is a
/// nonempty open interval: factor a generated pencil (A, B) with A
/// indefinite and B invertible as A = T^T J_K T, B = V^T J_E V.  A planted
/// joint kernel is padded into the factors directly so the kernel stays
/// exact instead of picking up square-root rounding noise.
inline RegularizationProblem make_random_regularization(
    Eigen::Index n, std::uint64_t seed, Eigen::Index joint_kernel_dim = 0) {
  const Eigen::Index m = n - joint_kernel_dim;
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    GeneratedPencil gen = make_random_pencil(m, seed + 0x9e3779b9ull * attempt);
    EigenDecomp ad = eig(gen.pencil.A);
    const double margin = 0.05 * gen.pencil.A.scale();
    if (!(ad.values(0) < -margin && ad.values(ad.values.size() - 1) > margin)) {
      continue;  // need T#T indefinite
    }

    const auto factor = [](const EigenDecomp& ed) {
      const Eigen::Index k = ed.values.size();
      Eigen::VectorXd signs(k), roots(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        signs(i) = ed.values(i) < 0.0 ? -1.0 : 1.0;
        roots(i) = std::sqrt(std::abs(ed.values(i)));
      }
      const Eigen::MatrixXd op = roots.asDiagonal() * ed.vectors.transpose();
      return std::make_pair(op, Eigen::MatrixXd(signs.asDiagonal()));
    };
    auto [t_small, jk_small] = factor(ad);
    auto [v_small, je_small] = factor(eig(gen.pencil.B));

    const auto pad = [&](const Eigen::MatrixXd& op, const Eigen::MatrixXd& j) {
      Eigen::MatrixXd op_full = Eigen::MatrixXd::Zero(n, n);
      op_full.topLeftCorner(m, m) = op;
      Eigen::MatrixXd j_full = Eigen::MatrixXd::Identity(n, n);
      j_full.topLeftCorner(m, m) = j;
      return std::make_pair(op_full, j_full);
    };
    auto [t_op, jk] = pad(t_small, jk_small);
    auto [v_op, je] = pad(v_small, je_small);

    std::mt19937_64 rng(seed ^ 0xd1b5'4a32'd192'ed03ull);
    if (joint_kernel_dim > 0) {
      const Eigen::MatrixXd rot = detail::random_orthogonal(n, rng);
      t_op = (t_op * rot.transpose()).eval();
      v_op = (v_op * rot.transpose()).eval();
    }
    return RegularizationProblem(
        t_op, v_op, KreinSpace(jk), KreinSpace(je),
        detail::gaussian_vector(n, rng), detail::gaussian_vector(n, rng));
  }
  throw Error("make_random_regularization: could not build an indefinite T#T");
}

}  // namespace pencilqp::oracle
