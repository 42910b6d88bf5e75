// Command-line front end: every library operation behind a subcommand,
// JSON in, JSON out, scriptable exit codes.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "pencilqp/pencilqp.hpp"

namespace {

using pencilqp::io::json;

struct CommonOpts {
  double tol = -1.0;  // <0 means "not set"
  bool as_json = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--tol", opts.tol,
                  "override root_tol and psd_tol jointly")
      ->envname("PENCILQP_TOL");
  cmd->add_flag("--json", opts.as_json, "machine-readable JSON output");
}

pencilqp::ToleranceConfig make_config(const CommonOpts& opts) {
  pencilqp::ToleranceConfig cfg;
  if (opts.tol > 0.0) {
    cfg.root_tol = opts.tol;
    cfg.psd_tol = opts.tol;
  }
  cfg.validate();
  return cfg;
}

void emit(const json& j, const CommonOpts& opts,
          const std::string& human_summary) {
  if (opts.as_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << human_summary << "\n";
  }
}

std::string interval_summary(const pencilqp::PositivityInterval& iv) {
  using pencilqp::IntervalKind;
  switch (iv.kind) {
    case IntervalKind::Empty:
      return "I>=(A,B) is empty";
    case IntervalKind::Singleton:
      return "I>=(A,B) = {" + std::to_string(iv.lambda_minus) + "}";
    case IntervalKind::Interval:
      return "I>=(A,B) = [" + std::to_string(iv.lambda_minus) + ", " +
             std::to_string(iv.lambda_plus) + "]" +
             (iv.strict_nonempty ? " with nonempty interior" : "");
  }
  return "?";
}

int run_interval(const std::string& a_path, const std::string& b_path,
                 const CommonOpts& opts) {
  const auto cfg = make_config(opts);
  pencilqp::Pencil p(pencilqp::io::load_sym_matrix(a_path, cfg),
                     pencilqp::io::load_sym_matrix(b_path, cfg));
  const auto iv = pencilqp::positivity_interval(p, cfg);
  emit(pencilqp::io::interval_to_json(iv), opts, interval_summary(iv));
  return iv.kind == pencilqp::IntervalKind::Empty ? 2 : 0;
}

int run_solve(const std::string& path, const CommonOpts& opts,
              int grid_points) {
  const auto cfg = make_config(opts);
  const auto loaded = pencilqp::io::load_problem(path, cfg);

  if (loaded.qp.has_value()) {
    const auto result = pencilqp::solve_qp1eqc(*loaded.qp, cfg, grid_points);
    json out = json::array();
    for (const auto& s : result.solutions) {
      out.push_back(pencilqp::io::solution_to_json(s));
    }
    std::string summary;
    if (result.status == pencilqp::SolveStatus::NoPSDMultiplier) {
      summary = "no PSD multiplier: " + result.diagnostic;
    } else if (result.solutions.empty()) {
      summary = "no candidates: " + result.diagnostic;
    } else {
      summary = std::to_string(result.solutions.size()) +
                " candidate(s); best objective " +
                std::to_string(result.solutions.front().objective);
    }
    emit(out, opts, summary);
    if (result.status == pencilqp::SolveStatus::NoPSDMultiplier) return 2;
    return result.has_global_min() ? 0 : 3;
  }

  if (loaded.reg.has_value() && loaded.rho.has_value()) {
    const auto s = pencilqp::solve_regularized(*loaded.reg, *loaded.rho, cfg);
    emit(json::array({pencilqp::io::solution_to_json(s)}), opts,
         "regularized solution with objective " + std::to_string(s.objective));
    return s.certificate == pencilqp::Certificate::GlobalMin ? 0 : 3;
  }
  throw pencilqp::ParseError(
      "solve needs a QP1EQC-form file, or a regularization-form file with "
      "'rho'");
}

int run_classify(const std::string& path, const CommonOpts& opts,
                 int rho_samples) {
  const auto cfg = make_config(opts);
  const auto loaded = pencilqp::io::load_problem(path, cfg);
  if (!loaded.reg.has_value()) {
    throw pencilqp::ParseError("classify needs a regularization-form file");
  }
  const auto& prob = *loaded.reg;
  const auto adm = pencilqp::admissible_interval(prob, cfg);

  json out;
  out["admissible_interval"] = pencilqp::io::interval_to_json(adm.interval);
  out["t_normal_indefinite"] = adm.t_normal_indefinite;
  out["interior"] = json::array();
  out["endpoints"] = json::array();

  const auto classify_at = [&](double rho) -> json {
    json entry;
    entry["rho"] = rho;
    try {
      const auto c = pencilqp::classify_range_of_L(prob, rho, cfg);
      entry.update(pencilqp::io::classification_to_json(c));
    } catch (const pencilqp::Error& e) {
      entry["error"] = e.what();
    }
    return entry;
  };

  bool consistent = true;
  if (adm.interval.kind == pencilqp::IntervalKind::Interval) {
    const double lo = adm.interval.lambda_minus;
    const double width = adm.interval.width();
    json first;
    for (int i = 0; i < rho_samples; ++i) {
      const double rho = lo + width * (i + 1.0) / (rho_samples + 1.0);
      json entry = classify_at(rho);
      out["interior"].push_back(entry);
      if (i == 0) {
        first = entry;
      } else if (entry.value("nondegenerate", false) !=
                     first.value("nondegenerate", false) ||
                 entry.value("regular", false) != first.value("regular", false)) {
        consistent = false;
      }
    }
  }
  if (adm.interval.kind != pencilqp::IntervalKind::Empty) {
    out["endpoints"].push_back(classify_at(adm.interval.lambda_minus));
    if (adm.interval.kind == pencilqp::IntervalKind::Interval) {
      out["endpoints"].push_back(classify_at(adm.interval.lambda_plus));
    }
  }
  out["interior_consistent"] = consistent;

  std::string summary = interval_summary(adm.interval);
  if (!out["interior"].empty() && out["interior"][0].contains("regular")) {
    summary += out["interior"][0]["regular"].get<bool>()
                   ? "; interior: regular"
                   : "; interior: not regular";
  }
  if (!consistent) summary += "; INTERIOR CLASSIFICATION DISAGREES";
  emit(out, opts, summary);
  return consistent ? 0 : 4;
}

int run_reduce(const std::string& a_path, const std::string& b_path,
               double rho, const CommonOpts& opts) {
  const auto cfg = make_config(opts);
  pencilqp::Pencil p(pencilqp::io::load_sym_matrix(a_path, cfg),
                     pencilqp::io::load_sym_matrix(b_path, cfg));
  const auto red = pencilqp::congruence_reduction(p, rho, cfg);
  const auto iv = pencilqp::positivity_interval(p, cfg);
  const auto shifted = red.shifted_interval();
  const double tol = cfg.root_tol * p.scale();
  const bool verified =
      iv.kind != pencilqp::IntervalKind::Empty &&
      std::abs(shifted.lambda_minus - iv.lambda_minus) <= tol &&
      std::abs(shifted.lambda_plus - iv.lambda_plus) <= tol;

  json out;
  out["G"] = pencilqp::io::matrix_to_json(red.G.mat());
  out["interval_of_ig"] = pencilqp::io::interval_to_json(red.interval_of_ig);
  out["shifted_interval"] = pencilqp::io::interval_to_json(shifted);
  out["pencil_interval"] = pencilqp::io::interval_to_json(iv);
  out["shift_identity_verified"] = verified;
  emit(out, opts,
       "reduced at rho=" + std::to_string(rho) + "; shifted interval " +
           interval_summary(shifted) +
           (verified ? " (shift identity verified)" : " (MISMATCH)"));
  return verified ? 0 : 4;
}

int run_diag(const std::string& a_path, const std::string& b_path,
             double lambda, const CommonOpts& opts) {
  const auto cfg = make_config(opts);
  pencilqp::Pencil p(pencilqp::io::load_sym_matrix(a_path, cfg),
                     pencilqp::io::load_sym_matrix(b_path, cfg));
  const auto sd = pencilqp::simultaneous_diagonalization(p, lambda, cfg);
  const Eigen::MatrixXd sas = sd.S.mat() * p.A.mat() * sd.S.mat();
  const Eigen::VectorXd expected =
      Eigen::VectorXd::Ones(sd.d.size()) - lambda * sd.d;
  const double residual =
      (sd.U.transpose() * sas * sd.U - Eigen::MatrixXd(expected.asDiagonal()))
          .norm();
  const bool verified =
      residual <= 10.0 * cfg.eig_tol * std::max(1.0, sas.norm());

  json out;
  out["S"] = pencilqp::io::matrix_to_json(sd.S.mat());
  out["d"] = pencilqp::io::vector_to_json(sd.d);
  out["identity_residual"] = residual;
  out["verified"] = verified;
  emit(out, opts,
       "diagonalized at lambda=" + std::to_string(lambda) +
           "; identity residual " + std::to_string(residual) +
           (verified ? " (verified)" : " (MISMATCH)"));
  return verified ? 0 : 4;
}

int run_oracle(const std::string& a_path, const std::string& b_path,
               const CommonOpts& opts, const pencilqp::oracle::OracleConfig& ocfg) {
  const auto cfg = make_config(opts);
  pencilqp::Pencil p(pencilqp::io::load_sym_matrix(a_path, cfg),
                     pencilqp::io::load_sym_matrix(b_path, cfg));
  const auto iv = pencilqp::oracle::grid_interval(p, ocfg, cfg);
  const auto [mu_plus, mu_minus] =
      pencilqp::oracle::rayleigh_estimates(p, ocfg, cfg);

  json out;
  out["interval"] = pencilqp::io::interval_to_json(iv);
  out["rayleigh"] = json{{"mu_plus_est", mu_plus}, {"mu_minus_est", mu_minus}};
  bool sandwich = true;
  if (iv.kind != pencilqp::IntervalKind::Empty) {
    sandwich = -mu_plus <= iv.lambda_minus && iv.lambda_plus <= -mu_minus;
  }
  out["sandwich_ok"] = sandwich;
  emit(out, opts,
       "oracle " + interval_summary(iv) + "; mu+ est " +
           std::to_string(mu_plus) + ", mu- est " + std::to_string(mu_minus));
  return iv.kind == pencilqp::IntervalKind::Empty ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"positivity intervals of symmetric pencils and QP1EQC solving"};
  app.require_subcommand(1);

  std::string a_path, b_path, problem_path;
  double rho = 0.0, lambda = 0.0;
  int grid_points = 256;
  int rho_samples = 5;
  pencilqp::oracle::OracleConfig ocfg;
  CommonOpts opt_interval, opt_solve, opt_classify, opt_reduce, opt_diag,
      opt_oracle;

  auto* c_interval =
      app.add_subcommand("interval", "compute I>=(A,B) for a pencil");
  c_interval->add_option("A", a_path, "matrix file for A")->required();
  c_interval->add_option("B", b_path, "matrix file for B")->required();
  add_common(c_interval, opt_interval);

  auto* c_solve = app.add_subcommand("solve", "solve a QP1EQC problem file");
  c_solve->add_option("problem", problem_path, "problem file")->required();
  c_solve->add_option("--grid", grid_points,
                      "interior grid points for the multiplier search");
  add_common(c_solve, opt_solve);

  auto* c_classify = app.add_subcommand(
      "classify", "classify R(L) over the admissible interval");
  c_classify->add_option("problem", problem_path, "regularization-form file")
      ->required();
  c_classify->add_option("--rho-samples", rho_samples,
                         "number of interior samples");
  add_common(c_classify, opt_classify);

  auto* c_reduce =
      app.add_subcommand("reduce", "congruence reduction to I + eta G");
  c_reduce->add_option("A", a_path, "matrix file for A")->required();
  c_reduce->add_option("B", b_path, "matrix file for B")->required();
  c_reduce->add_option("--rho", rho, "interior evaluation point")->required();
  add_common(c_reduce, opt_reduce);

  auto* c_diag = app.add_subcommand(
      "diag", "simultaneous diagonalization by congruence");
  c_diag->add_option("A", a_path, "matrix file for A")->required();
  c_diag->add_option("B", b_path, "matrix file for B")->required();
  c_diag->add_option("--lambda", lambda, "interior evaluation point")
      ->required();
  add_common(c_diag, opt_diag);

  auto* c_oracle = app.add_subcommand(
      "oracle", "independent grid oracle and Rayleigh estimates");
  c_oracle->add_option("A", a_path, "matrix file for A")->required();
  c_oracle->add_option("B", b_path, "matrix file for B")->required();
  c_oracle->add_option("--seed", ocfg.seed, "sampling seed");
  c_oracle->add_option("--grid-points", ocfg.grid_points, "oracle grid size");
  c_oracle->add_option("--refine-iters", ocfg.refine_iters,
                       "bisection refinement iterations");
  c_oracle->add_option("--samples", ocfg.samples, "Rayleigh sample count");
  add_common(c_oracle, opt_oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (c_interval->parsed()) return run_interval(a_path, b_path, opt_interval);
    if (c_solve->parsed()) return run_solve(problem_path, opt_solve, grid_points);
    if (c_classify->parsed())
      return run_classify(problem_path, opt_classify, rho_samples);
    if (c_reduce->parsed()) return run_reduce(a_path, b_path, rho, opt_reduce);
    if (c_diag->parsed()) return run_diag(a_path, b_path, lambda, opt_diag);
    if (c_oracle->parsed()) return run_oracle(a_path, b_path, opt_oracle, ocfg);
  } catch (const pencilqp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
