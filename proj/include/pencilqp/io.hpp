#pragma once

#include <json.hpp>

#include <Eigen/Dense>
#include <fstream>
#include <optional>
#include <string>

#include "pencilqp/errors.hpp"
#include "pencilqp/krein.hpp"
#include "pencilqp/pencil.hpp"
#include "pencilqp/qp1eqc.hpp"
#include "pencilqp/spectral.hpp"

namespace pencilqp::io {

using nlohmann::json;

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("matrix_to_json: only square matrices are stored");
  }
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      data.push_back(m(i, j));
    }
  }
  return json{{"n", m.rows()}, {"data", std::move(data)}};
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("data")) {
    throw ParseError("matrix: expected an object with fields 'n' and 'data'");
  }
  const auto n = j.at("n").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (n <= 0 || !data.is_array() ||
      data.size() != static_cast<std::size_t>(n * n)) {
    throw ParseError("matrix: 'data' must hold exactly n*n numbers");
  }
  Eigen::MatrixXd m(n, n);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j2 = 0; j2 < n; ++j2) {
      m(i, j2) = data.at(k++).get<double>();
    }
  }
  return m;
}

/// Loads a matrix that must be symmetric; symmetry failure is a hard
/// error, not a silent symmetrization.
inline SymMatrix sym_matrix_from_json(const json& j,
                                      const ToleranceConfig& cfg = {}) {
  return SymMatrix(matrix_from_json(j), cfg.sym_tol);
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("vector: expected a flat array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  }
  return v;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("cannot parse " + path + ": " + e.what());
  }
  return j;
}

inline void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

inline SymMatrix load_sym_matrix(const std::string& path,
                                 const ToleranceConfig& cfg = {}) {
  return sym_matrix_from_json(load_json_file(path), cfg);
}

/// A problem file holds either the direct QP1EQC data {A, B, w0, z0} or
/// the regularization data {T, V, J_K, J_E, w0, z0, rho?}.
struct LoadedProblem {
  std::optional<QP1EQCProblem> qp;
  std::optional<RegularizationProblem> reg;
  std::optional<double> rho;
};

inline LoadedProblem problem_from_json(const json& j,
                                       const ToleranceConfig& cfg = {}) {
  if (!j.is_object()) throw ParseError("problem: expected a JSON object");
  LoadedProblem out;
  try {
    if (j.contains("A") && j.contains("B")) {
      out.qp.emplace(sym_matrix_from_json(j.at("A"), cfg),
                     sym_matrix_from_json(j.at("B"), cfg),
                     vector_from_json(j.at("w0")),
                     vector_from_json(j.at("z0")));
    } else if (j.contains("T") && j.contains("V")) {
      out.reg.emplace(matrix_from_json(j.at("T")),
                      matrix_from_json(j.at("V")),
                      KreinSpace(matrix_from_json(j.at("J_K")), cfg),
                      KreinSpace(matrix_from_json(j.at("J_E")), cfg),
                      vector_from_json(j.at("w0")),
                      vector_from_json(j.at("z0")));
    } else {
      throw ParseError(
          "problem: need either fields A,B,w0,z0 or T,V,J_K,J_E,w0,z0");
    }
    if (j.contains("rho")) out.rho = j.at("rho").get<double>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("problem: ") + e.what());
  }
  return out;
}

inline LoadedProblem load_problem(const std::string& path,
                                  const ToleranceConfig& cfg = {}) {
  return problem_from_json(load_json_file(path), cfg);
}

inline json interval_to_json(const PositivityInterval& iv) {
  json j;
  j["kind"] = to_string(iv.kind);
  if (iv.kind == IntervalKind::Empty) {
    j["lambda_minus"] = nullptr;
    j["lambda_plus"] = nullptr;
  } else {
    j["lambda_minus"] = iv.lambda_minus;
    j["lambda_plus"] = iv.lambda_plus;
  }
  j["strict_nonempty"] = iv.strict_nonempty;
  return j;
}

inline json solution_to_json(const QPSolution& s) {
  return json{{"x", vector_to_json(s.x)},
              {"lambda", s.lambda},
              {"objective", s.objective},
              {"residual_stationarity", s.residual_stationarity},
              {"residual_feasibility", s.residual_feasibility},
              {"certificate", to_string(s.certificate)},
              {"endpoint_case", s.endpoint_case}};
}

inline json classification_to_json(const SubspaceClassification& c) {
  return json{{"isotropic_dim", c.isotropic_dim},
              {"nondegenerate", c.nondegenerate},
              {"regular", c.regular},
              {"nonnegative", c.nonnegative},
              {"uniformly_positive", c.uniformly_positive},
              {"corollary_checks_applied", c.corollary_checks_applied},
              {"note", c.note}};
}

}  // namespace pencilqp::io
