#ifndef PICKFORGE_JSON_IO_HPP
#define PICKFORGE_JSON_IO_HPP

#include <json.hpp>

#include "pickforge/boundary.hpp"

namespace pickforge {

using Json = nlohmann::ordered_json;

inline Json complex_to_json(Complex z) {
  return Json::array({z.real(), z.imag()});
}

inline Complex json_to_complex(const Json& j) {
  if (!j.is_array() || j.size() != 2)
    throw Error("json: complex values are [re, im] pairs");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(complex_to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline ComplexMatrix json_to_matrix(const Json& j) {
  if (!j.is_array()) throw Error("json: matrix must be an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return ComplexMatrix(0, 0);
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols)
      throw Error("json: ragged matrix rows");
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = json_to_complex(j[i][k]);
  }
  return m;
}

inline Json realization_to_json(const Realization& r) {
  Json j;
  j["A"] = matrix_to_json(r.A);
  j["B"] = matrix_to_json(r.B);
  j["C"] = matrix_to_json(r.C);
  j["D"] = matrix_to_json(r.D);
  return j;
}

inline Realization json_to_realization(const Json& j) {
  for (const char* key : {"A", "B", "C", "D"})
    if (!j.contains(key))
      throw Error(std::string("json: realization missing block ") + key);
  ComplexMatrix a = json_to_matrix(j["A"]);
  ComplexMatrix d = json_to_matrix(j["D"]);
  // empty blocks of a constant function serialize as [] with no way to
  // carry the off-dimensions, so rebuild them from D
  if (a.rows() == 0) return Realization::constant(d);
  return Realization(a, json_to_matrix(j["B"]), json_to_matrix(j["C"]), d);
}

inline Json data_to_json(const InterpolationData& d) {
  Json j;
  j["T"] = matrix_to_json(d.T);
  j["E"] = matrix_to_json(d.E);
  j["N"] = matrix_to_json(d.N);
  return j;
}

/// Accepts either the full {T, E, N} block or the Nevanlinna-Pick
/// shorthand {points, E_vectors, N_vectors} expanding to diagonal T.
inline InterpolationData json_to_data(const Json& j) {
  if (j.contains("points")) {
    std::vector<Complex> pts;
    for (const auto& p : j["points"]) pts.push_back(json_to_complex(p));
    for (Complex z : pts)
      if (std::abs(z) >= 1.0)
        throw Error("json: interpolation points must satisfy |z| < 1");
    return InterpolationData::np_points(pts, json_to_matrix(j["E_vectors"]),
                                        json_to_matrix(j["N_vectors"]));
  }
  if (!(j.contains("T") && j.contains("E") && j.contains("N")))
    throw Error("json: data needs either {T,E,N} or {points,E_vectors,"
                "N_vectors}");
  return InterpolationData(json_to_matrix(j["T"]), json_to_matrix(j["E"]),
                           json_to_matrix(j["N"]));
}

inline ToleranceConfig json_to_tolerances(const Json& j,
                                          ToleranceConfig base = {}) {
  if (j.contains("psd_tol")) base.psd_tol = j["psd_tol"].get<double>();
  if (j.contains("residual_tol"))
    base.residual_tol = j["residual_tol"].get<double>();
  if (j.contains("truncation_tol"))
    base.truncation_tol = j["truncation_tol"].get<double>();
  if (j.contains("grid_boundary_points"))
    base.grid_boundary_points = j["grid_boundary_points"].get<int>();
  if (j.contains("grid_interior_points"))
    base.grid_interior_points = j["grid_interior_points"].get<int>();
  return base;
}

inline KernelCombination json_to_kernel_combination(const Json& j) {
  KernelCombination h;
  h.base = json_to_realization(j["param_realization"]);
  for (const auto& p : j["points"]) h.points.push_back(json_to_complex(p));
  for (const auto& c : j["coefficients"]) {
    ComplexMatrix col = json_to_matrix(c);
    h.coeffs.push_back(ComplexVector(col.col(0)));
  }
  if (h.points.size() != h.coeffs.size())
    throw Error("json: kernel combination points/coefficients mismatch");
  return h;
}

inline HSProblemData json_to_hs_problem(const Json& j) {
  HSProblemData prob;
  prob.S = json_to_realization(j["S"]);
  prob.data = json_to_data(j["data"]);
  prob.y = json_to_matrix(j["y"]);
  if (j.contains("P"))
    prob.P = json_to_matrix(j["P"]);
  else
    prob.P = build_pick(prob.data, PickStrategy::Stein).P;
  if (j.contains("generating_param"))
    prob.generating_param = json_to_realization(j["generating_param"]);
  return prob;
}

}  // namespace pickforge

#endif
