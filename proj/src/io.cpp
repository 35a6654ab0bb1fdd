#include "normal_approx/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace normal_approx::io {
namespace {

double finite_number(const json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ParseError(std::string(what) + ": non-finite number");
  return x;
}

Eigen::Index positive_dimension(const json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("matrix: missing \"") + key + "\"");
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ParseError(std::string("matrix: \"") + key + "\" must be a positive integer");
  }
  return static_cast<Eigen::Index>(v.get<long long>());
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const ComplexMatrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(complex_to_json(m(i, j)));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("matrix: expected an object");
  const Eigen::Index rows = positive_dimension(j, "rows");
  const Eigen::Index cols = positive_dimension(j, "cols");
  if (!j.contains("data") || !j.at("data").is_array()) throw ParseError("matrix: missing \"data\" array");
  const json& data = j.at("data");
  if (data.size() != static_cast<std::size_t>(rows * cols)) {
    std::ostringstream os;
    os << "matrix: data has " << data.size() << " entries, expected " << rows * cols;
    throw ParseError(os.str());
  }
  ComplexMatrix m(rows, cols);
  std::size_t at = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c, ++at) {
      const json& e = data[at];
      if (!e.is_array() || e.size() != 2) throw ParseError("matrix: entries must be [re, im] pairs");
      m(i, c) = Complex(finite_number(e[0], "matrix entry"), finite_number(e[1], "matrix entry"));
    }
  }
  return m;
}

json family_to_json(std::span<const ComplexMatrix> members) {
  json arr = json::array();
  for (const auto& m : members) arr.push_back(matrix_to_json(m));
  return {{"members", std::move(arr)}};
}

std::vector<ComplexMatrix> members_from_json(const json& j) {
  if (!j.is_object() || !j.contains("members") || !j.at("members").is_array()) {
    throw ParseError("family: expected {\"members\": [...]}");
  }
  std::vector<ComplexMatrix> out;
  for (const auto& m : j.at("members")) out.push_back(matrix_from_json(m));
  if (out.empty()) throw ParseError("family: no members");
  return out;
}

json to_json(const SpreadResult& r) {
  return {{"spread", r.spread},
          {"theta_star", r.theta_star},
          {"witnesses", json::array({complex_to_json(r.witnesses[0]), complex_to_json(r.witnesses[1])})},
          {"grid_points", r.grid_points},
          {"width_at_theta", r.width_at_theta},
          {"grid_error_bound", r.grid_error_bound}};
}

json to_json(const SchurResult& r) {
  json triangulars = json::array();
  for (const auto& t : r.triangulars) triangulars.push_back(matrix_to_json(t));
  json lambdas = json::array();
  for (const auto& row : r.diag_lambdas) {
    json l = json::array();
    for (auto z : row) l.push_back(complex_to_json(z));
    lambdas.push_back(std::move(l));
  }
  return {{"unitary", matrix_to_json(r.unitary)},
          {"triangulars", std::move(triangulars)},
          {"diag_lambdas", std::move(lambdas)},
          {"residual", r.residual}};
}

json to_json(const BoundReport& r) {
  return {{"n", r.n},
          {"k", r.k},
          {"lhs_unnormalized", r.lhs_unnormalized},
          {"rhs_unnormalized", r.rhs_unnormalized},
          {"lhs_normalized", r.lhs_normalized},
          {"rhs_normalized", r.rhs_normalized},
          {"ratio", number_or_null(r.ratio)},
          {"ratio_infinite", r.ratio_infinite},
          {"spread", to_json(r.spread_diag)},
          {"schur_residual", r.schur_residual},
          {"inequality_holds", r.inequality_holds},
          {"certified", r.certified}};
}

json to_json(const NormalityReport& r) {
  return {{"normality_defects", r.normality_defects},
          {"gram_spread", r.gram_spread},
          {"scalar_estimate", complex_to_json(r.scalar_estimate)},
          {"tolerance", r.tolerance},
          {"verdict", r.verdict}};
}

json to_json(const SplitResult& r) {
  return {{"qn_basis", matrix_to_json(r.qn_basis)},
          {"n_basis", matrix_to_json(r.n_basis)},
          {"qn_dim", r.qn_dim()},
          {"n_dim", r.n_dim()},
          {"qn_levels", r.qn_levels},
          {"invariance_defect", r.invariance_defect},
          {"orthogonality_defect", r.orthogonality_defect},
          {"qn_spectral_radii", r.qn_spectral_radii},
          {"normality_defects_on_hn", r.normality_defects_on_hn}};
}

json to_json(const GeneratorSpec& spec) {
  return {{"kind", std::string(to_string(spec.kind))},
          {"n", spec.n},
          {"k", spec.k},
          {"seed", spec.seed},
          {"scale", spec.scale},
          {"n_qn", spec.n_qn},
          {"n_n", spec.n_n}};
}

GeneratorSpec generator_spec_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("generator spec: expected an object");
  GeneratorSpec spec;
  try {
    if (j.contains("kind")) spec.kind = generator_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("n")) spec.n = j.at("n").get<Eigen::Index>();
    if (j.contains("k")) spec.k = j.at("k").get<std::size_t>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("scale")) spec.scale = finite_number(j.at("scale"), "generator scale");
    if (j.contains("n_qn")) spec.n_qn = j.at("n_qn").get<Eigen::Index>();
    if (j.contains("n_n")) spec.n_n = j.at("n_n").get<Eigen::Index>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("generator spec: ") + e.what());
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("generator spec: ") + e.what());
  }
  if (spec.kind == GeneratorKind::nilpotent_plus_normal && !j.contains("n")) {
    spec.n = spec.n_qn + spec.n_n;
  }
  return spec;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

ComplexMatrix read_matrix_file(const std::filesystem::path& path) {
  return matrix_from_json(read_json_file(path));
}

std::vector<ComplexMatrix> read_family_file(const std::filesystem::path& path) {
  return members_from_json(read_json_file(path));
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace normal_approx::io
