#include "cone_lpv/io.hpp"

#include <cmath>
#include <fstream>
#include <optional>

#include "cone_lpv/errors.hpp"

namespace cone_lpv::io {

InputError::InputError(const std::string& what, std::vector<std::string> findings)
    : std::runtime_error(what), findings_(std::move(findings)) {}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty()) throw InputError(what + ": every row must be a non-empty array");
    if (cols == 0) cols = row.size();
    if (row.size() != cols) throw InputError(what + ": rows have different lengths");
  }
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& v = j[r][c];
      if (!v.is_number()) throw InputError(what + ": entries must be numbers");
      m(r, c) = v.get<double>();
    }
  return m;
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const SymMatrix& m) { return to_json(m.matrix()); }

namespace {

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing \"" + key + "\"");
  return j.at(key);
}

SymMatrix sym_from_json(const json& j, const std::string& what) {
  const Matrix m = matrix_from_json(j, what);
  if (m.rows() != m.cols()) throw InputError(what + ": matrix is not square");
  if (!m.all_finite()) throw InputError(what + ": non-finite entry");
  return SymMatrix(m);
}

Analysis analysis_from_json(const json& j) {
  const json& a = field(j, "analysis", "certificate");
  if (!a.is_string()) throw InputError("certificate: \"analysis\" must be a string");
  try {
    return parse_analysis(a.get<std::string>());
  } catch (const ContractError& e) {
    throw InputError(std::string("certificate: ") + e.what());
  }
}

int index_from_json(const json& j, const char* key, std::size_t n, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_integer()) throw InputError(where + ": \"" + key + "\" must be an integer");
  const int k = v.get<int>();
  if (k < 1 || std::size_t(k) > n)
    throw InputError(where + ": \"" + key + "\" = " + std::to_string(k) + " is outside 1.." +
                     std::to_string(n));
  return k;
}

json margin_to_json(const ConstraintMargin& m) {
  return {{"label", m.label},
          {"value", m.value},
          {"bound", m.bound},
          {"kind", m.kind == ConstraintMargin::Kind::at_least ? "at_least" : "at_most"},
          {"passed", m.passed}};
}

}  // namespace

PolytopicSystem system_from_json(const json& j) {
  if (!j.is_object()) throw InputError("system: expected a JSON object");
  PolytopicSystem s;
  const json& verts = field(j, "vertices", "system");
  if (!verts.is_array()) throw InputError("system: \"vertices\" must be an array of matrices");
  std::vector<std::string> parse_findings;
  auto parse = [&](const json& m, const std::string& what) -> std::optional<Matrix> {
    try {
      return matrix_from_json(m, what);
    } catch (const InputError& e) {
      parse_findings.push_back(e.what());
      return std::nullopt;
    }
  };
  for (std::size_t k = 0; k < verts.size(); ++k)
    if (auto m = parse(verts[k], "vertex " + std::to_string(k + 1))) s.vertices.push_back(std::move(*m));
  if (j.contains("B") && !j["B"].is_null()) s.B = parse(j["B"], "B");
  if (j.contains("C") && !j["C"].is_null()) s.C = parse(j["C"], "C");
  if (!parse_findings.empty()) throw InputError("system is malformed", std::move(parse_findings));

  std::vector<std::string> findings = validate(s);
  if (j.contains("N") && (!j["N"].is_number_integer() || j["N"].get<long long>() != (long long)s.vertex_count()))
    findings.push_back("\"N\" does not match the number of vertices (" +
                       std::to_string(s.vertex_count()) + ")");
  if (j.contains("n_x") && (!j["n_x"].is_number_integer() ||
                            j["n_x"].get<long long>() != (long long)s.state_dim()))
    findings.push_back("\"n_x\" does not match the vertex dimension (" +
                       std::to_string(s.state_dim()) + ")");
  if (!findings.empty()) throw InputError("system is malformed", std::move(findings));
  return s;
}

json to_json(const PolytopicSystem& system) {
  json j;
  j["n_x"] = system.state_dim();
  j["N"] = system.vertex_count();
  j["vertices"] = json::array();
  for (const auto& a : system.vertices) j["vertices"].push_back(to_json(a));
  if (system.B) j["B"] = to_json(*system.B);
  if (system.C) j["C"] = to_json(*system.C);
  return j;
}

PolytopicSystem load_system(const std::filesystem::path& path) {
  return system_from_json(read_json(path));
}

Certificate certificate_from_json(const json& j, std::size_t vertex_count) {
  if (!j.is_object()) throw InputError("certificate: expected a JSON object");
  if (j.contains("schema_version") && j["schema_version"] != kSchemaVersion)
    throw InputError("certificate: unsupported schema_version");
  const Analysis analysis = analysis_from_json(j);
  const json& kind = field(j, "kind", "certificate");
  if (!kind.is_string()) throw InputError("certificate: \"kind\" must be a string");
  const json& blocks = field(j, "blocks", "certificate");
  if (!blocks.is_array()) throw InputError("certificate: \"blocks\" must be an array");

  if (kind == "existence") {
    ExistenceCertificate c{analysis, {}};
    for (std::size_t k = 0; k < blocks.size(); ++k)
      c.matrices.push_back(sym_from_json(blocks[k], "block " + std::to_string(k + 1)));
    return c;
  }
  if (kind != "nonexistence")
    throw InputError("certificate: \"kind\" must be \"existence\" or \"nonexistence\"");

  NonexistenceCertificate c;
  c.analysis = analysis;
  if (j.contains("normalization")) {
    if (!j["normalization"].is_number())
      throw InputError("certificate: \"normalization\" must be a number");
    c.normalization = j["normalization"].get<double>();
  }
  if (analysis == Analysis::ct_cqlf) {
    for (std::size_t k = 0; k < blocks.size(); ++k)
      c.mode_weights.push_back(sym_from_json(blocks[k], "R_" + std::to_string(k + 1)));
    if (j.contains("r0") && !j["r0"].is_null()) c.r0 = sym_from_json(j["r0"], "r0");
    return c;
  }

  FlatConvention convention = FlatConvention::column;
  if (j.contains("index_convention")) {
    try {
      convention = parse_flat_convention(j["index_convention"].get<std::string>());
    } catch (const std::exception& e) {
      throw InputError(std::string("certificate: ") + e.what());
    }
  }
  const int N = static_cast<int>(vertex_count);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const json& b = blocks[k];
    const std::string where = "block " + std::to_string(k + 1);
    VertexPair p;
    SymMatrix m;
    if (b.is_object()) {
      p = {index_from_json(b, "i", vertex_count, where), index_from_json(b, "j", vertex_count, where)};
      m = sym_from_json(field(b, "matrix", where), where);
    } else {
      if (k >= vertex_count * vertex_count)
        throw InputError("certificate: more than N^2 = " +
                         std::to_string(vertex_count * vertex_count) + " flat blocks");
      p = flat_to_pair(int(k + 1), N, convention);
      m = sym_from_json(b, where);
    }
    if (!c.blocks.emplace(p, std::move(m)).second)
      throw InputError("certificate: duplicate block (" + std::to_string(p.i) + "," +
                       std::to_string(p.j) + ")");
  }
  return c;
}

json to_json(const ExistenceCertificate& cert) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["analysis"] = std::string(to_string(cert.analysis));
  j["kind"] = "existence";
  j["blocks"] = json::array();
  for (const auto& m : cert.matrices) j["blocks"].push_back(to_json(m));
  return j;
}

json to_json(const NonexistenceCertificate& cert) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["analysis"] = std::string(to_string(cert.analysis));
  j["kind"] = "nonexistence";
  j["normalization"] = cert.normalization;
  j["blocks"] = json::array();
  if (cert.analysis == Analysis::ct_cqlf) {
    for (const auto& m : cert.mode_weights) j["blocks"].push_back(to_json(m));
    if (cert.r0) j["r0"] = to_json(*cert.r0);
  } else {
    for (const auto& [p, m] : cert.blocks)
      j["blocks"].push_back({{"i", p.i}, {"j", p.j}, {"matrix", to_json(m)}});
  }
  return j;
}

json to_json(const Certificate& cert) {
  return std::visit([](const auto& c) { return to_json(c); }, cert);
}

Certificate load_certificate(const std::filesystem::path& path, std::size_t vertex_count) {
  return certificate_from_json(read_json(path), vertex_count);
}

json to_json(const VerificationReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["analysis"] = std::string(to_string(report.analysis));
  j["kind"] = report.existence ? "existence" : "nonexistence";
  j["passed"] = report.passed;
  j["margins"] = json::array();
  for (const auto& m : report.margins) j["margins"].push_back(margin_to_json(m));
  j["problems"] = report.problems;
  return j;
}

json to_json(const Verdict& verdict) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["analysis"] = std::string(to_string(verdict.analysis));
  j["outcome"] = std::string(to_string(verdict.outcome));
  const auto& d = verdict.diagnostics;
  j["diagnostics"] = {{"primal_iterations", d.primal_iterations},
                      {"dual_iterations", d.dual_iterations},
                      {"primal_residual", d.primal_residual},
                      {"dual_residual", d.dual_residual},
                      {"wall_seconds", d.wall_seconds}};
  if (verdict.existence) j["certificate"] = to_json(*verdict.existence);
  if (verdict.nonexistence) j["certificate"] = to_json(*verdict.nonexistence);
  return j;
}

json to_json(const jsr::JsrBounds& bounds) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["lower"] = bounds.lower;
  j["upper"] = bounds.upper;
  j["depth"] = bounds.depth;
  j["witness_word"] = bounds.witness_word;
  j["products"] = bounds.products;
  j["per_depth"] = json::array();
  for (const auto& d : bounds.per_depth)
    j["per_depth"].push_back({{"depth", d.depth}, {"lower", d.lower}, {"upper", d.upper}});
  return j;
}

}  // namespace cone_lpv::io
