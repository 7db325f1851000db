#include "cone_lpv/model.hpp"

#include <sstream>

#include "cone_lpv/errors.hpp"

namespace cone_lpv {

std::string_view to_string(Analysis a) {
  switch (a) {
    case Analysis::stability: return "stability";
    case Analysis::detectability: return "detectability";
    case Analysis::stabilizability: return "stabilizability";
    case Analysis::ct_cqlf: return "ct-cqlf";
  }
  return "unknown";
}

Analysis parse_analysis(std::string_view name) {
  if (name == "stability") return Analysis::stability;
  if (name == "detectability") return Analysis::detectability;
  if (name == "stabilizability") return Analysis::stabilizability;
  if (name == "ct-cqlf" || name == "ct_cqlf") return Analysis::ct_cqlf;
  throw ContractError("unknown analysis '" + std::string(name) + "'");
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::existence_proven: return "ExistenceProven";
    case Outcome::necessary_condition_feasible: return "NecessaryConditionFeasible";
    case Outcome::nonexistence_proven: return "NonexistenceProven";
    case Outcome::inconclusive: return "Inconclusive";
  }
  return "unknown";
}

std::vector<std::string> validate(const PolytopicSystem& system) {
  std::vector<std::string> findings;
  if (system.vertices.empty()) {
    findings.emplace_back("system has no vertex matrices (N must be >= 1)");
    return findings;
  }
  const std::size_t n = system.vertices.front().rows();
  if (n == 0) findings.emplace_back("vertex 1 is empty");
  for (std::size_t k = 0; k < system.vertices.size(); ++k) {
    const Matrix& a = system.vertices[k];
    if (a.rows() != n || a.cols() != n) {
      std::ostringstream os;
      os << "vertex " << k + 1 << " is " << a.rows() << "x" << a.cols() << ", expected " << n
         << "x" << n;
      findings.push_back(os.str());
    } else if (!a.all_finite()) {
      findings.push_back("vertex " + std::to_string(k + 1) + " has a non-finite entry");
    }
  }
  if (system.B) {
    if (system.B->rows() != n || system.B->cols() == 0)
      findings.push_back("B has " + std::to_string(system.B->rows()) + " rows, expected " +
                         std::to_string(n));
    else if (!system.B->all_finite())
      findings.emplace_back("B has a non-finite entry");
  }
  if (system.C) {
    if (system.C->cols() != n || system.C->rows() == 0)
      findings.push_back("C has " + std::to_string(system.C->cols()) + " columns, expected " +
                         std::to_string(n));
    else if (!system.C->all_finite())
      findings.emplace_back("C has a non-finite entry");
  }
  return findings;
}

void require_valid(const PolytopicSystem& system) {
  const auto findings = validate(system);
  if (findings.empty()) return;
  std::string msg = "invalid system:";
  for (const auto& f : findings) msg += "\n  - " + f;
  throw ContractError(msg);
}

void require_supports(const PolytopicSystem& system, Analysis analysis) {
  if (analysis == Analysis::detectability && !system.C)
    throw ContractError("detectability analysis requires an output matrix C");
  if (analysis == Analysis::stabilizability && !system.B)
    throw ContractError("stabilizability analysis requires an input matrix B");
}

VertexPair flat_to_pair(int k, int vertex_count) {
  return flat_to_pair(k, vertex_count, FlatConvention::column);
}

VertexPair flat_to_pair(int k, int vertex_count, FlatConvention convention) {
  if (vertex_count < 1 || k < 1 || k > vertex_count * vertex_count)
    throw ContractError("flat index " + std::to_string(k) + " out of range for N = " +
                        std::to_string(vertex_count));
  const int fast = (k - 1) % vertex_count + 1;
  const int slow = (k - 1) / vertex_count + 1;
  return convention == FlatConvention::column ? VertexPair{fast, slow} : VertexPair{slow, fast};
}

int pair_to_flat(VertexPair p, int vertex_count) {
  if (vertex_count < 1 || p.i < 1 || p.j < 1 || p.i > vertex_count || p.j > vertex_count)
    throw ContractError("vertex pair out of range");
  return vertex_count * (p.j - 1) + p.i;
}

std::string_view to_string(FlatConvention c) {
  return c == FlatConvention::column ? "column" : "row";
}

FlatConvention parse_flat_convention(std::string_view name) {
  if (name == "column") return FlatConvention::column;
  if (name == "row") return FlatConvention::row;
  throw ContractError("unknown flat index convention '" + std::string(name) + "'");
}

double NonexistenceCertificate::total_trace() const {
  double t = 0.0;
  for (const auto& [_, q] : blocks) t += q.trace();
  for (const auto& r : mode_weights) t += r.trace();
  return t;
}

SymMatrix NonexistenceCertificate::block_sum(std::size_t dim) const {
  Matrix sum(dim, dim);
  for (const auto& [_, q] : blocks) sum += q.matrix();
  for (const auto& r : mode_weights) sum += r.matrix();
  return SymMatrix(sum);
}

NonexistenceCertificate NonexistenceCertificate::scaled(double s) const {
  NonexistenceCertificate out = *this;
  for (auto& [_, q] : out.blocks) q = s * q;
  for (auto& r : out.mode_weights) r = s * r;
  if (out.r0) out.r0 = s * *out.r0;
  out.normalization *= s;
  return out;
}

}  // namespace cone_lpv
