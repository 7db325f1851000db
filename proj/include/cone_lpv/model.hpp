#pragma once

// Polytopic systems, certificates and verdicts.
//
// A polytopic system is given by its vertex matrices A_1..A_N and optional
// constant B (n_x x n_u) and C (n_y x n_x). The scheduling map is not part
// of the data; every analysis assumes the system is strictly polytopic,
// i.e. each vertex is attained by some admissible parameter value.
//
// Dual certificates are stored doubly indexed: Q(i, j), 1 <= i, j <= N.
// Flat indices k = 1..N^2 only appear at the file boundary, where
// flat_to_pair() maps k to (i, j) with i running fastest.

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cone_lpv/linalg.hpp"

namespace cone_lpv {

enum class Analysis { stability, detectability, stabilizability, ct_cqlf };

std::string_view to_string(Analysis a);
/// Accepts "stability", "detectability", "stabilizability", "ct-cqlf" and
/// "ct_cqlf". Throws ContractError otherwise.
Analysis parse_analysis(std::string_view name);

struct PolytopicSystem {
  std::vector<Matrix> vertices;
  std::optional<Matrix> B;
  std::optional<Matrix> C;

  std::size_t state_dim() const { return vertices.empty() ? 0 : vertices.front().rows(); }
  std::size_t vertex_count() const { return vertices.size(); }
};

/// Dimension and finiteness problems; empty means well formed.
std::vector<std::string> validate(const PolytopicSystem& system);

/// Throws ContractError listing the findings of validate().
void require_valid(const PolytopicSystem& system);

/// Throws ContractError if `analysis` needs a B or C the system lacks.
void require_supports(const PolytopicSystem& system, Analysis analysis);

struct VertexPair {
  int i = 1;
  int j = 1;
  friend auto operator<=>(const VertexPair&, const VertexPair&) = default;
};

/// k in 1..N^2 -> (i, j) with i = ((k-1) mod N) + 1, j = ceil(k / N).
VertexPair flat_to_pair(int k, int vertex_count);
int pair_to_flat(VertexPair p, int vertex_count);

/// How a flat list of N^2 dual blocks is interpreted when read from disk.
/// `column` is flat_to_pair(); `row` swaps the roles of i and j.
enum class FlatConvention { column, row };

std::string_view to_string(FlatConvention c);
FlatConvention parse_flat_convention(std::string_view name);
VertexPair flat_to_pair(int k, int vertex_count, FlatConvention convention);

/// Solution of a primal LMI family: P_i (stability, detectability), S_i
/// (stabilizability) or a single P (ct_cqlf).
struct ExistenceCertificate {
  Analysis analysis = Analysis::stability;
  std::vector<SymMatrix> matrices;
};

/// Solution of a dual condition family. For the discrete-time analyses the
/// blocks Q(i, j) are keyed by vertex pair; for ct_cqlf the weights R_1..R_N
/// live in `mode_weights` and R_0 in `r0`.
struct NonexistenceCertificate {
  Analysis analysis = Analysis::stability;
  std::map<VertexPair, SymMatrix> blocks;
  std::vector<SymMatrix> mode_weights;
  std::optional<SymMatrix> r0;
  /// Positive scale the blocks are measured against; the verifier divides
  /// every block by it before applying tolerances.
  double normalization = 1.0;

  /// Trace of the sum of all dual blocks (Q(i,j), or R_1..R_N for ct_cqlf).
  double total_trace() const;
  /// Sum of all dual blocks.
  SymMatrix block_sum(std::size_t dim) const;
  NonexistenceCertificate scaled(double s) const;
};

enum class Outcome {
  existence_proven,
  necessary_condition_feasible,
  nonexistence_proven,
  inconclusive
};

std::string_view to_string(Outcome o);

struct Diagnostics {
  std::size_t primal_iterations = 0;
  std::size_t dual_iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double wall_seconds = 0.0;
};

struct Verdict {
  Analysis analysis = Analysis::stability;
  Outcome outcome = Outcome::inconclusive;
  std::optional<ExistenceCertificate> existence;
  std::optional<NonexistenceCertificate> nonexistence;
  Diagnostics diagnostics;
};

}  // namespace cone_lpv
