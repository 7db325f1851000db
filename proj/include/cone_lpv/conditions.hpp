#pragma once

// Builders that turn a polytopic system into the primal and dual feasibility
// problems of each analysis, and the orchestration that runs both sides and
// returns a verified verdict.
//
// Block layouts (N vertices, n = n_x):
//
//   stability / detectability
//     input:  P_1..P_N
//     output: N^2 blocks, block pair_to_flat(i,j)-1 holds
//               P_j - A_j^T P_i A_j (+ C^T C)
//             so that its multiplier is Q(i,j); then N blocks P_i.
//   stabilizability
//     input:  S_1..S_N
//     output: block pair_to_flat(i,j)-1 holds S_j - A_i S_i A_i^T + B B^T;
//             then N blocks S_i.
//   ct_cqlf
//     input:  P
//     output: N blocks -(A_i^T P + P A_i), then one block P (multiplier R_0).
//
// With these layouts the dual slack for vertex i is exactly the combined
// block checked by verify_nonexistence().

#include "cone_lpv/model.hpp"
#include "cone_lpv/toa_engine.hpp"
#include "cone_lpv/verify.hpp"

namespace cone_lpv {

struct AnalyzeOptions {
  SolveOptions solve;
  double tol_psd = kDefaultTolPsd;
  double tol_eq = kDefaultTolEq;
  double tol_margin = kDefaultTolMargin;
  /// Iterations granted to each side in the first round; doubled per round.
  std::size_t initial_budget = 256;
};

FeasibilityProblem build(const PolytopicSystem& system, Analysis analysis, Side side);

ExistenceCertificate existence_from(const PolytopicSystem& system, Analysis analysis,
                                    const SolveResult& primal);
/// Rescales to unit total trace and, for ct_cqlf, recomputes R_0 from the
/// mode weights.
NonexistenceCertificate nonexistence_from(const PolytopicSystem& system, Analysis analysis,
                                          const SolveResult& dual);

/// Runs the primal and dual problems in alternating rounds (primal first)
/// and returns as soon as one side yields a certificate that the verifier
/// accepts. Never reports a certificate the verifier rejects.
Verdict analyze(const PolytopicSystem& system, Analysis analysis,
                const AnalyzeOptions& options = {});

}  // namespace cone_lpv
