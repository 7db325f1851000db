#pragma once

// Independent certificate checker. Every inequality and equality is
// re-evaluated from the raw system matrices with the linalg kernel only;
// nothing here touches the feasibility engine.

#include <string>
#include <vector>

#include "cone_lpv/model.hpp"

namespace cone_lpv {

inline constexpr double kDefaultTolMargin = 1e-7;
inline constexpr double kDefaultTolPsd = 1e-6;
inline constexpr double kDefaultTolEq = 1e-8;

struct ConstraintMargin {
  enum class Kind { at_least, at_most };

  std::string label;
  /// lambda_min for PSD checks, a Frobenius residual for equalities, a
  /// trace for the nonzero check.
  double value = 0.0;
  double bound = 0.0;
  Kind kind = Kind::at_least;
  bool passed = false;

  /// Positive when satisfied.
  double slack() const { return kind == Kind::at_least ? value - bound : bound - value; }
};

struct VerificationReport {
  Analysis analysis = Analysis::stability;
  bool existence = true;
  bool passed = false;
  std::vector<ConstraintMargin> margins;
  /// Problems that are not a single constraint (bad normalization).
  std::vector<std::string> problems;

  const ConstraintMargin* worst() const;
};

/// Passes iff every evaluated matrix M has lambda_min(M) >= tol * (1 + ||M||_F).
/// Throws ContractError on dimension or analysis mismatch.
VerificationReport verify_existence(const PolytopicSystem& system,
                                    const ExistenceCertificate& cert,
                                    double tol = kDefaultTolMargin);

/// Blocks are divided by cert.normalization first. Then passes iff
///  (a) every block has lambda_min >= -tol_psd * (1 + ||block||_F),
///  (b) every combined condition block does too,
///  (c) the analysis' equalities hold within tol_eq (relative),
///  (d) the total trace of the dual blocks is at least 0.5.
VerificationReport verify_nonexistence(const PolytopicSystem& system,
                                       const NonexistenceCertificate& cert,
                                       double tol_psd = kDefaultTolPsd,
                                       double tol_eq = kDefaultTolEq);

/// The combined dual condition block for vertex i (1-based):
///   stability/detectability:  sum_j [A_j Q(i,j) A_j^T - Q(j,i)]
///   stabilizability:          sum_j [A_i^T Q(i,j) A_i - Q(j,i)]
SymMatrix dual_condition_block(const PolytopicSystem& system, Analysis analysis,
                               const NonexistenceCertificate& cert, int i);

/// R_0 implied by ct_cqlf mode weights: sum_i A_i R_i + R_i A_i^T.
SymMatrix ct_implied_r0(const PolytopicSystem& system, const NonexistenceCertificate& cert);

}  // namespace cone_lpv
