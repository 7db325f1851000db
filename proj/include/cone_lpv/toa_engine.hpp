#pragma once

// Generic theorem-of-alternatives machinery.
//
// A LinearMatrixMap sends a block-diagonal symmetric variable x to a
// block-diagonal symmetric output; an offset A0 lives in the output space.
// For such a map exactly one of the following is solvable:
//
//   primal:  find x with  A(x) + A0 > 0
//   dual:    find R >= 0, R != 0 with  A*(R) = 0  and  <A0, R> <= 0
//
// where A* is the adjoint under the block trace inner product. Both are
// convex feasibility problems over small matrices, and FeasibilitySolver
// handles either one by projection splitting between the (shifted) PSD cone
// and an affine set: Douglas-Rachford by default, or alternating projections
// with or without Dykstra's correction. The strict primal inequality is
// encoded as A(x) + A0 >= floor * I with a small positive floor; the dual
// nonzero requirement is encoded by the caller as a trace equality.

#include <cstddef>
#include <string>
#include <vector>

#include "cone_lpv/errors.hpp"
#include "cone_lpv/linalg.hpp"

namespace cone_lpv {

/// Contributes scale * (left * X * right + right^T * X * left^T) to output
/// block `out_block`, where X is variable block `var_block`. `left` is
/// out_dim x var_dim and `right` is var_dim x out_dim.
struct MapTerm {
  std::size_t out_block = 0;
  std::size_t var_block = 0;
  double scale = 1.0;
  Matrix left;
  Matrix right;
};

class LinearMatrixMap {
 public:
  LinearMatrixMap() = default;
  LinearMatrixMap(std::vector<std::size_t> input_dims, std::vector<std::size_t> output_dims);

  /// Throws ContractError if the term does not conform to the structures.
  void add_term(MapTerm term);
  void set_offset(BlockDiagSym offset);

  const std::vector<std::size_t>& input_dims() const { return input_dims_; }
  const std::vector<std::size_t>& output_dims() const { return output_dims_; }
  const std::vector<MapTerm>& terms() const { return terms_; }
  const BlockDiagSym& offset() const { return offset_; }
  bool has_offset() const;

  /// A(x), without the offset.
  BlockDiagSym apply(const BlockDiagSym& x) const;
  /// A*(r): for every term, scale * (right * r_out * left + (right * r_out * left)^T)
  /// accumulates into the variable block.
  BlockDiagSym apply_adjoint(const BlockDiagSym& r) const;

 private:
  std::vector<std::size_t> input_dims_;
  std::vector<std::size_t> output_dims_;
  std::vector<MapTerm> terms_;
  BlockDiagSym offset_;
};

enum class Side { primal, dual };

/// <coefficients, variables> == target. Coefficients are laid out on the
/// input structure for the primal side and on the output structure for the
/// dual side.
struct LinearEquality {
  BlockDiagSym coefficients;
  double target = 0.0;
  std::string label;
};

struct FeasibilityProblem {
  Side side = Side::primal;
  LinearMatrixMap map;
  std::vector<LinearEquality> equalities;

  bool psd_on_variables() const { return side == Side::dual; }
};

enum class Method { douglas_rachford, dykstra, alternating };

std::string_view to_string(Method m);
/// Accepts the names printed by to_string(). Throws ContractError otherwise.
Method parse_method(std::string_view name);

struct SolveOptions {
  std::size_t max_iters = 200'000;
  double tol_feas = 1e-9;
  /// Relative strictness margin for the primal side.
  double epsilon = 1e-6;
  std::size_t check_every = 25;
  Method method = Method::douglas_rachford;
  double stall_tol = 1e-12;
};

enum class SolveStatus { running, converged, stalled, iteration_cap };

std::string_view to_string(SolveStatus s);

struct SolveResult {
  Side side = Side::primal;
  SolveStatus status = SolveStatus::running;
  /// Primal: x on the input structure. Dual: R on the output structure,
  /// clipped to the PSD cone.
  BlockDiagSym variables;
  /// Primal: A(x) + A0. Dual: A*(R).
  BlockDiagSym image;
  /// Primal: worst relative shortfall of lambda_min(block) below
  /// epsilon * (1 + ||block||_F), zero when strictly feasible. Dual: relative
  /// distance of the affine iterate to the cone (plus halfspace violation).
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// The equality constraints admit no solution, so the feasible set is empty.
class InconsistentEqualities : public ContractError {
 public:
  using ContractError::ContractError;
};

/// Resumable solver; advance() can be called repeatedly so that the primal
/// and dual sides of one question can be interleaved deterministically.
class FeasibilitySolver {
 public:
  FeasibilitySolver(FeasibilityProblem problem, SolveOptions options);

  /// Runs up to `steps` more iterations (bounded by max_iters overall).
  SolveStatus advance(std::size_t steps);
  bool done() const { return status_ != SolveStatus::running; }
  SolveStatus status() const { return status_; }
  std::size_t iterations() const { return iterations_; }
  SolveResult result() const;

  const FeasibilityProblem& problem() const { return problem_; }

 private:
  void build_primal();
  void build_dual();
  void reset_corrections();
  void init_state();
  void project_affine(std::vector<double>& v) const;
  void project_cone(std::vector<double>& v) const;
  void project_halfspace(std::vector<double>& v) const;
  void evaluate();
  BlockDiagSym unpack(const std::vector<double>& v, const std::vector<std::size_t>& dims) const;
  std::vector<double> recover_x(const std::vector<double>& s) const;

  FeasibilityProblem problem_;
  SolveOptions options_;
  std::vector<std::size_t> dims_;     // blocks the iterate lives on
  std::vector<std::size_t> offsets_;  // svec offsets of those blocks
  std::size_t space_dim_ = 0;

  Matrix projector_;                 // space_dim x space_dim
  std::vector<double> anchor_;       // a point of the affine set
  Matrix recover_;                   // primal: x = x_anchor + recover * (s - anchor)
  std::vector<double> x_anchor_;
  std::vector<double> halfspace_;    // dual: svec of A0 when nonzero
  double floor_ = 0.0;

  void step_projections();
  void step_douglas_rachford();

  // point_ is the cone-side iterate for the projection methods and the
  // governing sequence for Douglas-Rachford; affine_point_ is always the
  // candidate that evaluate() and result() read.
  std::vector<double> point_, affine_point_;
  std::vector<double> corr_affine_, corr_cone_, corr_half_;
  // Douglas-Rachford on three sets runs in the product space, one copy per set.
  std::vector<double> z_affine_, z_cone_, z_half_;
  SolveStatus status_ = SolveStatus::running;
  std::size_t iterations_ = 0;
  double residual_ = 0.0;
  double last_move_ = 0.0;
};

/// Runs a FeasibilitySolver to completion.
SolveResult solve(const FeasibilityProblem& problem, const SolveOptions& options = {});

}  // namespace cone_lpv
