#include "cone_lpv/toa_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cone_lpv/errors.hpp"
#include "cone_lpv/kernels.hpp"

namespace cone_lpv {

namespace {

constexpr double kRankTol = 1e-12;
constexpr double kConsistencyTol = 1e-9;

std::vector<std::size_t> svec_offsets(const std::vector<std::size_t>& dims, std::size_t& total) {
  std::vector<std::size_t> off;
  off.reserve(dims.size());
  total = 0;
  for (std::size_t d : dims) {
    off.push_back(total);
    total += svec_size(d);
  }
  return off;
}

std::vector<double> pack(const BlockDiagSym& x) {
  std::vector<double> v;
  for (const auto& b : x.blocks()) {
    const std::size_t old = v.size();
    v.resize(old + svec_size(b.dim()));
    svec(b, std::span<double>(v).subspan(old));
  }
  return v;
}

double norm2(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

// y = A x for a dense Matrix.
std::vector<double> mul(const Matrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows());
  kernels::gemv(a.data(), a.rows(), a.cols(), x, y);
  return y;
}

}  // namespace

// ------------------------------------------------------- LinearMatrixMap

LinearMatrixMap::LinearMatrixMap(std::vector<std::size_t> input_dims,
                                 std::vector<std::size_t> output_dims)
    : input_dims_(std::move(input_dims)),
      output_dims_(std::move(output_dims)),
      offset_(BlockDiagSym::zero(output_dims_)) {}

void LinearMatrixMap::add_term(MapTerm term) {
  if (term.out_block >= output_dims_.size() || term.var_block >= input_dims_.size())
    throw ContractError("MapTerm: block index out of range");
  const std::size_t no = output_dims_[term.out_block];
  const std::size_t nv = input_dims_[term.var_block];
  if (term.left.rows() != no || term.left.cols() != nv || term.right.rows() != nv ||
      term.right.cols() != no)
    throw ContractError("MapTerm: left must be out x var and right var x out");
  if (!term.left.all_finite() || !term.right.all_finite() || !std::isfinite(term.scale))
    throw ContractError("MapTerm: non-finite coefficient");
  terms_.push_back(std::move(term));
}

void LinearMatrixMap::set_offset(BlockDiagSym offset) {
  if (offset.dims() != output_dims_) throw ContractError("offset does not match output structure");
  offset_ = std::move(offset);
}

bool LinearMatrixMap::has_offset() const { return offset_.frobenius_norm() > 0.0; }

BlockDiagSym LinearMatrixMap::apply(const BlockDiagSym& x) const {
  if (x.dims() != input_dims_) throw ContractError("apply_map: input structure mismatch");
  std::vector<Matrix> acc;
  for (std::size_t d : output_dims_) acc.emplace_back(d, d);
  for (const auto& t : terms_) {
    const Matrix lxr = t.left * x[t.var_block].matrix() * t.right;
    Matrix contrib = lxr + lxr.transpose();
    contrib *= t.scale;
    acc[t.out_block] += contrib;
  }
  std::vector<SymMatrix> out;
  for (auto& m : acc) out.emplace_back(m);
  return BlockDiagSym(std::move(out));
}

BlockDiagSym LinearMatrixMap::apply_adjoint(const BlockDiagSym& r) const {
  if (r.dims() != output_dims_) throw ContractError("apply_adjoint: output structure mismatch");
  std::vector<Matrix> acc;
  for (std::size_t d : input_dims_) acc.emplace_back(d, d);
  for (const auto& t : terms_) {
    const Matrix ryl = t.right * r[t.out_block].matrix() * t.left;
    Matrix contrib = ryl + ryl.transpose();
    contrib *= t.scale;
    acc[t.var_block] += contrib;
  }
  std::vector<SymMatrix> out;
  for (auto& m : acc) out.emplace_back(m);
  return BlockDiagSym(std::move(out));
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::douglas_rachford: return "douglas-rachford";
    case Method::dykstra: return "dykstra";
    case Method::alternating: return "alternating";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::douglas_rachford, Method::dykstra, Method::alternating})
    if (name == to_string(m)) return m;
  throw ContractError("unknown solver method '" + std::string(name) + "'");
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::running: return "running";
    case SolveStatus::converged: return "converged";
    case SolveStatus::stalled: return "stalled";
    case SolveStatus::iteration_cap: return "iteration_cap";
  }
  return "unknown";
}

// ----------------------------------------------------- FeasibilitySolver

namespace {

// Dense matrix of the map in svec coordinates (output_dim x input_dim).
// svec is an isometry, so the adjoint is its transpose.
Matrix dense_map(const LinearMatrixMap& map) {
  std::size_t out_total = 0, in_total = 0;
  svec_offsets(map.output_dims(), out_total);
  const auto in_off = svec_offsets(map.input_dims(), in_total);
  Matrix m(out_total, in_total);
  for (std::size_t b = 0; b < map.input_dims().size(); ++b) {
    const std::size_t nb = map.input_dims()[b];
    for (std::size_t e = 0; e < svec_size(nb); ++e) {
      std::vector<double> unit(svec_size(nb), 0.0);
      unit[e] = 1.0;
      std::vector<SymMatrix> blocks;
      for (std::size_t k = 0; k < map.input_dims().size(); ++k)
        blocks.push_back(k == b ? smat(unit, nb) : SymMatrix::zero(map.input_dims()[k]));
      const std::vector<double> col = pack(map.apply(BlockDiagSym(std::move(blocks))));
      for (std::size_t r = 0; r < out_total; ++r) m(r, in_off[b] + e) = col[r];
    }
  }
  return m;
}

// Minimum-norm solution of K z = rhs plus the projector onto null(K).
struct AffineFactor {
  std::vector<double> particular;
  Matrix null_projector;
};

AffineFactor factor_affine(const Matrix& k, std::span<const double> rhs) {
  const std::size_t n = k.cols();
  AffineFactor f{std::vector<double>(n, 0.0), Matrix::identity(n)};
  if (k.rows() == 0) return f;
  const Matrix kt = k.transpose();
  const SymMatrix gram_inv = pinv_sym(SymMatrix(k * kt), kRankTol);
  const Matrix pseudo = kt * gram_inv.matrix();  // n x m
  f.particular = mul(pseudo, rhs);
  const std::vector<double> check = mul(k, f.particular);
  double err = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < check.size(); ++i) {
    err = std::max(err, std::abs(check[i] - rhs[i]));
    scale = std::max(scale, std::abs(rhs[i]));
  }
  if (err > kConsistencyTol * scale)
    throw InconsistentEqualities("feasibility problem has inconsistent equality constraints");
  f.null_projector = Matrix::identity(n) - pseudo * k;
  return f;
}

}  // namespace

FeasibilitySolver::FeasibilitySolver(FeasibilityProblem problem, SolveOptions options)
    : problem_(std::move(problem)), options_(options) {
  if (options_.check_every == 0) options_.check_every = 1;
  if (problem_.side == Side::primal)
    build_primal();
  else
    build_dual();
  init_state();
}

void FeasibilitySolver::build_primal() {
  const LinearMatrixMap& map = problem_.map;
  dims_ = map.output_dims();
  offsets_ = svec_offsets(dims_, space_dim_);
  std::size_t nx = 0;
  svec_offsets(map.input_dims(), nx);

  const Matrix m = dense_map(map);
  Matrix g(problem_.equalities.size(), nx);
  std::vector<double> c;
  for (std::size_t r = 0; r < problem_.equalities.size(); ++r) {
    const auto& eq = problem_.equalities[r];
    if (eq.coefficients.dims() != map.input_dims())
      throw ContractError("primal equality '" + eq.label + "' does not match the input structure");
    const std::vector<double> row = pack(eq.coefficients);
    std::copy(row.begin(), row.end(), g.data().begin() + static_cast<std::ptrdiff_t>(r * nx));
    c.push_back(eq.target);
  }
  const AffineFactor f = factor_affine(g, c);
  x_anchor_ = f.particular;

  // Restrict the least-squares fit to the null space of the equalities:
  // s -> M (x_p + Z (Z^T M^T M Z)^+ Z^T M^T (s - s0)) with Z Z^T = null_projector.
  const Matrix mz = m * f.null_projector;
  const SymMatrix normal_inv = pinv_sym(SymMatrix(mz.transpose() * mz), kRankTol);
  recover_ = f.null_projector * normal_inv.matrix() * mz.transpose();  // nx x D
  projector_ = m * recover_;                                          // D x D

  anchor_ = mul(m, x_anchor_);
  const std::vector<double> a0 = pack(map.offset());
  for (std::size_t i = 0; i < space_dim_; ++i) anchor_[i] += a0[i];

  floor_ = options_.epsilon * (1.0 + map.offset().frobenius_norm());
}

void FeasibilitySolver::build_dual() {
  const LinearMatrixMap& map = problem_.map;
  dims_ = map.output_dims();
  offsets_ = svec_offsets(dims_, space_dim_);
  std::size_t nx = 0;
  svec_offsets(map.input_dims(), nx);

  const Matrix mt = dense_map(map).transpose();  // adjoint, nx x D
  Matrix k(nx + problem_.equalities.size(), space_dim_);
  std::vector<double> rhs(nx, 0.0);
  std::copy(mt.data().begin(), mt.data().end(), k.data().begin());
  for (std::size_t r = 0; r < problem_.equalities.size(); ++r) {
    const auto& eq = problem_.equalities[r];
    if (eq.coefficients.dims() != dims_)
      throw ContractError("dual equality '" + eq.label + "' does not match the output structure");
    const std::vector<double> row = pack(eq.coefficients);
    std::copy(row.begin(), row.end(),
              k.data().begin() + static_cast<std::ptrdiff_t>((nx + r) * space_dim_));
    rhs.push_back(eq.target);
  }
  const AffineFactor f = factor_affine(k, rhs);
  anchor_ = f.particular;
  projector_ = f.null_projector;
  if (map.has_offset()) halfspace_ = pack(map.offset());
  floor_ = 0.0;
}

void FeasibilitySolver::reset_corrections() {
  corr_affine_.assign(space_dim_, 0.0);
  corr_cone_.assign(space_dim_, 0.0);
  corr_half_.assign(space_dim_, 0.0);
}

void FeasibilitySolver::init_state() {
  point_.assign(space_dim_, 0.0);
  reset_corrections();
  if (options_.method == Method::douglas_rachford && !halfspace_.empty()) {
    z_affine_ = point_;
    z_cone_ = point_;
    z_half_ = point_;
  }
  affine_point_ = point_;
  project_affine(affine_point_);
}

void FeasibilitySolver::project_affine(std::vector<double>& v) const {
  for (std::size_t i = 0; i < space_dim_; ++i) v[i] -= anchor_[i];
  std::vector<double> out(space_dim_);
  kernels::gemv(projector_.data(), space_dim_, space_dim_, v, out);
  for (std::size_t i = 0; i < space_dim_; ++i) v[i] = out[i] + anchor_[i];
}

void FeasibilitySolver::project_cone(std::vector<double>& v) const {
  for (std::size_t b = 0; b < dims_.size(); ++b) {
    const std::size_t len = svec_size(dims_[b]);
    std::span<double> slot(v.data() + offsets_[b], len);
    const SymMatrix blk = smat(slot, dims_[b]);
    SymMatrix proj;
    try {
      proj = project_psd(blk, floor_);
    } catch (const NumericalFailure& e) {
      throw NumericalFailure(e.what(), b);
    }
    svec(proj, slot);
  }
}

void FeasibilitySolver::project_halfspace(std::vector<double>& v) const {
  if (halfspace_.empty()) return;
  const double viol = kernels::dot(halfspace_, v);
  if (viol <= 0.0) return;
  kernels::axpy(-viol / kernels::dot(halfspace_, halfspace_), halfspace_, v);
}

void FeasibilitySolver::step_projections() {
  const bool dykstra = options_.method == Method::dykstra;
  std::vector<double> tmp(space_dim_);

  for (std::size_t i = 0; i < space_dim_; ++i) tmp[i] = point_[i] + corr_affine_[i];
  affine_point_ = tmp;
  project_affine(affine_point_);
  if (dykstra)
    for (std::size_t i = 0; i < space_dim_; ++i) corr_affine_[i] = tmp[i] - affine_point_[i];

  for (std::size_t i = 0; i < space_dim_; ++i) tmp[i] = affine_point_[i] + corr_cone_[i];
  point_ = tmp;
  project_cone(point_);
  if (dykstra)
    for (std::size_t i = 0; i < space_dim_; ++i) corr_cone_[i] = tmp[i] - point_[i];

  if (!halfspace_.empty()) {
    for (std::size_t i = 0; i < space_dim_; ++i) tmp[i] = point_[i] + corr_half_[i];
    point_ = tmp;
    project_halfspace(point_);
    if (dykstra)
      for (std::size_t i = 0; i < space_dim_; ++i) corr_half_[i] = tmp[i] - point_[i];
  }
}

void FeasibilitySolver::step_douglas_rachford() {
  std::vector<double> reflected(space_dim_);
  if (halfspace_.empty()) {
    affine_point_ = point_;
    project_affine(affine_point_);
    for (std::size_t i = 0; i < space_dim_; ++i) reflected[i] = 2.0 * affine_point_[i] - point_[i];
    project_cone(reflected);
    for (std::size_t i = 0; i < space_dim_; ++i) point_[i] += reflected[i] - affine_point_[i];
    return;
  }

  // Product space: the diagonal plays the affine role and each copy is
  // reflected through its own set.
  std::vector<double> mean(space_dim_);
  for (std::size_t i = 0; i < space_dim_; ++i)
    mean[i] = (z_affine_[i] + z_cone_[i] + z_half_[i]) / 3.0;
  auto update = [&](std::vector<double>& z, auto&& project) {
    for (std::size_t i = 0; i < space_dim_; ++i) reflected[i] = 2.0 * mean[i] - z[i];
    project(reflected);
    for (std::size_t i = 0; i < space_dim_; ++i) z[i] += reflected[i] - mean[i];
  };
  update(z_affine_, [&](std::vector<double>& v) { project_affine(v); });
  update(z_cone_, [&](std::vector<double>& v) { project_cone(v); });
  update(z_half_, [&](std::vector<double>& v) { project_halfspace(v); });
  point_ = mean;
  affine_point_ = mean;
  project_affine(affine_point_);
}

SolveStatus FeasibilitySolver::advance(std::size_t steps) {
  for (std::size_t s = 0; s < steps && status_ == SolveStatus::running; ++s) {
    if (iterations_ >= options_.max_iters) break;
    const std::vector<double> previous = point_;
    if (options_.method == Method::douglas_rachford)
      step_douglas_rachford();
    else
      step_projections();

    double move = 0.0;
    for (std::size_t i = 0; i < space_dim_; ++i) {
      const double d = point_[i] - previous[i];
      move += d * d;
    }
    last_move_ = std::sqrt(move);
    ++iterations_;
    if (iterations_ % options_.check_every == 0) evaluate();
  }
  if (status_ == SolveStatus::running && iterations_ >= options_.max_iters) {
    evaluate();
    if (status_ == SolveStatus::running) status_ = SolveStatus::iteration_cap;
  }
  return status_;
}

std::vector<double> FeasibilitySolver::recover_x(const std::vector<double>& s) const {
  std::vector<double> diff(space_dim_);
  for (std::size_t i = 0; i < space_dim_; ++i) diff[i] = s[i] - anchor_[i];
  std::vector<double> x = mul(recover_, diff);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += x_anchor_[i];
  return x;
}

BlockDiagSym FeasibilitySolver::unpack(const std::vector<double>& v,
                                       const std::vector<std::size_t>& dims) const {
  std::vector<SymMatrix> blocks;
  std::size_t off = 0;
  for (std::size_t d : dims) {
    blocks.push_back(smat(std::span<const double>(v.data() + off, svec_size(d)), d));
    off += svec_size(d);
  }
  return BlockDiagSym(std::move(blocks));
}

void FeasibilitySolver::evaluate() {
  for (double x : point_)
    if (!std::isfinite(x)) throw NumericalFailure("feasibility engine produced a non-finite iterate");

  if (problem_.side == Side::primal) {
    const BlockDiagSym x = unpack(recover_x(affine_point_), problem_.map.input_dims());
    const BlockDiagSym s = problem_.map.apply(x) + problem_.map.offset();
    double worst = 0.0, needed = 0.0;
    for (std::size_t b = 0; b < s.size(); ++b) {
      const double norm = s[b].frobenius_norm();
      const double want = options_.epsilon * (1.0 + norm);
      const double lmin = min_eigenvalue(s[b]);
      worst = std::max(worst, std::max(0.0, want - lmin) / (1.0 + norm));
      needed = std::max(needed, want);
    }
    residual_ = worst;
    if (worst == 0.0) {
      status_ = SolveStatus::converged;
      return;
    }
    // The margin is relative to the block norms, which are only known once
    // iterates exist; raise the floor and restart the corrections.
    if (floor_ < needed) {
      floor_ = 2.0 * needed;
      reset_corrections();
      return;
    }
  } else {
    std::vector<double> clipped = affine_point_;
    project_cone(clipped);
    double dist = 0.0;
    for (std::size_t i = 0; i < space_dim_; ++i) {
      const double d = affine_point_[i] - clipped[i];
      dist += d * d;
    }
    const double ynorm = norm2(affine_point_);
    residual_ = std::sqrt(dist) / (1.0 + ynorm);
    if (!halfspace_.empty()) {
      const double h = kernels::dot(halfspace_, affine_point_);
      residual_ = std::max(residual_, std::max(0.0, h) / (1.0 + norm2(halfspace_) * ynorm));
    }
    if (residual_ <= options_.tol_feas) {
      status_ = SolveStatus::converged;
      return;
    }
  }
  if (last_move_ <= options_.stall_tol * (1.0 + norm2(point_))) status_ = SolveStatus::stalled;
}

SolveResult FeasibilitySolver::result() const {
  SolveResult r;
  r.side = problem_.side;
  r.status = status_;
  r.residual = residual_;
  r.iterations = iterations_;
  if (problem_.side == Side::primal) {
    r.variables = unpack(recover_x(affine_point_), problem_.map.input_dims());
    r.image = problem_.map.apply(r.variables) + problem_.map.offset();
  } else {
    std::vector<double> clipped = affine_point_;
    project_cone(clipped);
    r.variables = unpack(clipped, dims_);
    r.image = problem_.map.apply_adjoint(r.variables);
  }
  return r;
}

SolveResult solve(const FeasibilityProblem& problem, const SolveOptions& options) {
  FeasibilitySolver solver(problem, options);
  solver.advance(options.max_iters + 1);
  return solver.result();
}

}  // namespace cone_lpv
