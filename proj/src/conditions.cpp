#include "cone_lpv/conditions.hpp"

#include <chrono>
#include <optional>

#include "cone_lpv/errors.hpp"

namespace cone_lpv {

namespace {

std::vector<std::size_t> repeat(std::size_t n, std::size_t count) {
  return std::vector<std::size_t>(count, n);
}

MapTerm identity_term(std::size_t out, std::size_t var, std::size_t n, double sign = 1.0) {
  return {out, var, 0.5 * sign, Matrix::identity(n), Matrix::identity(n)};
}

// -0.5 * (L X L^T + L X L^T) = -L X L^T
MapTerm negative_congruence(std::size_t out, std::size_t var, const Matrix& l) {
  return {out, var, -0.5, l, l.transpose()};
}

// Coefficients of the functionals u_r^T (sum_k X_k) u_c, r <= c, where u_r
// are the columns of `u`, spread over the first `blocks` output blocks.
std::vector<LinearEquality> quadratic_zero(const Matrix& u, std::size_t blocks,
                                           const std::vector<std::size_t>& dims,
                                           const std::string& name) {
  std::vector<LinearEquality> out;
  const std::size_t n = u.rows();
  for (std::size_t r = 0; r < u.cols(); ++r)
    for (std::size_t c = r; c < u.cols(); ++c) {
      Matrix outer(n, n);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) outer(a, b) = u(a, r) * u(b, c);
      const SymMatrix coef(outer);
      std::vector<SymMatrix> blk;
      for (std::size_t k = 0; k < dims.size(); ++k)
        blk.push_back(k < blocks ? coef : SymMatrix::zero(dims[k]));
      out.push_back({BlockDiagSym(std::move(blk)), 0.0,
                     name + "(" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ")"});
    }
  return out;
}

LinearEquality trace_equality(const std::vector<std::size_t>& dims, std::size_t first,
                              std::size_t count, double target, std::string label) {
  std::vector<SymMatrix> blk;
  for (std::size_t k = 0; k < dims.size(); ++k)
    blk.push_back(k >= first && k < first + count ? SymMatrix::identity(dims[k])
                                                   : SymMatrix::zero(dims[k]));
  return {BlockDiagSym(std::move(blk)), target, std::move(label)};
}

LinearMatrixMap build_map(const PolytopicSystem& system, Analysis analysis) {
  const std::size_t n = system.state_dim();
  const std::size_t nv = system.vertex_count();
  const int N = static_cast<int>(nv);
  const auto& A = system.vertices;

  if (analysis == Analysis::ct_cqlf) {
    LinearMatrixMap map({n}, repeat(n, nv + 1));
    for (std::size_t i = 0; i < nv; ++i)
      map.add_term({i, 0, -1.0, A[i].transpose(), Matrix::identity(n)});
    map.add_term(identity_term(nv, 0, n));
    return map;
  }

  LinearMatrixMap map(repeat(n, nv), repeat(n, nv * nv + nv));
  std::vector<SymMatrix> offset(nv * nv + nv, SymMatrix::zero(n));
  SymMatrix a0 = SymMatrix::zero(n);
  if (analysis == Analysis::detectability) a0 = SymMatrix(system.C->transpose() * *system.C);
  if (analysis == Analysis::stabilizability) a0 = SymMatrix(*system.B * system.B->transpose());

  for (int j = 1; j <= N; ++j)
    for (int i = 1; i <= N; ++i) {
      const std::size_t out = std::size_t(pair_to_flat({i, j}, N) - 1);
      const std::size_t vi = std::size_t(i - 1), vj = std::size_t(j - 1);
      if (analysis == Analysis::stabilizability) {
        map.add_term(identity_term(out, vj, n));
        map.add_term(negative_congruence(out, vi, A[vi]));
      } else {
        map.add_term(identity_term(out, vj, n));
        map.add_term(negative_congruence(out, vi, A[vj].transpose()));
      }
      offset[out] = a0;
    }
  for (std::size_t i = 0; i < nv; ++i) map.add_term(identity_term(nv * nv + i, i, n));
  map.set_offset(BlockDiagSym(std::move(offset)));
  return map;
}

}  // namespace

FeasibilityProblem build(const PolytopicSystem& system, Analysis analysis, Side side) {
  require_valid(system);
  require_supports(system, analysis);
  const std::size_t n = system.state_dim();
  const std::size_t nv = system.vertex_count();

  FeasibilityProblem p;
  p.side = side;
  p.map = build_map(system, analysis);

  if (side == Side::primal) {
    // Homogeneous families are scale invariant; pin the scale so the
    // strictness floor is meaningful.
    if (!p.map.has_offset()) {
      const auto& in = p.map.input_dims();
      p.equalities.push_back(
          trace_equality(in, 0, in.size(), double(n * in.size()), "trace normalization"));
    }
    return p;
  }

  const auto& out = p.map.output_dims();
  const std::size_t dual_blocks = analysis == Analysis::ct_cqlf ? nv : nv * nv;
  p.equalities.push_back(trace_equality(out, 0, dual_blocks, 1.0, "trace normalization"));
  if (analysis == Analysis::detectability) {
    auto eqs = quadratic_zero(system.C->transpose(), dual_blocks, out, "C*sumQ*C^T");
    p.equalities.insert(p.equalities.end(), eqs.begin(), eqs.end());
  }
  if (analysis == Analysis::stabilizability) {
    auto eqs = quadratic_zero(*system.B, dual_blocks, out, "B^T*sumQ*B");
    p.equalities.insert(p.equalities.end(), eqs.begin(), eqs.end());
  }
  return p;
}

ExistenceCertificate existence_from(const PolytopicSystem& system, Analysis analysis,
                                    const SolveResult& primal) {
  (void)system;
  if (primal.side != Side::primal) throw ContractError("existence_from: expected a primal result");
  return {analysis, primal.variables.blocks()};
}

NonexistenceCertificate nonexistence_from(const PolytopicSystem& system, Analysis analysis,
                                          const SolveResult& dual) {
  if (dual.side != Side::dual) throw ContractError("nonexistence_from: expected a dual result");
  const std::size_t nv = system.vertex_count();
  const int N = static_cast<int>(nv);
  NonexistenceCertificate cert;
  cert.analysis = analysis;
  const auto& R = dual.variables;
  if (analysis == Analysis::ct_cqlf) {
    for (std::size_t i = 0; i < nv; ++i) cert.mode_weights.push_back(R[i]);
  } else {
    for (int j = 1; j <= N; ++j)
      for (int i = 1; i <= N; ++i)
        cert.blocks.emplace(VertexPair{i, j}, R[std::size_t(pair_to_flat({i, j}, N) - 1)]);
  }
  const double t = cert.total_trace();
  if (t > 0.0) cert = cert.scaled(1.0 / t);
  cert.normalization = 1.0;
  if (analysis == Analysis::ct_cqlf) cert.r0 = ct_implied_r0(system, cert);
  return cert;
}

Verdict analyze(const PolytopicSystem& system, Analysis analysis, const AnalyzeOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  FeasibilitySolver primal(build(system, analysis, Side::primal), options.solve);
  // A dual with no affine solution admits no certificate of nonexistence.
  std::optional<FeasibilitySolver> dual;
  try {
    dual.emplace(build(system, analysis, Side::dual), options.solve);
  } catch (const InconsistentEqualities&) {
  }

  Verdict v;
  v.analysis = analysis;
  auto finish = [&](Verdict& out) -> Verdict& {
    out.diagnostics.primal_iterations = primal.iterations();
    out.diagnostics.dual_iterations = dual ? dual->iterations() : 0;
    out.diagnostics.primal_residual = primal.result().residual;
    out.diagnostics.dual_residual = dual ? dual->result().residual : 0.0;
    out.diagnostics.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  };

  auto try_primal = [&]() -> bool {
    const SolveResult res = primal.result();
    if (res.residual > 0.0) return false;
    ExistenceCertificate cert = existence_from(system, analysis, res);
    if (!verify_existence(system, cert, options.tol_margin).passed) return false;
    v.outcome = analysis == Analysis::stabilizability ? Outcome::necessary_condition_feasible
                                                      : Outcome::existence_proven;
    v.existence = std::move(cert);
    return true;
  };
  auto try_dual = [&]() -> bool {
    const SolveResult res = dual->result();
    NonexistenceCertificate cert = nonexistence_from(system, analysis, res);
    if (!verify_nonexistence(system, cert, options.tol_psd, options.tol_eq).passed) return false;
    v.outcome = Outcome::nonexistence_proven;
    v.nonexistence = std::move(cert);
    return true;
  };

  std::size_t budget = std::max<std::size_t>(1, options.initial_budget);
  auto dual_running = [&] { return dual && !dual->done(); };
  while (!primal.done() || dual_running()) {
    if (!primal.done()) {
      primal.advance(budget);
      if (try_primal()) return finish(v);
    }
    if (dual_running()) {
      dual->advance(budget);
      if (try_dual()) return finish(v);
    }
    budget *= 2;
  }
  v.outcome = Outcome::inconclusive;
  return finish(v);
}

}  // namespace cone_lpv
