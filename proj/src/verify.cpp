#include "cone_lpv/verify.hpp"

#include <cmath>
#include <string>

#include "cone_lpv/errors.hpp"

namespace cone_lpv {

namespace {

std::string pair_label(const char* name, int i, int j) {
  return std::string(name) + "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

std::string index_label(const char* name, std::size_t i) {
  return std::string(name) + "_" + std::to_string(i);
}

ConstraintMargin strict_psd(std::string label, const SymMatrix& m, double tol) {
  ConstraintMargin c;
  c.label = std::move(label);
  c.value = min_eigenvalue(m);
  c.bound = tol * (1.0 + m.frobenius_norm());
  c.kind = ConstraintMargin::Kind::at_least;
  c.passed = c.value >= c.bound;
  return c;
}

ConstraintMargin relaxed_psd(std::string label, const SymMatrix& m, double tol) {
  ConstraintMargin c;
  c.label = std::move(label);
  c.value = min_eigenvalue(m);
  c.bound = -tol * (1.0 + m.frobenius_norm());
  c.kind = ConstraintMargin::Kind::at_least;
  c.passed = c.value >= c.bound;
  return c;
}

ConstraintMargin zero_residual(std::string label, const Matrix& residual, double tol, double scale) {
  ConstraintMargin c;
  c.label = std::move(label);
  c.value = residual.frobenius_norm();
  c.bound = tol * (1.0 + scale);
  c.kind = ConstraintMargin::Kind::at_most;
  c.passed = c.value <= c.bound;
  return c;
}

void require_dims(const SymMatrix& m, std::size_t n, const std::string& what) {
  if (m.dim() != n)
    throw ContractError(what + " is " + std::to_string(m.dim()) + "x" + std::to_string(m.dim()) +
                        ", system state dimension is " + std::to_string(n));
}

void finish(VerificationReport& r) {
  r.passed = r.problems.empty();
  for (const auto& m : r.margins) r.passed = r.passed && m.passed;
}

}  // namespace

const ConstraintMargin* VerificationReport::worst() const {
  const ConstraintMargin* w = nullptr;
  for (const auto& m : margins)
    if (!w || m.slack() < w->slack()) w = &m;
  return w;
}

VerificationReport verify_existence(const PolytopicSystem& system,
                                    const ExistenceCertificate& cert, double tol) {
  require_valid(system);
  require_supports(system, cert.analysis);
  const std::size_t n = system.state_dim();
  const std::size_t nv = system.vertex_count();
  const std::size_t expected = cert.analysis == Analysis::ct_cqlf ? 1 : nv;
  if (cert.matrices.size() != expected)
    throw ContractError("existence certificate has " + std::to_string(cert.matrices.size()) +
                        " matrices, expected " + std::to_string(expected));
  for (std::size_t k = 0; k < cert.matrices.size(); ++k)
    require_dims(cert.matrices[k], n, "certificate matrix " + std::to_string(k + 1));

  VerificationReport r;
  r.analysis = cert.analysis;
  r.existence = true;
  const auto& A = system.vertices;
  const auto& P = cert.matrices;

  switch (cert.analysis) {
    case Analysis::stability:
    case Analysis::detectability: {
      const SymMatrix ctc = cert.analysis == Analysis::detectability
                                ? SymMatrix(system.C->transpose() * *system.C)
                                : SymMatrix::zero(n);
      for (std::size_t i = 0; i < nv; ++i) r.margins.push_back(strict_psd(index_label("P", i + 1), P[i], tol));
      for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
          const SymMatrix m = P[i] - congruence(A[i].transpose(), P[j]) + ctc;
          r.margins.push_back(strict_psd(pair_label("decrease", int(i + 1), int(j + 1)), m, tol));
        }
      break;
    }
    case Analysis::stabilizability: {
      const SymMatrix bbt(*system.B * system.B->transpose());
      for (std::size_t i = 0; i < nv; ++i) r.margins.push_back(strict_psd(index_label("S", i + 1), P[i], tol));
      for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
          const SymMatrix m = P[j] - congruence(A[i], P[i]) + bbt;
          r.margins.push_back(strict_psd(pair_label("decrease", int(i + 1), int(j + 1)), m, tol));
        }
      break;
    }
    case Analysis::ct_cqlf: {
      r.margins.push_back(strict_psd("P", P[0], tol));
      for (std::size_t i = 0; i < nv; ++i) {
        const Matrix ap = A[i].transpose() * P[0].matrix();
        const SymMatrix m(-1.0 * (ap + ap.transpose()));
        r.margins.push_back(strict_psd(index_label("lyapunov", i + 1), m, tol));
      }
      break;
    }
  }
  finish(r);
  return r;
}

SymMatrix dual_condition_block(const PolytopicSystem& system, Analysis analysis,
                               const NonexistenceCertificate& cert, int i) {
  const int nv = static_cast<int>(system.vertex_count());
  const auto& A = system.vertices;
  Matrix sum(system.state_dim(), system.state_dim());
  for (int j = 1; j <= nv; ++j) {
    const SymMatrix& qij = cert.blocks.at({i, j});
    const SymMatrix& qji = cert.blocks.at({j, i});
    const SymMatrix lifted = analysis == Analysis::stabilizability
                                 ? congruence(A[std::size_t(i - 1)].transpose(), qij)
                                 : congruence(A[std::size_t(j - 1)], qij);
    sum += lifted.matrix();
    sum -= qji.matrix();
  }
  return SymMatrix(sum);
}

SymMatrix ct_implied_r0(const PolytopicSystem& system, const NonexistenceCertificate& cert) {
  Matrix sum(system.state_dim(), system.state_dim());
  for (std::size_t i = 0; i < cert.mode_weights.size(); ++i) {
    const Matrix ar = system.vertices[i] * cert.mode_weights[i].matrix();
    sum += ar;
    sum += ar.transpose();
  }
  return SymMatrix(sum);
}

VerificationReport verify_nonexistence(const PolytopicSystem& system,
                                       const NonexistenceCertificate& cert, double tol_psd,
                                       double tol_eq) {
  require_valid(system);
  require_supports(system, cert.analysis);
  const std::size_t n = system.state_dim();
  const int nv = static_cast<int>(system.vertex_count());

  if (cert.analysis == Analysis::ct_cqlf) {
    if (cert.mode_weights.size() != system.vertex_count())
      throw ContractError("ct-cqlf certificate needs one weight per mode");
    for (std::size_t i = 0; i < cert.mode_weights.size(); ++i)
      require_dims(cert.mode_weights[i], n, index_label("R", i + 1));
    if (cert.r0) require_dims(*cert.r0, n, "R_0");
  } else {
    if (cert.blocks.size() != std::size_t(nv * nv))
      throw ContractError("nonexistence certificate has " + std::to_string(cert.blocks.size()) +
                          " blocks, expected N^2 = " + std::to_string(nv * nv));
    for (int j = 1; j <= nv; ++j)
      for (int i = 1; i <= nv; ++i) {
        const auto it = cert.blocks.find({i, j});
        if (it == cert.blocks.end())
          throw ContractError("nonexistence certificate is missing " + pair_label("Q", i, j));
        require_dims(it->second, n, pair_label("Q", i, j));
      }
  }

  VerificationReport r;
  r.analysis = cert.analysis;
  r.existence = false;
  if (!(cert.normalization > 0.0) || !std::isfinite(cert.normalization)) {
    r.problems.push_back("normalization must be positive and finite");
    finish(r);
    return r;
  }
  const NonexistenceCertificate q = cert.scaled(1.0 / cert.normalization);

  if (cert.analysis == Analysis::ct_cqlf) {
    const SymMatrix implied = ct_implied_r0(system, q);
    const SymMatrix r0 = q.r0 ? *q.r0 : implied;
    for (std::size_t i = 0; i < q.mode_weights.size(); ++i)
      r.margins.push_back(relaxed_psd(index_label("R", i + 1), q.mode_weights[i], tol_psd));
    r.margins.push_back(relaxed_psd("R_0", r0, tol_psd));
    double scale = r0.frobenius_norm();
    for (std::size_t i = 0; i < q.mode_weights.size(); ++i)
      scale += 2.0 * system.vertices[i].frobenius_norm() * q.mode_weights[i].frobenius_norm();
    r.margins.push_back(
        zero_residual("R_0 - sum(A_i R_i + R_i A_i^T)", r0.matrix() - implied.matrix(), tol_eq, scale));
  } else {
    for (int j = 1; j <= nv; ++j)
      for (int i = 1; i <= nv; ++i)
        r.margins.push_back(relaxed_psd(pair_label("Q", i, j), q.blocks.at({i, j}), tol_psd));
    for (int i = 1; i <= nv; ++i)
      r.margins.push_back(relaxed_psd("condition_" + std::to_string(i),
                                      dual_condition_block(system, cert.analysis, q, i), tol_psd));
    const SymMatrix sum = q.block_sum(n);
    if (cert.analysis == Analysis::detectability) {
      const Matrix& C = *system.C;
      const double scale = C.frobenius_norm() * C.frobenius_norm() * sum.frobenius_norm();
      r.margins.push_back(zero_residual("C*sumQ*C^T", C * sum.matrix() * C.transpose(), tol_eq, scale));
    }
    if (cert.analysis == Analysis::stabilizability) {
      const Matrix& B = *system.B;
      const double scale = B.frobenius_norm() * B.frobenius_norm() * sum.frobenius_norm();
      r.margins.push_back(zero_residual("B^T*sumQ*B", B.transpose() * sum.matrix() * B, tol_eq, scale));
    }
  }

  ConstraintMargin nonzero;
  nonzero.label = "trace(sumQ)";
  nonzero.value = q.total_trace();
  nonzero.bound = 0.5;
  nonzero.kind = ConstraintMargin::Kind::at_least;
  nonzero.passed = nonzero.value >= nonzero.bound;
  r.margins.push_back(nonzero);

  finish(r);
  return r;
}

}  // namespace cone_lpv
