#include "cone_lpv/jsr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cone_lpv/errors.hpp"

namespace cone_lpv::jsr {

double spectral_radius(const Matrix& a) {
  if (a.rows() != a.cols()) throw ContractError("spectral_radius: matrix is not square");
  if (!a.all_finite()) throw ContractError("spectral_radius: non-finite entry");
  double r = 0.0;
  for (const auto& z : eig_general(a)) r = std::max(r, std::abs(z));
  return r;
}

namespace {

struct Walker {
  const std::vector<Matrix>& vertices;
  std::size_t max_depth;
  std::vector<DepthBounds> levels;
  std::vector<std::vector<int>> level_witness;
  std::vector<double> max_norm;
  std::vector<int> word;
  std::size_t products = 0;

  void visit(const Matrix& product) {
    const std::size_t t = word.size();
    ++products;
    const double rho = std::pow(spectral_radius(product), 1.0 / double(t));
    if (rho > levels[t - 1].lower || level_witness[t - 1].empty()) {
      levels[t - 1].lower = rho;
      level_witness[t - 1] = word;
    }
    max_norm[t - 1] = std::max(max_norm[t - 1], spectral_norm(product));
    if (t == max_depth) return;
    for (std::size_t k = 0; k < vertices.size(); ++k) {
      word.push_back(int(k + 1));
      visit(vertices[k] * product);
      word.pop_back();
    }
  }
};

}  // namespace

JsrBounds bounds(const PolytopicSystem& system, std::size_t max_depth) {
  require_valid(system);
  if (max_depth == 0) throw ContractError("jsr bounds: max_depth must be at least 1");
  const std::size_t nv = system.vertex_count();
  std::size_t words = 1;
  for (std::size_t t = 0; t < max_depth; ++t) {
    if (words > kMaxWords / nv)
      throw ContractError("jsr bounds: " + std::to_string(nv) + "^" + std::to_string(max_depth) +
                          " products exceed the enumeration budget of 2^24");
    words *= nv;
  }

  Walker w{system.vertices, max_depth, std::vector<DepthBounds>(max_depth),
           std::vector<std::vector<int>>(max_depth), std::vector<double>(max_depth, 0.0), {}, 0};
  for (std::size_t k = 0; k < nv; ++k) {
    w.word.push_back(int(k + 1));
    w.visit(system.vertices[k]);
    w.word.pop_back();
  }

  JsrBounds out;
  out.depth = max_depth;
  out.products = w.products;
  out.upper = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < max_depth; ++t) {
    DepthBounds& d = w.levels[t];
    d.depth = t + 1;
    d.upper = std::pow(w.max_norm[t], 1.0 / double(t + 1));
    // The joint spectral radius of a single matrix is its spectral radius.
    if (nv == 1) d.upper = w.levels[0].lower;
    if (t == 0 || d.lower > out.lower) {
      out.lower = d.lower;
      out.witness_word = w.level_witness[t];
    }
    out.upper = std::min(out.upper, d.upper);
    out.per_depth.push_back(d);
  }
  return out;
}

}  // namespace cone_lpv::jsr
