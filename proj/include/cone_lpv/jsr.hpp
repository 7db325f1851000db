#pragma once

// Brute-force joint spectral radius bounds by exhaustive enumeration of
// matrix products.

#include <cstddef>
#include <vector>

#include "cone_lpv/linalg.hpp"
#include "cone_lpv/model.hpp"

namespace cone_lpv::jsr {

/// Largest number of products bounds() will enumerate at its deepest level.
inline constexpr std::size_t kMaxWords = std::size_t(1) << 24;

/// max |lambda|. Throws ContractError for non-square or non-finite input.
double spectral_radius(const Matrix& a);

struct DepthBounds {
  std::size_t depth = 0;
  /// max over words w of length depth of rho(A_w)^(1/depth)
  double lower = 0.0;
  /// (max over words of ||A_w||_2)^(1/depth)
  double upper = 0.0;
};

struct JsrBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t depth = 0;
  /// 1-based vertex indices, leftmost factor applied last: A_w = A_{w_t} ... A_{w_1}.
  std::vector<int> witness_word;
  std::vector<DepthBounds> per_depth;
  std::size_t products = 0;
};

/// lower = best spectral-radius bound over depths 1..max_depth, upper = best
/// norm bound. Throws ContractError if max_depth is 0 or N^max_depth exceeds
/// kMaxWords.
JsrBounds bounds(const PolytopicSystem& system, std::size_t max_depth);

}  // namespace cone_lpv::jsr
