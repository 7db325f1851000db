#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace cone_lpv {

/// Raised when a caller violates a documented precondition (dimension
/// mismatch, out-of-range index, missing B or C for an analysis).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine fails (iteration cap in an eigensolver,
/// NaN or overflow in the feasibility engine).
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what,
                            std::optional<std::size_t> block = std::nullopt)
      : std::runtime_error(block ? what + " (block " + std::to_string(*block) + ")"
                                 : what),
        block_(block) {}

  std::optional<std::size_t> block() const { return block_; }

 private:
  std::optional<std::size_t> block_;
};

}  // namespace cone_lpv
