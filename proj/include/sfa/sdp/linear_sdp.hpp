#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "sfa/linalg.hpp"

namespace sfa::sdp {

// One matrix inequality F0 + sum_j y_j F_j >= 0. `F` always has one entry per
// decision variable; variables that do not enter the block keep a zero matrix.
struct SdpBlock {
  std::string label;
  Matrix F0;
  std::vector<Matrix> F;

  Eigen::Index dim() const { return F0.rows(); }
};

// minimize c^T y  subject to  F0_b + sum_j y_j F_j,b >= 0 for every block b.
struct LinearSdp {
  explicit LinearSdp(std::size_t num_vars = 0);

  std::size_t num_vars;
  Vector objective;
  std::vector<std::string> var_names;
  std::vector<SdpBlock> blocks;

  // Appends a block with constant term F0 and zero coefficients; returns its index.
  std::size_t add_block(Matrix F0, std::string label = {});
  // Appends a 1x1 block y_var >= 0.
  std::size_t add_nonnegative(std::size_t var, std::string label = {});

  Matrix& coefficient(std::size_t block, std::size_t var);
  const Matrix& coefficient(std::size_t block, std::size_t var) const;

  // F0_b + sum_j y_j F_j,b.
  Matrix evaluate(std::size_t block, const Vector& y) const;
  // Smallest eigenvalue over all evaluated blocks (+inf with no blocks).
  double min_eigenvalue_at(const Vector& y) const;

  std::size_t total_dimension() const;

  // Throws ContractError on asymmetric pencils, empty blocks, or a coefficient
  // count that differs from num_vars.
  void validate() const;
};

// Debug dump: blocks as dense row-major nested arrays.
nlohmann::json to_json(const LinearSdp& problem);
LinearSdp sdp_from_json(const nlohmann::json& j);

}  // namespace sfa::sdp
