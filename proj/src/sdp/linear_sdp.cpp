#include "sfa/sdp/linear_sdp.hpp"

#include <limits>
#include <string>

#include "sfa/errors.hpp"
#include "sfa/json_io.hpp"

namespace sfa::sdp {

LinearSdp::LinearSdp(std::size_t n)
    : num_vars(n), objective(Vector::Zero(static_cast<Eigen::Index>(n))), var_names(n) {
  for (std::size_t j = 0; j < n; ++j) var_names[j] = "y" + std::to_string(j);
}

std::size_t LinearSdp::add_block(Matrix F0, std::string label) {
  const Eigen::Index d = F0.rows();
  SdpBlock block{std::move(label), std::move(F0), {}};
  block.F.assign(num_vars, Matrix::Zero(d, d));
  blocks.push_back(std::move(block));
  return blocks.size() - 1;
}

std::size_t LinearSdp::add_nonnegative(std::size_t var, std::string label) {
  const std::size_t b = add_block(Matrix::Zero(1, 1), label.empty() ? var_names.at(var) + ">=0" : std::move(label));
  coefficient(b, var)(0, 0) = 1.0;
  return b;
}

Matrix& LinearSdp::coefficient(std::size_t block, std::size_t var) {
  return blocks.at(block).F.at(var);
}

const Matrix& LinearSdp::coefficient(std::size_t block, std::size_t var) const {
  return blocks.at(block).F.at(var);
}

Matrix LinearSdp::evaluate(std::size_t block, const Vector& y) const {
  const SdpBlock& b = blocks.at(block);
  if (static_cast<std::size_t>(y.size()) != num_vars) {
    throw ContractError("LinearSdp::evaluate: decision vector has wrong length");
  }
  Matrix out = b.F0;
  for (std::size_t j = 0; j < num_vars; ++j) {
    if (y(static_cast<Eigen::Index>(j)) != 0.0) out += y(static_cast<Eigen::Index>(j)) * b.F[j];
  }
  return 0.5 * (out + out.transpose());
}

double LinearSdp::min_eigenvalue_at(const Vector& y) const {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    lo = std::min(lo, sfa::min_eigenvalue(evaluate(b, y)));
  }
  return lo;
}

std::size_t LinearSdp::total_dimension() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += static_cast<std::size_t>(b.dim());
  return n;
}

void LinearSdp::validate() const {
  if (static_cast<std::size_t>(objective.size()) != num_vars) {
    throw ContractError("LinearSdp: objective length differs from num_vars");
  }
  for (const auto& b : blocks) {
    if (b.dim() < 1) throw ContractError("LinearSdp: block '" + b.label + "' is empty");
    if (b.F.size() != num_vars) {
      throw ContractError("LinearSdp: block '" + b.label + "' has wrong coefficient count");
    }
    if (asymmetry(b.F0) > kSymmetryTol) {
      throw ContractError("LinearSdp: block '" + b.label + "' constant term is not symmetric");
    }
    for (const auto& Fj : b.F) {
      if (Fj.rows() != b.dim() || Fj.cols() != b.dim()) {
        throw ContractError("LinearSdp: block '" + b.label + "' coefficient has wrong shape");
      }
      if (asymmetry(Fj) > kSymmetryTol) {
        throw ContractError("LinearSdp: block '" + b.label + "' coefficient is not symmetric");
      }
    }
  }
}

nlohmann::json to_json(const LinearSdp& problem) {
  nlohmann::json j;
  j["num_vars"] = problem.num_vars;
  j["objective"] = vector_to_json(problem.objective);
  j["var_names"] = problem.var_names;
  j["blocks"] = nlohmann::json::array();
  for (const auto& b : problem.blocks) {
    nlohmann::json jb;
    jb["label"] = b.label;
    jb["F0"] = matrix_to_json(b.F0);
    jb["F"] = nlohmann::json::array();
    for (const auto& Fj : b.F) jb["F"].push_back(matrix_to_json(Fj));
    j["blocks"].push_back(std::move(jb));
  }
  return j;
}

LinearSdp sdp_from_json(const nlohmann::json& j) {
  try {
    LinearSdp p(j.at("num_vars").get<std::size_t>());
    p.objective = vector_from_json(j.at("objective"), "objective");
    if (j.contains("var_names")) p.var_names = j.at("var_names").get<std::vector<std::string>>();
    for (const auto& jb : j.at("blocks")) {
      const std::size_t b = p.add_block(matrix_from_json(jb.at("F0"), "F0"), jb.value("label", ""));
      const auto& jf = jb.at("F");
      if (jf.size() != p.num_vars) throw ConfigError("sdp json: coefficient count mismatch");
      for (std::size_t v = 0; v < p.num_vars; ++v) p.coefficient(b, v) = matrix_from_json(jf[v], "F");
    }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sdp json: ") + e.what());
  }
}

}  // namespace sfa::sdp
