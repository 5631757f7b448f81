#include "sfa/config.hpp"

#include <string>

#include "sfa/errors.hpp"
#include "sfa/json_io.hpp"

namespace sfa {

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(what + ": missing '" + key + "'");
  return j.at(key);
}

HalfSpace::Op parse_op(const std::string& s) {
  if (s == "<=") return HalfSpace::Op::Le;
  if (s == "<") return HalfSpace::Op::Lt;
  if (s == ">=") return HalfSpace::Op::Ge;
  if (s == ">") return HalfSpace::Op::Gt;
  throw ConfigError("partition: unknown comparison '" + s + "'");
}

const char* op_name(HalfSpace::Op op) {
  switch (op) {
    case HalfSpace::Op::Le: return "<=";
    case HalfSpace::Op::Lt: return "<";
    case HalfSpace::Op::Ge: return ">=";
    case HalfSpace::Op::Gt: return ">";
  }
  return "?";
}

}  // namespace

Box box_from_json(const nlohmann::json& j, const std::string& what) {
  Box b{vector_from_json(field(j, "lower", what), what + ".lower"),
        vector_from_json(field(j, "upper", what), what + ".upper")};
  if (b.lower.size() != b.upper.size()) throw ConfigError(what + ": lower/upper length mismatch");
  if ((b.upper.array() < b.lower.array()).any()) throw ConfigError(what + ": upper below lower");
  return b;
}

nlohmann::json box_to_json(const Box& box) {
  return {{"lower", vector_to_json(box.lower)}, {"upper", vector_to_json(box.upper)}};
}

AffineMode mode_from_json(const nlohmann::json& j, const std::string& what) {
  AffineMode m;
  m.A = matrix_from_json(field(j, "A", what), what + ".A");
  m.B = matrix_from_json(field(j, "B", what), what + ".B");
  m.g = vector_from_json(field(j, "g", what), what + ".g");
  return m;
}

nlohmann::json mode_to_json(const AffineMode& mode) {
  return {{"A", matrix_to_json(mode.A)}, {"B", matrix_to_json(mode.B)}, {"g", vector_to_json(mode.g)}};
}

PwaSystem system_from_json(const nlohmann::json& j) {
  try {
    const auto& jm = field(j, "modes", "system");
    if (!jm.is_array() || jm.empty()) throw ConfigError("system: 'modes' must be a non-empty array");
    std::vector<AffineMode> modes;
    for (std::size_t i = 0; i < jm.size(); ++i) modes.push_back(mode_from_json(jm[i], "modes[" + std::to_string(i) + "]"));

    std::vector<Region> partition;
    if (j.contains("partition")) {
      for (const auto& jr : j.at("partition")) {
        Region r;
        for (const auto& jh : jr) {
          r.constraints.push_back(HalfSpace{jh.at("axis").get<Eigen::Index>(), parse_op(jh.at("op").get<std::string>()),
                                            jh.at("bound").get<double>()});
        }
        partition.push_back(std::move(r));
      }
    } else if (modes.size() == 1) {
      partition.emplace_back();
    } else {
      throw ConfigError("system: 'partition' is required with more than one mode");
    }

    const Box domain = box_from_json(field(j, "domain", "system"), "domain");
    const Box input = box_from_json(field(j, "input_box", "system"), "input_box");
    std::vector<Box> noise;
    const auto& jn = field(j, "noise_box", "system");
    if (jn.is_array()) {
      for (std::size_t i = 0; i < jn.size(); ++i) noise.push_back(box_from_json(jn[i], "noise_box[" + std::to_string(i) + "]"));
    } else {
      noise.assign(modes.size(), box_from_json(jn, "noise_box"));
    }
    return PwaSystem(std::move(modes), std::move(partition), domain, input, std::move(noise));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("system: ") + e.what());
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
}

nlohmann::json system_to_json(const PwaSystem& system) {
  nlohmann::json j;
  j["modes"] = nlohmann::json::array();
  j["partition"] = nlohmann::json::array();
  j["noise_box"] = nlohmann::json::array();
  for (std::size_t i = 0; i < system.num_modes(); ++i) {
    j["modes"].push_back(mode_to_json(system.mode(i)));
    nlohmann::json region = nlohmann::json::array();
    for (const HalfSpace& h : system.region(i).constraints) {
      region.push_back({{"axis", h.axis}, {"op", op_name(h.op)}, {"bound", h.bound}});
    }
    j["partition"].push_back(std::move(region));
    j["noise_box"].push_back(box_to_json(system.noise_box(i)));
  }
  j["domain"] = box_to_json(system.domain());
  j["input_box"] = box_to_json(system.input_box());
  return j;
}

CostModel cost_from_json(const nlohmann::json& j) {
  try {
    return CostModel::from_matrix(matrix_from_json(field(j, "cost_Q", "config"), "cost_Q"));
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace sfa
