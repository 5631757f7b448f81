#include <fstream>

#include "sfa/abstraction/abstraction.hpp"
#include "sfa/config.hpp"
#include "sfa/errors.hpp"
#include "sfa/json_io.hpp"

namespace sfa {

nlohmann::json abstraction_to_json(const AbstractionGraph& g) {
  nlohmann::json j;
  j["schema"] = "sfa-abstraction";
  j["version"] = kAbstractionSchemaVersion;
  j["system"] = system_to_json(g.system);
  j["cost_Q"] = matrix_to_json(g.cost.Q);

  nlohmann::json centers = nlohmann::json::array();
  for (const Ellipsoid& e : g.cover.cells) centers.push_back(vector_to_json(e.c));
  j["cover"] = {{"domain", box_to_json(g.cover.domain)},
                {"radius", g.cover.radius},
                {"counts", g.cover.counts},
                {"spacing", vector_to_json(g.cover.spacing)},
                {"centers", std::move(centers)},
                {"modes", g.cover.mode_of_cell}};
  j["goal_region"] = box_to_json(g.goal_region);
  j["obstacles"] = nlohmann::json::array();
  for (const Box& o : g.obstacles) j["obstacles"].push_back(box_to_json(o));
  j["goal_ids"] = g.goal_ids;
  j["blocked_ids"] = g.blocked_ids;

  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : g.edges) {
    edges.push_back({{"id", e.id},
                     {"source", e.source},
                     {"target", e.target},
                     {"cost_bound", e.cost_bound},
                     {"audit_worst_membership", e.audit_worst_membership},
                     {"controller", controller_to_json(e.controller)}});
  }
  j["edges"] = std::move(edges);
  j["stats"] = {{"candidate_pairs", g.stats.candidate_pairs},
                {"pruned_pairs", g.stats.pruned_pairs},
                {"infeasible", g.stats.infeasible},
                {"numerical_failures", g.stats.numerical_failures},
                {"audit_rejections", g.stats.audit_rejections},
                {"seconds", g.stats.seconds}};
  j["warnings"] = g.warnings;
  return j;
}

AbstractionGraph abstraction_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema", std::string{}) != "sfa-abstraction") {
    throw StorageError("not an abstraction file");
  }
  if (!j.contains("version") || !j.at("version").is_number_integer() ||
      j.at("version").get<int>() != kAbstractionSchemaVersion) {
    throw StorageError("unsupported abstraction schema version (expected " +
                       std::to_string(kAbstractionSchemaVersion) + ")");
  }
  try {
    PwaSystem system = system_from_json(j.at("system"));
    CostModel cost = CostModel::from_matrix(matrix_from_json(j.at("cost_Q"), "cost_Q"));

    const auto& jc = j.at("cover");
    CellCover cover;
    cover.domain = box_from_json(jc.at("domain"), "cover.domain");
    cover.radius = jc.at("radius").get<double>();
    cover.counts = jc.at("counts").get<std::vector<std::size_t>>();
    cover.spacing = vector_from_json(jc.at("spacing"), "cover.spacing");
    for (const auto& c : jc.at("centers")) cover.cells.push_back(Ellipsoid::ball(vector_from_json(c, "center"), cover.radius));
    cover.mode_of_cell = jc.at("modes").get<std::vector<std::size_t>>();
    if (cover.mode_of_cell.size() != cover.cells.size()) throw StorageError("cover: mode list length mismatch");

    std::vector<Box> obstacles;
    for (const auto& o : j.at("obstacles")) obstacles.push_back(box_from_json(o, "obstacle"));
    AbstractionGraph g{std::move(system), std::move(cost), std::move(cover), box_from_json(j.at("goal_region"), "goal_region"),
                       std::move(obstacles), {}, {}, {}, {}, {}};
    g.goal_ids = j.at("goal_ids").get<std::vector<std::size_t>>();
    g.blocked_ids = j.at("blocked_ids").get<std::vector<std::size_t>>();

    for (const auto& je : j.at("edges")) {
      Edge e;
      e.id = je.at("id").get<std::size_t>();
      e.source = je.at("source").get<std::size_t>();
      e.target = je.at("target").get<std::size_t>();
      e.cost_bound = je.at("cost_bound").get<double>();
      e.audit_worst_membership = je.at("audit_worst_membership").get<double>();
      e.controller = controller_from_json(je.at("controller"));
      if (e.id != g.edges.size() || e.source >= g.cover.size() || e.target >= g.cover.size()) {
        throw StorageError("edge " + std::to_string(g.edges.size()) + " is corrupt");
      }
      g.edges.push_back(std::move(e));
    }
    const auto& js = j.at("stats");
    g.stats.candidate_pairs = js.at("candidate_pairs").get<std::size_t>();
    g.stats.pruned_pairs = js.at("pruned_pairs").get<std::size_t>();
    g.stats.infeasible = js.at("infeasible").get<std::size_t>();
    g.stats.numerical_failures = js.at("numerical_failures").get<std::size_t>();
    g.stats.audit_rejections = js.at("audit_rejections").get<std::size_t>();
    g.stats.seconds = js.at("seconds").get<double>();
    g.warnings = j.at("warnings").get<std::vector<std::string>>();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw StorageError(std::string("corrupt abstraction file: ") + e.what());
  } catch (const ConfigError& e) {
    throw StorageError(std::string("corrupt abstraction file: ") + e.what());
  } catch (const ContractError& e) {
    throw StorageError(std::string("corrupt abstraction file: ") + e.what());
  }
}

void save_abstraction(const AbstractionGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw StorageError("cannot write '" + path + "'");
  out << abstraction_to_json(g).dump() << '\n';
  if (!out) throw StorageError("write failed for '" + path + "'");
}

AbstractionGraph load_abstraction(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StorageError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw StorageError("'" + path + "': " + e.what());
  }
  return abstraction_from_json(j);
}

}  // namespace sfa
