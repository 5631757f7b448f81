#include "sfa/planner/value_planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>
#include <tuple>

#include "sfa/errors.hpp"

namespace sfa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ValueFunction reverse_dijkstra(const AbstractionGraph& graph) {
  const std::size_t n = graph.cover.size();
  ValueFunction vf;
  vf.values.assign(n, kInf);
  vf.policy.assign(n, kNoEdge);
  vf.goal_ids = graph.goal_ids;

  std::vector<std::vector<std::size_t>> incoming(n);
  for (const Edge& e : graph.edges) {
    if (e.cost_bound < 0.0) throw ContractError("reverse_dijkstra: negative edge cost");
    incoming[e.target].push_back(e.id);
  }

  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (std::size_t g : graph.goal_ids) {
    vf.values[g] = 0.0;
    queue.emplace(0.0, g);
  }
  std::vector<char> done(n, 0);
  while (!queue.empty()) {
    const auto [v, u] = queue.top();
    queue.pop();
    if (done[u] || v > vf.values[u]) continue;
    done[u] = 1;
    for (std::size_t eid : incoming[u]) {
      const Edge& e = graph.edges[eid];
      const std::size_t s = e.source;
      if (done[s] || graph.is_goal(s)) continue;
      const double cand = v + e.cost_bound;
      const std::size_t cur = vf.policy[s];
      const bool better =
          cand < vf.values[s] ||
          (cand == vf.values[s] && cur != kNoEdge &&
           std::tie(u, eid) < std::tie(graph.edges[cur].target, graph.edges[cur].id));
      if (better) {
        vf.values[s] = cand;
        vf.policy[s] = eid;
        queue.emplace(cand, s);
      }
    }
  }
  return vf;
}

BellmanReport check_bellman(const AbstractionGraph& graph, const ValueFunction& vf) {
  BellmanReport rep;
  const std::size_t n = graph.cover.size();
  if (vf.values.size() != n || vf.policy.size() != n) throw ContractError("check_bellman: size mismatch");
  std::vector<std::vector<std::size_t>> outgoing(n);
  for (const Edge& e : graph.edges) outgoing[e.source].push_back(e.id);

  for (std::size_t s = 0; s < n; ++s) {
    if (!vf.finite(s)) continue;
    ++rep.cells_checked;
    if (graph.is_goal(s)) {
      if (vf.values[s] != 0.0) {
        rep.passed = false;
        rep.violations.push_back("goal cell " + std::to_string(s) + " has nonzero value");
      }
      continue;
    }
    bool ok = false;
    for (std::size_t eid : outgoing[s]) {
      const Edge& e = graph.edges[eid];
      if (vf.finite(e.target) && vf.values[s] >= e.cost_bound + vf.values[e.target] - 1e-9) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      rep.passed = false;
      const std::size_t eid = vf.policy[s];
      rep.violations.push_back("cell " + std::to_string(s) + ": no edge satisfies the Bellman inequality" +
                               (eid == kNoEdge ? std::string(" (no policy edge)")
                                               : " (policy edge " + std::to_string(eid) + ")"));
      continue;
    }
    const std::size_t eid = vf.policy[s];
    if (eid == kNoEdge || eid >= graph.edges.size() || graph.edges[eid].source != s) {
      rep.passed = false;
      rep.violations.push_back("cell " + std::to_string(s) + ": missing or foreign policy edge");
      continue;
    }
    const Edge& e = graph.edges[eid];
    const double diff = vf.values[s] - e.cost_bound - vf.values[e.target];
    if (std::abs(diff) > 1e-12 * std::max(1.0, vf.values[s])) {
      rep.passed = false;
      rep.violations.push_back("cell " + std::to_string(s) + ": policy edge " + std::to_string(eid) +
                               " is off by " + format_double(diff));
    }
  }
  return rep;
}

double concretize_value(const ValueFunction& vf, const CellCover& cover, const Vector& x) {
  const std::vector<std::size_t> ids = cover.cells_containing(x);
  if (ids.empty()) throw DomainError("concretize_value: state lies in no cell");
  double best = kInf;
  for (std::size_t id : ids) best = std::min(best, vf.values[id]);
  return best;
}

PolicyStep policy_lookup(const ValueFunction& vf, const CellCover& cover, const AbstractionGraph& graph,
                         const Vector& x) {
  const std::vector<std::size_t> ids = cover.cells_containing(x);
  std::size_t best = kNoEdge;
  for (std::size_t id : ids) {
    if (vf.finite(id) && (best == kNoEdge || vf.values[id] < vf.values[best])) best = id;
  }
  if (best == kNoEdge) throw PolicyError("policy_lookup: no finite-valued cell contains the state");
  PolicyStep step;
  step.cell = best;
  if (graph.is_goal(best)) {
    step.terminal = true;
    return step;
  }
  step.edge = vf.policy[best];
  if (step.edge == kNoEdge) throw PolicyError("policy_lookup: cell " + std::to_string(best) + " has no policy edge");
  const Edge& e = graph.edges.at(step.edge);
  step.target = e.target;
  step.controller = &e.controller;
  return step;
}

void write_values_csv(const ValueFunction& vf, const CellCover& cover, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "cell_id";
  for (Eigen::Index j = 0; j < cover.domain.dim(); ++j) out << ",x" << j;
  out << ",value,policy_edge_id\n";
  for (std::size_t i = 0; i < vf.values.size(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < cover.domain.dim(); ++j) out << ',' << format_double(cover.center(i)(j));
    out << ',' << (vf.finite(i) ? format_double(vf.values[i]) : "unreachable") << ',';
    if (vf.policy[i] != kNoEdge) out << vf.policy[i];
    out << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

ValueFunction read_values_csv(const std::string& path, const AbstractionGraph& graph) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  const std::size_t n = graph.cover.size();
  const auto dim = static_cast<std::size_t>(graph.cover.domain.dim());
  ValueFunction vf;
  vf.values.assign(n, kInf);
  vf.policy.assign(n, kNoEdge);
  vf.goal_ids = graph.goal_ids;
  std::string line;
  std::getline(in, line);
  std::vector<char> seen(n, 0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != dim + 3) throw ConfigError("values file: malformed row '" + line + "'");
    const std::size_t id = std::stoul(f[0]);
    if (id >= n || seen[id]) throw ConfigError("values file: bad or repeated cell id " + f[0]);
    seen[id] = 1;
    vf.values[id] = f[dim + 1] == "unreachable" ? kInf : std::stod(f[dim + 1]);
    if (!f[dim + 2].empty()) {
      vf.policy[id] = std::stoul(f[dim + 2]);
      if (vf.policy[id] >= graph.edges.size() || graph.edges[vf.policy[id]].source != id) {
        throw ConfigError("values file: policy edge of cell " + f[0] + " does not leave that cell");
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw ConfigError("values file: missing cells");
  return vf;
}

}  // namespace sfa
