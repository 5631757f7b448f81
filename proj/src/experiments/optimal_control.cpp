#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

#include "sfa/config.hpp"
#include "sfa/errors.hpp"
#include "sfa/experiments/experiments.hpp"
#include "sfa/json_io.hpp"

namespace sfa {

namespace {

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  std::atomic<std::size_t> next{0};
  const auto work = [&]() {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

const nlohmann::json& required(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("scenario: missing '") + key + "'");
  return j.at(key);
}

}  // namespace

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s{system_from_json(j), cost_from_json(j), 0, {}, {}, {}, {}, 0};
  try {
    s.cell_radius = required(j, "cell_radius").get<double>();
    s.goal = box_from_json(required(j, "goal"), "goal");
    s.initial = box_from_json(required(j, "initial"), "initial");
    for (const auto& o : required(j, "obstacles")) s.obstacles.push_back(box_from_json(o, "obstacle"));
    s.x0 = vector_from_json(required(j, "x0"), "x0");
    const long long n = required(j, "seeds").get<long long>();
    if (n < 0) throw ConfigError("scenario: 'seeds' must be non-negative");
    s.rollouts = static_cast<std::size_t>(n);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  const Eigen::Index n = s.system.state_dim();
  if (!(s.cell_radius > 0)) throw ConfigError("scenario: 'cell_radius' must be positive");
  if (s.goal.dim() != n || s.initial.dim() != n || s.x0.size() != n)
    throw ConfigError("scenario: goal, initial and x0 must match the state dimension");
  for (const Box& o : s.obstacles)
    if (o.dim() != n) throw ConfigError("scenario: obstacle dimension mismatch");
  if (!s.initial.contains(s.x0)) throw ConfigError("scenario: x0 lies outside the initial box");
  return s;
}

EdgeAuditSummary audit_all_edges(const AbstractionGraph& graph, const AuditOptions& opt, unsigned threads) {
  EdgeAuditSummary sum;
  sum.edges = graph.edges.size();
  std::vector<AuditReport> reports(graph.edges.size());
  parallel_for(graph.edges.size(), threads, [&](std::size_t i) {
    const Edge& e = graph.edges[i];
    AuditOptions ao = opt;
    ao.seed = mix(opt.seed + 0x51ed27 * (i + 1));
    reports[i] = audit_transition(e.controller, transition_data(graph.system, graph.cover, e.source, e.target),
                                  graph.cost, ao);
  });
  for (std::size_t i = 0; i < reports.size(); ++i) {
    sum.worst_membership = std::max(sum.worst_membership, reports[i].worst_membership);
    if (!reports[i].passed) {
      ++sum.failed;
      if (sum.failures.size() < 20) sum.failures.push_back("edge " + std::to_string(i) + ": " + reports[i].failure);
    }
  }
  return sum;
}

RolloutRecord run_certified_rollout(const AbstractionGraph& graph, const ValueFunction& vf, const Vector& x0,
                                    std::uint64_t seed, const RolloutOptions& opt) {
  RolloutRecord rec;
  rec.seed = seed;
  try {
    rec.rollout = rollout(graph, vf, x0, seed, opt);
  } catch (const Error& e) {
    rec.failure = e.what();
    return rec;
  }
  const Rollout& r = rec.rollout;
  if (!r.reached_goal) {
    rec.failure = "did not reach the goal within " + std::to_string(opt.max_steps) + " steps";
    return rec;
  }
  if (!graph.goal_region.contains(r.states.back(), kMembershipTol)) {
    rec.failure = "final state outside the goal region";
    return rec;
  }
  for (std::size_t k = 0; k < r.states.size(); ++k) {
    for (const Box& o : graph.obstacles) {
      if (o.contains(r.states[k])) {
        rec.failure = "state " + std::to_string(k) + " inside an obstacle";
        return rec;
      }
    }
  }
  const CostCertificate cert = certify_cost(r);
  if (!cert.passed) {
    rec.failure = cert.failure;
    return rec;
  }
  rec.certified = true;
  return rec;
}

std::vector<RolloutRecord> run_rollouts(const AbstractionGraph& graph, const ValueFunction& vf, const Vector& x0,
                                        std::uint64_t first_seed, std::size_t count, const RolloutOptions& opt,
                                        unsigned threads) {
  std::vector<RolloutRecord> out(count);
  parallel_for(count, threads,
               [&](std::size_t i) { out[i] = run_certified_rollout(graph, vf, x0, first_seed + i, opt); });
  return out;
}

ExperimentResult run_optimal_control_experiment(const Scenario& sc, const ExperimentOptions& opt) {
  BuildOptions bo = opt.build;
  bo.threads = std::max(bo.threads, opt.threads);
  ExperimentResult res{build_abstraction(sc.system, sc.cost, build_cover(sc.system.domain(), sc.cell_radius), sc.goal,
                                         sc.obstacles, bo),
                       {}, {}, {}, 0, 0, {}, {}};
  const AbstractionGraph& g = res.graph;
  if (g.stats.numerical_failures)
    res.failures.push_back(std::to_string(g.stats.numerical_failures) + " pairs ended in solver failure");
  if (g.stats.audit_rejections)
    res.failures.push_back(std::to_string(g.stats.audit_rejections) + " synthesized transitions failed their audit");
  if (g.goal_ids.empty()) res.failures.push_back("no cell fits inside the goal region");

  res.values = reverse_dijkstra(g);
  res.bellman = check_bellman(g, res.values);
  if (!res.bellman.passed)
    res.failures.push_back("Bellman check failed on " + std::to_string(res.bellman.violations.size()) + " cells");

  if (opt.reaudit) {
    AuditOptions ao = opt.build.audit;
    ao.seed = mix(opt.build.audit.seed ^ 0xfeed);
    res.audit = audit_all_edges(g, ao, opt.threads);
    if (res.audit.failed) res.failures.push_back(std::to_string(res.audit.failed) + " edges failed the re-audit");
  }

  res.value_at_x0 = concretize_value(res.values, g.cover, sc.x0);
  if (!std::isfinite(res.value_at_x0)) res.failures.push_back("x0 has no finite value");
  const int grid = 11;
  for (int a = 0; a < grid; ++a) {
    for (int b = 0; b < (sc.initial.dim() > 1 ? grid : 1); ++b) {
      Vector x = sc.initial.center();
      const int idx[2] = {a, b};
      for (Eigen::Index j = 0; j < std::min<Eigen::Index>(2, x.size()); ++j)
        x(j) = sc.initial.lower(j) + (sc.initial.upper(j) - sc.initial.lower(j)) * idx[j] / (grid - 1);
      res.worst_initial_value = std::max(res.worst_initial_value, concretize_value(res.values, g.cover, x));
    }
  }

  if (std::isfinite(res.value_at_x0)) {
    res.rollouts = run_rollouts(g, res.values, sc.x0, opt.seed, sc.rollouts, opt.rollout, opt.threads);
    std::size_t bad = 0;
    for (const RolloutRecord& r : res.rollouts) bad += !r.certified;
    if (bad) res.failures.push_back(std::to_string(bad) + " rollouts failed certification");
  }
  return res;
}

Table trajectories_table(const std::vector<RolloutRecord>& records) {
  Table t;
  std::size_t n = 0, m = 0;
  for (const RolloutRecord& r : records) {
    if (!r.rollout.states.empty()) n = static_cast<std::size_t>(r.rollout.states.front().size());
    if (!r.rollout.inputs.empty()) m = static_cast<std::size_t>(r.rollout.inputs.front().size());
  }
  t.header = {"seed", "step"};
  for (std::size_t j = 0; j < n; ++j) t.header.push_back("x" + std::to_string(j));
  for (std::size_t j = 0; j < m; ++j) t.header.push_back("u" + std::to_string(j));
  for (const char* h : {"cell_id", "target_cell_id", "stage_cost", "value_at_state"}) t.header.emplace_back(h);
  for (const RolloutRecord& rec : records) {
    const Rollout& r = rec.rollout;
    for (std::size_t k = 0; k < r.states.size(); ++k) {
      std::vector<std::string> row{std::to_string(rec.seed), std::to_string(k)};
      for (std::size_t j = 0; j < n; ++j) row.push_back(format_number(r.states[k](static_cast<Eigen::Index>(j))));
      const bool moved = k < r.inputs.size();
      for (std::size_t j = 0; j < m; ++j)
        row.push_back(moved ? format_number(r.inputs[k](static_cast<Eigen::Index>(j))) : "");
      row.push_back(moved ? std::to_string(r.cells[k].first) : "");
      row.push_back(moved ? std::to_string(r.cells[k].second) : "");
      row.push_back(moved ? format_number(r.stage_costs[k]) : "");
      row.push_back(format_number(r.values[k]));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

nlohmann::json experiment_summary(const ExperimentResult& res) {
  const AbstractionGraph& g = res.graph;
  std::size_t finite = 0;
  for (std::size_t i = 0; i < g.cover.size(); ++i) finite += res.values.finite(i);
  nlohmann::json j;
  j["passed"] = res.passed();
  j["failures"] = res.failures;
  j["cells"] = g.cover.size();
  j["goal_cells"] = g.goal_ids.size();
  j["blocked_cells"] = g.blocked_ids.size();
  j["finite_cells"] = finite;
  j["edge_count"] = g.edges.size();
  j["build"] = {{"seconds", g.stats.seconds},
                {"candidate_pairs", g.stats.candidate_pairs},
                {"pruned_pairs", g.stats.pruned_pairs},
                {"infeasible", g.stats.infeasible},
                {"numerical_failures", g.stats.numerical_failures},
                {"audit_rejections", g.stats.audit_rejections}};
  j["bellman"] = {{"passed", res.bellman.passed},
                  {"cells_checked", res.bellman.cells_checked},
                  {"violations", res.bellman.violations.size()}};
  j["reaudit"] = {{"edges", res.audit.edges},
                  {"failed", res.audit.failed},
                  {"worst_membership", res.audit.worst_membership}};
  // JSON has no infinity; unreachable values are written as null.
  const auto value = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  j["value_at_x0"] = value(res.value_at_x0);
  j["worst_initial_value"] = value(res.worst_initial_value);
  nlohmann::json rs = nlohmann::json::array();
  double worst = 0;
  std::size_t certified = 0;
  for (const RolloutRecord& r : res.rollouts) {
    worst = std::max(worst, r.rollout.total_cost);
    certified += r.certified;
    rs.push_back({{"seed", r.seed},
                  {"steps", r.rollout.inputs.size()},
                  {"reached_goal", r.rollout.reached_goal},
                  {"certified", r.certified},
                  {"true_cost", r.rollout.total_cost},
                  {"failure", r.failure}});
  }
  j["rollouts"] = rs;
  j["rollouts_certified"] = certified;
  j["max_true_cost"] = worst;
  return j;
}

void write_experiment_artifacts(const ExperimentResult& res, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir + "': " + ec.message());
  const fs::path base(dir);
  save_abstraction(res.graph, (base / "abstraction.json").string());
  write_values_csv(res.values, res.graph.cover, (base / "values.csv").string());
  write_csv(trajectories_table(res.rollouts), (base / "trajectories.csv").string());
  write_json_file((base / "summary.json").string(), experiment_summary(res));
}

}  // namespace sfa
