#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <sstream>
#include <thread>

#include "sfa/abstraction/abstraction.hpp"
#include "sfa/errors.hpp"

namespace sfa {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct SourceResult {
  std::vector<Edge> edges;
  std::vector<std::string> warnings;
  BuildStats stats;
};

}  // namespace

bool AbstractionGraph::is_goal(std::size_t id) const {
  return std::binary_search(goal_ids.begin(), goal_ids.end(), id);
}

bool AbstractionGraph::is_blocked(std::size_t id) const {
  return std::binary_search(blocked_ids.begin(), blocked_ids.end(), id);
}

TransitionData transition_data(const PwaSystem& system, const CellCover& cover, std::size_t source,
                               std::size_t target) {
  const std::size_t m = cover.mode_of_cell.at(source);
  TransitionData d;
  d.mode = system.mode(m);
  d.source = cover.cells.at(source);
  d.target = cover.cells.at(target);
  d.noise_vertices = system.noise_vertices(m);
  d.input_rows = input_box_to_ellipsoid_rows(system.input_box());
  return d;
}

AbstractionGraph build_abstraction(const PwaSystem& system, const CostModel& cost, CellCover cover, const Box& goal,
                                   const std::vector<Box>& obstacles, const BuildOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cover.domain.dim() != system.state_dim()) throw ContractError("build_abstraction: cover dimension mismatch");
  if (goal.dim() != system.state_dim()) throw ContractError("build_abstraction: goal dimension mismatch");
  for (const Box& o : obstacles) {
    if (o.dim() != system.state_dim()) throw ContractError("build_abstraction: obstacle dimension mismatch");
  }
  if (cost.Q.rows() != system.state_dim() + system.input_dim() + 1) {
    throw ContractError("build_abstraction: cost dimension mismatch");
  }
  if (cover.mode_of_cell.size() != cover.size()) assign_modes(cover, system);

  AbstractionGraph g{system, cost, std::move(cover), goal, obstacles, {}, {}, {}, {}, {}};
  const CellCover& cv = g.cover;
  const std::size_t n = cv.size();
  const double r = cv.radius;

  for (std::size_t i = 0; i < n; ++i) {
    const Vector& c = cv.center(i);
    if (std::any_of(obstacles.begin(), obstacles.end(), [&](const Box& o) { return o.intersects_ball(c, r); })) {
      g.blocked_ids.push_back(i);
    } else if (goal.contains_ball(c, r)) {
      g.goal_ids.push_back(i);
    }
  }
  std::vector<char> targetable(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    targetable[i] = !g.is_blocked(i) && cv.domain.contains_ball(cv.center(i), r);
  }

  std::vector<SourceResult> results(n);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  const auto work = [&]() {
    while (true) {
      const std::size_t s = next.fetch_add(1);
      if (s >= n) return;
      SourceResult& out = results[s];
      if (!g.is_blocked(s)) {
        const std::size_t m = cv.mode_of_cell[s];
        const Ball reach = reach_overapprox(cv.cells[s], system.mode(m), system.input_box(), system.noise_box(m));
        for (std::size_t t = 0; t < n; ++t) {
          if (t == s || !targetable[t]) continue;
          if ((cv.center(t) - reach.center).norm() > reach.radius + r + opt.prune_margin) {
            ++out.stats.pruned_pairs;
            continue;
          }
          ++out.stats.candidate_pairs;
          const TransitionData data = transition_data(system, cv, s, t);
          SynthesisResult res;
          try {
            res = synthesize_transition(data, cost, opt.solver);
          } catch (const Error& e) {
            res.status = sdp::SdpStatus::NumericalFailure;
            res.diagnostics.message = e.what();
          }
          if (res.status == sdp::SdpStatus::Infeasible) {
            ++out.stats.infeasible;
            continue;
          }
          if (res.status != sdp::SdpStatus::Optimal) {
            ++out.stats.numerical_failures;
            std::ostringstream os;
            os << "pair " << s << " -> " << t << ": " << sdp::to_string(res.status) << " (" << res.diagnostics.message
               << ")";
            out.warnings.push_back(os.str());
            continue;
          }
          AuditOptions ao = opt.audit;
          ao.seed = mix(opt.audit.seed ^ mix(s * 0x100000001b3ull + t));
          const AuditReport rep = audit_transition(*res.controller, data, cost, ao);
          if (!rep.passed) {
            ++out.stats.audit_rejections;
            out.warnings.push_back("pair " + std::to_string(s) + " -> " + std::to_string(t) +
                                   ": audit failed: " + rep.failure);
            continue;
          }
          Edge e;
          e.source = s;
          e.target = t;
          e.cost_bound = res.controller->cost_bound;
          e.audit_worst_membership = rep.worst_membership;
          e.controller = std::move(*res.controller);
          out.edges.push_back(std::move(e));
        }
      }
      const std::size_t d = done.fetch_add(1) + 1;
      if (opt.progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        opt.progress(d, n);
      }
    }
  };

  const unsigned threads = std::max(1u, opt.threads);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (SourceResult& res : results) {
    for (Edge& e : res.edges) {
      e.id = g.edges.size();
      g.edges.push_back(std::move(e));
    }
    for (std::string& w : res.warnings) g.warnings.push_back(std::move(w));
    g.stats.candidate_pairs += res.stats.candidate_pairs;
    g.stats.pruned_pairs += res.stats.pruned_pairs;
    g.stats.infeasible += res.stats.infeasible;
    g.stats.numerical_failures += res.stats.numerical_failures;
    g.stats.audit_rejections += res.stats.audit_rejections;
  }
  g.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return g;
}

}  // namespace sfa
