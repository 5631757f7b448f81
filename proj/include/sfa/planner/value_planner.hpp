#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "sfa/abstraction/abstraction.hpp"

namespace sfa {

inline constexpr std::size_t kNoEdge = std::numeric_limits<std::size_t>::max();

struct ValueFunction {
  std::vector<double> values;       // +inf marks cells with no path to the goal
  std::vector<std::size_t> policy;  // edge id per cell, kNoEdge for goal and unreachable cells
  std::vector<std::size_t> goal_ids;

  bool finite(std::size_t cell) const { return values[cell] < std::numeric_limits<double>::infinity(); }
};

// Shortest cost-to-goal over the reversed edges. Among edges achieving a
// cell's value the one with the lowest target id, then lowest edge id, wins.
ValueFunction reverse_dijkstra(const AbstractionGraph& graph);

struct BellmanReport {
  bool passed = true;
  std::size_t cells_checked = 0;
  std::vector<std::string> violations;
};

// For every finite-valued non-goal cell, some outgoing edge must satisfy
// v(source) >= cost_bound + v(target) - 1e-9, and the policy edge must do so
// with equality.
BellmanReport check_bellman(const AbstractionGraph& graph, const ValueFunction& vf);

// min over cells containing x of their value (+inf if none is finite).
// DomainError when no cell contains x.
double concretize_value(const ValueFunction& vf, const CellCover& cover, const Vector& x);

struct PolicyStep {
  std::size_t cell = 0;
  bool terminal = false;  // x lies in a goal cell
  std::size_t edge = kNoEdge;
  std::size_t target = 0;
  const TransitionController* controller = nullptr;
};

// Picks the finite-valued containing cell of least value (lowest id on ties).
// PolicyError when no containing cell has a finite value.
PolicyStep policy_lookup(const ValueFunction& vf, const CellCover& cover, const AbstractionGraph& graph,
                         const Vector& x);

// CSV with columns cell_id, x0..x{n-1}, value, policy_edge_id. Unreachable
// cells print `unreachable`; cells without a policy edge leave it empty.
void write_values_csv(const ValueFunction& vf, const CellCover& cover, const std::string& path);
ValueFunction read_values_csv(const std::string& path, const AbstractionGraph& graph);

}  // namespace sfa
