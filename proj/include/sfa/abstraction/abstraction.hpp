#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sfa/lmi/transition.hpp"
#include "sfa/pwa_model.hpp"

namespace sfa {

inline constexpr double kMembershipTol = 1e-6;
inline constexpr std::size_t kDefaultMaxCells = 100000;

// Balls of a common radius centred on a regular grid. Cell ids are row-major
// in the grid coordinates (last axis fastest).
struct CellCover {
  Box domain;
  double radius = 0.0;
  std::vector<std::size_t> counts;  // grid points per axis
  Vector spacing;                   // actual distance between neighbouring centres per axis
  std::vector<Ellipsoid> cells;
  std::vector<std::size_t> mode_of_cell;

  std::size_t size() const { return cells.size(); }
  const Vector& center(std::size_t id) const { return cells[id].c; }

  // Ids of every cell whose ball contains x (membership <= 1 + tol), ascending.
  std::vector<std::size_t> cells_containing(const Vector& x, double tol = kMembershipTol) const;
  // Largest grid-box circumradius; the cover is complete when it is <= radius.
  double grid_circumradius() const;
};

// Grid of ceil(L_j / s) + 1 centres per axis with nominal spacing
// s = 2 r / sqrt(n), spread evenly so the outer centres sit on the domain faces.
// CapacityError if the cell count would exceed max_cells.
CellCover build_cover(const Box& domain, double radius, std::size_t max_cells = kDefaultMaxCells);

// Mode of each cell, taken at its centre.
void assign_modes(CellCover& cover, const PwaSystem& system);

struct Ball {
  Vector center;
  double radius = 0.0;
};

// Growth-bound superset of {A x + B u + g + w : x in cell, u in U, w in W}.
// The cell must be a ball (P = r^-2 I).
Ball reach_overapprox(const Ellipsoid& cell, const AffineMode& mode, const Box& input_box, const Box& noise_box);

double ball_radius(const Ellipsoid& cell);

struct Edge {
  std::size_t id = 0;
  std::size_t source = 0;
  std::size_t target = 0;
  TransitionController controller;
  double cost_bound = 0.0;
  double audit_worst_membership = 0.0;
};

struct BuildStats {
  std::size_t candidate_pairs = 0;
  std::size_t pruned_pairs = 0;
  std::size_t infeasible = 0;
  std::size_t numerical_failures = 0;
  std::size_t audit_rejections = 0;
  double seconds = 0.0;
};

struct AbstractionGraph {
  PwaSystem system;
  CostModel cost;
  CellCover cover;
  Box goal_region;
  std::vector<Box> obstacles;
  std::vector<Edge> edges;
  std::vector<std::size_t> goal_ids;
  std::vector<std::size_t> blocked_ids;
  BuildStats stats;
  std::vector<std::string> warnings;

  bool is_goal(std::size_t id) const;
  bool is_blocked(std::size_t id) const;
};

struct BuildOptions {
  unsigned threads = 1;
  double prune_margin = 1e-9;
  AuditOptions audit;
  sdp::SdpTolerances solver;
  // Called after each source cell with (cells done, total cells); may run on any worker.
  std::function<void(std::size_t, std::size_t)> progress;
};

// Every candidate pair surviving the reach pruning is synthesized and
// audited; only audited controllers become edges. Solver failures are
// recorded as warnings and never abort the build.
AbstractionGraph build_abstraction(const PwaSystem& system, const CostModel& cost, CellCover cover, const Box& goal,
                                   const std::vector<Box>& obstacles, const BuildOptions& opt = {});

// Transition problem for the pair (source, target) of a cover.
TransitionData transition_data(const PwaSystem& system, const CellCover& cover, std::size_t source,
                               std::size_t target);

inline constexpr int kAbstractionSchemaVersion = 1;

nlohmann::json abstraction_to_json(const AbstractionGraph& g);
AbstractionGraph abstraction_from_json(const nlohmann::json& j);
void save_abstraction(const AbstractionGraph& g, const std::string& path);
AbstractionGraph load_abstraction(const std::string& path);

}  // namespace sfa
