#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sfa/abstraction/abstraction.hpp"
#include "sfa/planner/value_planner.hpp"

namespace sfa {

enum class NoiseMode {
  Uniform,      // independent uniform draws over the mode's noise box
  Adversarial,  // the noise vertex that maximizes the target membership value
};

enum class DynamicsMode {
  CellMode,   // the mode assigned to the policy cell (taken at its centre)
  StateMode,  // mode_of(x); may leave certified cells that straddle a partition boundary
};

struct RolloutOptions {
  std::size_t max_steps = 1000;
  NoiseMode noise = NoiseMode::Uniform;
  DynamicsMode dynamics = DynamicsMode::CellMode;
};

struct Rollout {
  std::vector<Vector> states;
  std::vector<Vector> inputs;
  std::vector<std::pair<std::size_t, std::size_t>> cells;  // (policy cell, target cell) per step
  std::vector<std::size_t> edges;
  std::vector<double> stage_costs;
  std::vector<double> values;  // concretized value at every state
  bool reached_goal = false;
  double total_cost = 0.0;
  std::uint64_t seed = 0;
};

// Closed loop under the abstraction policy. Throws CertificationError when a
// successor leaves its planned target cell or an input leaves U.
Rollout rollout(const AbstractionGraph& graph, const ValueFunction& vf, const Vector& x0, std::uint64_t seed,
                const RolloutOptions& opt = {});

struct CostCertificate {
  bool passed = true;
  double value_at_start = 0.0;
  std::string failure;
};

// total_cost <= v(x0) + 1e-6 and v(x_k) >= J(x_k, u_k) + v(x_{k+1}) - 1e-6 at every step.
CostCertificate certify_cost(const Rollout& r);

}  // namespace sfa
