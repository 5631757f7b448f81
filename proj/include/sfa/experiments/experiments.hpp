#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "sfa/abstraction/abstraction.hpp"
#include "sfa/planner/value_planner.hpp"
#include "sfa/sim/rollout.hpp"

namespace sfa {

// Plain string table written as CSV. Rows keep insertion order.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_number(double v);  // %.17g, "inf"/"nan" spelled out
std::string table_to_csv(const Table& table);
void write_csv(const Table& table, const std::string& path);

// ---------------------------------------------------------------------------
// Single-transition sweep on the discretized third-order chain.

struct SweepSpec {
  std::vector<double> nu{0.5, 1, 2, 4};
  std::vector<double> eta{1, 2, 4};
  std::vector<double> omega_max{0.001, 0.01, 0.1};
};

// Keys "nu", "eta", "omega_max"; each optional, all values must be > 0.
SweepSpec sweep_spec_from_json(const nlohmann::json& j);

// x+ = exp(T Ac) x + int exp(t Ac) Bc dt u + w with T = 0.5, |u| <= 10, source
// {x : x^T (P0 / nu) x <= 1}, target shape eta P0 / nu around (0.1, 0.5, 1.9).
TransitionData chain_transition(double nu, double eta, double omega_max);
Matrix chain_p0();
CostModel chain_cost();  // J = x^T x + u^T u

struct TransitionProblem {
  TransitionData data;
  CostModel cost;
};

// One transition: "A", "B" (or continuous "Ac", "Bc" with step "T"), optional
// "g", "source" and "target" as {P, c}, "input_box", "noise_box", "cost_Q".
TransitionProblem transition_problem_from_json(const nlohmann::json& j);

struct SweepRow {
  double nu = 0, eta = 0, omega_max = 0;
  sdp::SdpStatus status = sdp::SdpStatus::NumericalFailure;
  double cost_bound = 0;        // +inf unless feasible
  double spectral_radius = 0;   // nan unless feasible
  double seconds = 0;
  bool audit_passed = false;    // false for infeasible rows
  std::string message;

  bool feasible() const { return status == sdp::SdpStatus::Optimal; }
};

// Rows ordered by nu, then eta, then omega_max. Infeasible points are rows, not errors.
std::vector<SweepRow> run_single_transition_sweep(const SweepSpec& spec, const AuditOptions& audit = {});
Table sweep_table(const std::vector<SweepRow>& rows);

struct SweepTrends {
  bool monotone_in_nu = true;
  bool monotone_in_eta = true;
  bool spectrum_shrinks = true;  // rho at the largest omega <= rho at the smallest, eta = smallest
  std::vector<std::string> failures;
  bool passed() const { return monotone_in_nu && monotone_in_eta && spectrum_shrinks; }
};

SweepTrends check_sweep_trends(const SweepSpec& spec, const std::vector<SweepRow>& rows, double tol = 1e-6);

// ---------------------------------------------------------------------------
// Reach-avoid optimal control on a cover of balls.

struct Scenario {
  PwaSystem system;
  CostModel cost;
  double cell_radius = 0;
  Box goal;
  Box initial;
  std::vector<Box> obstacles;
  Vector x0;
  std::size_t rollouts = 0;
};

// System keys (see config.hpp) plus "cell_radius", "goal", "initial",
// "obstacles", "x0" and "seeds"; none of them has a default.
Scenario scenario_from_json(const nlohmann::json& j);

struct RolloutRecord {
  std::uint64_t seed = 0;
  Rollout rollout;
  bool certified = false;  // stayed in every planned cell, reached the goal, avoided obstacles, cost within bound
  std::string failure;
};

struct EdgeAuditSummary {
  std::size_t edges = 0;
  std::size_t failed = 0;
  double worst_membership = 0;
  std::vector<std::string> failures;  // first few only
};

// Re-audits every edge with a seed unrelated to the one used while building.
EdgeAuditSummary audit_all_edges(const AbstractionGraph& graph, const AuditOptions& opt, unsigned threads = 1);

struct ExperimentOptions {
  BuildOptions build;
  RolloutOptions rollout;
  std::uint64_t seed = 0;  // rollout i uses seed + i
  unsigned threads = 1;
  bool reaudit = true;
};

struct ExperimentResult {
  AbstractionGraph graph;
  ValueFunction values;
  BellmanReport bellman;
  EdgeAuditSummary audit;
  double value_at_x0 = 0;
  double worst_initial_value = 0;  // max of the concretized value over a grid on the initial box
  std::vector<RolloutRecord> rollouts;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

ExperimentResult run_optimal_control_experiment(const Scenario& scenario, const ExperimentOptions& opt = {});

// Every rollout reaches the goal box, never enters an obstacle and stays certified.
RolloutRecord run_certified_rollout(const AbstractionGraph& graph, const ValueFunction& vf, const Vector& x0,
                                    std::uint64_t seed, const RolloutOptions& opt);
std::vector<RolloutRecord> run_rollouts(const AbstractionGraph& graph, const ValueFunction& vf, const Vector& x0,
                                        std::uint64_t first_seed, std::size_t count, const RolloutOptions& opt,
                                        unsigned threads);

// Columns seed, step, x0.., u0.., cell_id, target_cell_id, stage_cost, value_at_state.
// The terminal state has empty input and target columns.
Table trajectories_table(const std::vector<RolloutRecord>& records);
nlohmann::json experiment_summary(const ExperimentResult& result);

// Writes abstraction.json, values.csv, trajectories.csv and summary.json into dir.
void write_experiment_artifacts(const ExperimentResult& result, const std::string& dir);

}  // namespace sfa
