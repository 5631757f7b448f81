#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sfa/pwa_model.hpp"
#include "sfa/sdp/linear_sdp.hpp"
#include "sfa/sdp/solver.hpp"

namespace sfa {

// {x : (x - c)^T P (x - c) <= 1}
struct Ellipsoid {
  Matrix P;
  Vector c;

  Eigen::Index dim() const { return c.size(); }
  double membership(const Vector& x) const;
  bool contains(const Vector& x, double tol = 0.0) const { return membership(x) <= 1.0 + tol; }

  static Ellipsoid ball(const Vector& center, double radius);
};

// Throws ContractError unless P is symmetric positive definite and matches c.
void validate_ellipsoid(const Ellipsoid& e, const char* what);

// Everything one cell-to-cell transition problem needs.
struct TransitionData {
  AffineMode mode;
  Ellipsoid source;
  Ellipsoid target;
  std::vector<Vector> noise_vertices;
  std::vector<Matrix> input_rows;
};

// Positions of the decision variables:
// vec(K) column-major, then l, beta_1..beta_Nw, tau_1..tau_Nu, and (when
// with_cost) gamma, J.
struct VariableLayout {
  std::size_t nx = 0, nu = 0, n_noise = 0, n_rows = 0;
  bool with_cost = false;

  std::size_t K(std::size_t a, std::size_t b) const { return b * nu + a; }
  std::size_t l(std::size_t a) const { return nx * nu + a; }
  std::size_t beta(std::size_t i) const { return nx * nu + nu + i; }
  std::size_t tau(std::size_t i) const { return nx * nu + nu + n_noise + i; }
  std::size_t gamma() const { return nx * nu + nu + n_noise + n_rows; }
  std::size_t J() const { return gamma() + 1; }
  std::size_t count() const { return nx * nu + nu + n_noise + n_rows + (with_cost ? 2 : 0); }

  std::vector<std::string> names() const;
};

VariableLayout layout_for(const TransitionData& data, bool with_cost);

inline constexpr double kMaxTargetCondition = 1e12;

// Containment blocks (one per noise vertex) followed by input blocks (one per
// input row), each with its nonnegative multiplier block. The objective is zero.
// Throws AssemblyError when the target shape matrix is too ill-conditioned.
sdp::LinearSdp assemble_transition_lmis(const TransitionData& data, bool with_cost_vars = false);

// Block bounding the stage cost by J on the source ellipsoid (gamma is its multiplier).
sdp::SdpBlock assemble_cost_lmi(const CostModel& cost, const Ellipsoid& source, const VariableLayout& layout);

// Full cost program: transition blocks, cost block, gamma >= 0, objective J.
sdp::LinearSdp assemble_cost_program(const TransitionData& data, const CostModel& cost);

struct SynthesisDiagnostics {
  double phase1_margin = 0.0;
  int phase1_iterations = 0;
  int iterations = 0;
  double min_eig_slack = 0.0;
  double duality_gap = 0.0;
  // Multipliers that ended on their lower bound (below 1e-7).
  std::vector<std::string> boundary_multipliers;
  std::string message;
};

// kappa(x) = K (x - c) + l on the source cell.
struct TransitionController {
  Matrix K;
  Vector l;
  Vector c;
  double cost_bound = 0.0;
  Vector beta;
  Vector tau;
  double gamma = 0.0;
  SynthesisDiagnostics diagnostics;

  Vector input(const Vector& x) const { return K * (x - c) + l; }
};

struct SynthesisResult {
  sdp::SdpStatus status = sdp::SdpStatus::NumericalFailure;
  std::optional<TransitionController> controller;
  SynthesisDiagnostics diagnostics;
};

// Phase-1 margin on the transition blocks first; only a feasible pair goes on
// to the cost program.
SynthesisResult synthesize_transition(const TransitionData& data, const CostModel& cost,
                                      const sdp::SdpTolerances& tol = {});

struct AuditOptions {
  std::size_t boundary_samples = 200;
  std::size_t interior_samples = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0x5fa;
};

struct AuditReport {
  bool passed = true;
  std::size_t samples = 0;
  double worst_membership = 0.0;  // max over samples and noise vertices of the target form
  double worst_input = 0.0;       // max ||U_i kappa(x)||
  double worst_cost_excess = -1e300;  // max J(x, kappa(x)) - cost_bound
  std::string failure;            // empty when passed
  Vector witness;
};

// Samples the source ellipsoid (boundary points via normalized Gaussian
// directions mapped through P^{-1/2}, interior points uniformly in volume)
// and checks containment, input limits and the cost bound for every noise vertex.
AuditReport audit_transition(const TransitionController& ctrl, const TransitionData& data, const CostModel& cost,
                             const AuditOptions& opt = {});

double closed_loop_spectral_radius(const AffineMode& mode, const Matrix& K);

nlohmann::json ellipsoid_to_json(const Ellipsoid& e);
Ellipsoid ellipsoid_from_json(const nlohmann::json& j);
nlohmann::json controller_to_json(const TransitionController& ctrl);
TransitionController controller_from_json(const nlohmann::json& j);

}  // namespace sfa
