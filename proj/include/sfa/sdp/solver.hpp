#pragma once

#include <string>

#include "sfa/sdp/linear_sdp.hpp"

namespace sfa::sdp {

enum class SdpStatus { Optimal, Infeasible, NumericalFailure };

const char* to_string(SdpStatus s);

struct SdpTolerances {
  double feas_tol = 1e-7;      // min eigenvalue of every block at y must be >= -feas_tol
  double gap_tol = 1e-6;       // primal minus dual objective, scaled by max(1, |objective|)
  double infeasible_margin = 1e-7;  // phase-1 margin below -this certifies infeasibility
  int max_iterations = 200;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  Vector y;
  double objective_value = 0.0;
  double min_eig_slack = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
  std::string message;
};

struct FeasibilityMargin {
  SdpStatus status = SdpStatus::NumericalFailure;  // Optimal means the margin is trustworthy
  double margin = 0.0;
  Vector y;
  int iterations = 0;
  std::string message;
};

// Infeasible-start primal-dual path-following method with HKM search
// directions and Mehrotra predictor-corrector steps. One instance solves one
// problem once and is confined to the calling thread.
class InteriorPointSolver {
 public:
  InteriorPointSolver(const LinearSdp& problem, SdpTolerances tol);

  // Runs the iteration without infeasibility classification: a run that does
  // not converge reports NumericalFailure.
  SdpSolution run();

 private:
  const LinearSdp& problem_;
  SdpTolerances tol_;
  bool used_ = false;
};

// Solves the problem; when the interior-point run fails, a phase-1 margin
// decides between Infeasible and NumericalFailure.
SdpSolution solve(const LinearSdp& problem, const SdpTolerances& tol = {});

// max t such that F_b(y) >= t I for all blocks and some y. The search is
// capped at a large positive value, which is then reported as the margin.
FeasibilityMargin feasibility_margin(const LinearSdp& problem, const SdpTolerances& tol = {});

}  // namespace sfa::sdp
