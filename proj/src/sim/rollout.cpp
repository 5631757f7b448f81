#include "sfa/sim/rollout.hpp"

#include <random>
#include <sstream>

#include "sfa/errors.hpp"

namespace sfa {

Rollout rollout(const AbstractionGraph& graph, const ValueFunction& vf, const Vector& x0, std::uint64_t seed,
                const RolloutOptions& opt) {
  const PwaSystem& sys = graph.system;
  if (x0.size() != sys.state_dim()) throw ContractError("rollout: x0 dimension mismatch");
  Rollout r;
  r.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Vector x = x0;
  r.states.push_back(x);
  r.values.push_back(concretize_value(vf, graph.cover, x));
  for (std::size_t k = 0; k < opt.max_steps; ++k) {
    const PolicyStep step = policy_lookup(vf, graph.cover, graph, x);
    if (step.terminal) {
      r.reached_goal = true;
      break;
    }
    const Vector u = step.controller->input(x);
    if (!sys.input_box().contains(u, kMembershipTol)) {
      std::ostringstream os;
      os << "step " << k << ": input [" << u.transpose() << "] leaves U";
      throw CertificationError(os.str());
    }
    const std::size_t m =
        opt.dynamics == DynamicsMode::CellMode ? graph.cover.mode_of_cell[step.cell] : sys.mode_of(x);
    const Ellipsoid& target = graph.cover.cells[step.target];
    const Vector nominal = sys.mode(m).nominal(x, u);
    Vector w;
    if (opt.noise == NoiseMode::Uniform) {
      const Box& nb = sys.noise_box(m);
      w.resize(nb.dim());
      for (Eigen::Index j = 0; j < nb.dim(); ++j) w(j) = nb.lower(j) + unit(rng) * (nb.upper(j) - nb.lower(j));
    } else {
      double worst = -1.0;
      for (const Vector& v : sys.noise_vertices(m)) {
        const double q = target.membership(nominal + v);
        if (q > worst) {
          worst = q;
          w = v;
        }
      }
    }
    const Vector next = nominal + w;
    if (!target.contains(next, kMembershipTol)) {
      std::ostringstream os;
      os << "step " << k << ": successor [" << next.transpose() << "] left target cell " << step.target
         << " (membership " << target.membership(next) << ")";
      throw CertificationError(os.str());
    }
    const double J = stage_cost(graph.cost, x, u);
    r.inputs.push_back(u);
    r.cells.emplace_back(step.cell, step.target);
    r.edges.push_back(step.edge);
    r.stage_costs.push_back(J);
    r.total_cost += J;
    x = next;
    r.states.push_back(x);
    r.values.push_back(concretize_value(vf, graph.cover, x));
  }
  return r;
}

CostCertificate certify_cost(const Rollout& r) {
  CostCertificate c;
  c.value_at_start = r.values.front();
  for (std::size_t k = 0; k < r.stage_costs.size(); ++k) {
    if (r.values[k] < r.stage_costs[k] + r.values[k + 1] - 1e-6) {
      c.passed = false;
      std::ostringstream os;
      os << "step " << k << ": v(x_k) = " << r.values[k] << " < J + v(x_{k+1}) = " << r.stage_costs[k] << " + "
         << r.values[k + 1];
      c.failure = os.str();
      return c;
    }
  }
  if (r.total_cost > c.value_at_start + 1e-6) {
    c.passed = false;
    c.failure = "total cost " + std::to_string(r.total_cost) + " exceeds v(x0) = " + std::to_string(c.value_at_start);
  }
  return c;
}

}  // namespace sfa
