#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sfa/config.hpp"
#include "sfa/errors.hpp"
#include "sfa/json_io.hpp"
#include "sfa/sim/rollout.hpp"
#include "support/fixtures.hpp"

using namespace sfa;
using fixtures::vec;

namespace {

// x+ = 0.5 x + u + w on [-1, 1], |u| <= 0.2, |w| <= 0.02, goal around the origin.
const AbstractionGraph& scalar_graph() {
  static const AbstractionGraph g = [] {
    AffineMode m{fixtures::scalar(0.5), fixtures::scalar(1.0), Vector::Zero(1)};
    PwaSystem sys({m}, {Region{}}, Box{vec({-1}), vec({1})}, Box::symmetric(vec({0.2})),
                  {Box::symmetric(vec({0.02}))});
    return build_abstraction(sys, fixtures::scalar_cost(), build_cover(sys.domain(), 0.1), Box{vec({-0.15}), vec({0.15})},
                             {});
  }();
  return g;
}

// Coarse cells do not fit the scenario goal, so a wider goal corner is used.
const AbstractionGraph& planar_graph() {
  static const AbstractionGraph g = [] {
    const auto j = read_json_file(SFA_SOURCE_DIR "/configs/optimal_control.json");
    const PwaSystem sys = system_from_json(j);
    return build_abstraction(sys, cost_from_json(j), build_cover(sys.domain(), 0.4),
                             Box{vec({-2, 0.5}), vec({-0.5, 2})},
                             {box_from_json(j["obstacles"][0], "obstacle")});
  }();
  return g;
}

}  // namespace

TEST_CASE("rollout starting in the goal takes no steps") {
  const AbstractionGraph& g = scalar_graph();
  const ValueFunction vf = reverse_dijkstra(g);
  REQUIRE(!g.goal_ids.empty());
  const Rollout r = rollout(g, vf, g.cover.center(g.goal_ids.front()), 1);
  CHECK(r.reached_goal);
  CHECK(r.states.size() == 1);
  CHECK(r.inputs.empty());
  CHECK(r.total_cost == 0.0);
  CHECK(certify_cost(r).passed);
}

TEST_CASE("scalar contraction reaches the goal within its value") {
  const AbstractionGraph& g = scalar_graph();
  REQUIRE(g.stats.audit_rejections == 0);
  const ValueFunction vf = reverse_dijkstra(g);
  REQUIRE(check_bellman(g, vf).passed);
  for (double x0 : {0.95, -0.9, 0.5, -0.35}) {
    CAPTURE(x0);
    REQUIRE(std::isfinite(concretize_value(vf, g.cover, vec({x0}))));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Rollout r = rollout(g, vf, vec({x0}), seed);
      REQUIRE(r.reached_goal);
      CHECK(r.states.size() == r.inputs.size() + 1);
      CHECK(r.values.size() == r.states.size());
      CHECK(std::abs(r.states.back()(0)) < std::abs(x0));
      for (const Vector& u : r.inputs) CHECK(std::abs(u(0)) <= 0.2 + 1e-6);
      const CostCertificate cert = certify_cost(r);
      CHECK_MESSAGE(cert.passed, cert.failure);
      CHECK(r.total_cost <= r.values.front() + 1e-6);
    }
  }
}

TEST_CASE("rollouts are reproducible per seed") {
  const AbstractionGraph& g = scalar_graph();
  const ValueFunction vf = reverse_dijkstra(g);
  const Rollout a = rollout(g, vf, vec({0.9}), 77);
  const Rollout b = rollout(g, vf, vec({0.9}), 77);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) CHECK(a.states[k] == b.states[k]);
  CHECK(a.total_cost == b.total_cost);
  CHECK(a.edges == b.edges);
  const Rollout c = rollout(g, vf, vec({0.9}), 78);
  CHECK(c.states[1] != a.states[1]);
}

TEST_CASE("lowered values fail the cost certificate") {
  const AbstractionGraph& g = scalar_graph();
  ValueFunction vf = reverse_dijkstra(g);
  for (double& v : vf.values)
    if (std::isfinite(v)) v *= 0.1;
  const Rollout r = rollout(g, vf, vec({0.95}), 3);
  REQUIRE(r.reached_goal);
  const CostCertificate cert = certify_cost(r);
  CHECK_FALSE(cert.passed);
  CHECK(cert.failure.find("step") != std::string::npos);
}

TEST_CASE("a corrupted controller is caught during the rollout") {
  AbstractionGraph g = scalar_graph();
  const ValueFunction vf = reverse_dijkstra(g);
  const PolicyStep step = policy_lookup(vf, g.cover, g, vec({0.95}));
  g.edges[step.edge].controller.l = g.edges[step.edge].controller.l.array() + 0.15;
  CHECK_THROWS_AS(rollout(g, vf, vec({0.95}), 0), CertificationError);
  g.edges[step.edge].controller.l(0) = 5.0;
  CHECK_THROWS_AS(rollout(g, vf, vec({0.95}), 0), CertificationError);
}

TEST_CASE("noise and dynamics variants on the planar system") {
  const AbstractionGraph& g = planar_graph();
  const ValueFunction vf = reverse_dijkstra(g);
  REQUIRE(check_bellman(g, vf).passed);
  std::size_t started = 0;
  for (std::size_t id = 0; id < g.cover.size(); id += 3) {
    if (!vf.finite(id) || g.is_goal(id)) continue;
    ++started;
    for (RolloutOptions opt : {RolloutOptions{1000, NoiseMode::Uniform, DynamicsMode::CellMode},
                               RolloutOptions{1000, NoiseMode::Adversarial, DynamicsMode::CellMode}}) {
      const Rollout r = rollout(g, vf, g.cover.center(id), id, opt);
      CHECK(r.reached_goal);
      CHECK(certify_cost(r).passed);
    }
  }
  CHECK(started >= 5);

  const Rollout capped = rollout(g, vf, g.cover.center(g.edges.front().source), 0, RolloutOptions{0});
  CHECK(capped.states.size() == 1);
  CHECK_THROWS_AS(rollout(g, vf, vec({1.0}), 0), ContractError);
}
