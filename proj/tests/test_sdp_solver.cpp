#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "sfa/errors.hpp"
#include "sfa/sdp/solver.hpp"
#include "support/sdp_oracle.hpp"

using namespace sfa;
using namespace sfa::sdp;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

Matrix diag2(double a, double b) {
  Matrix M = Matrix::Zero(2, 2);
  M(0, 0) = a;
  M(1, 1) = b;
  return M;
}

}  // namespace

TEST_CASE("maximize t subject to 1 - t >= 0") {
  LinearSdp p(1);
  p.objective(0) = -1.0;
  const auto b = p.add_block(scalar(1.0));
  p.coefficient(b, 0) = scalar(-1.0);
  const SdpSolution s = solve(p);
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.y(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.min_eig_slack >= -1e-7);
  CHECK(std::abs(s.duality_gap) <= 1e-6);
}

TEST_CASE("minimize y subject to diag(y - 1, 3 - y) >= 0") {
  LinearSdp p(1);
  p.objective(0) = 1.0;
  const auto b = p.add_block(diag2(-1.0, 3.0));
  p.coefficient(b, 0) = diag2(1.0, -1.0);
  const SdpSolution s = solve(p);
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.objective_value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("constant negative block is infeasible") {
  LinearSdp p(1);
  p.add_block(scalar(-1.0));
  const SdpSolution s = solve(p);
  CHECK(s.status == SdpStatus::Infeasible);
  CHECK(s.min_eig_slack < -1e-7);
}

TEST_CASE("feasibility margins") {
  SUBCASE("diag(y, 1 - y): margin 0.5 at y = 0.5") {
    LinearSdp p(1);
    const auto b = p.add_block(diag2(0.0, 1.0));
    p.coefficient(b, 0) = diag2(1.0, -1.0);
    const FeasibilityMargin fm = feasibility_margin(p);
    REQUIRE(fm.status == SdpStatus::Optimal);
    CHECK(fm.margin == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(fm.y(0) == doctest::Approx(0.5).epsilon(1e-5));
  }
  SUBCASE("constant diag(2)") {
    LinearSdp p(0);
    p.add_block(scalar(2.0));
    const FeasibilityMargin fm = feasibility_margin(p);
    REQUIRE(fm.status == SdpStatus::Optimal);
    CHECK(fm.margin == doctest::Approx(2.0).epsilon(1e-6));
  }
  SUBCASE("constant diag(-3)") {
    LinearSdp p(0);
    p.add_block(scalar(-3.0));
    const FeasibilityMargin fm = feasibility_margin(p);
    REQUIRE(fm.status == SdpStatus::Optimal);
    CHECK(fm.margin == doctest::Approx(-3.0).epsilon(1e-6));
  }
}

TEST_CASE("contract errors") {
  LinearSdp p(1);
  Matrix ns = Matrix::Identity(2, 2);
  ns(0, 1) = 1.0;
  p.add_block(ns);
  CHECK_THROWS_AS(p.validate(), ContractError);
  CHECK_THROWS_AS(solve(p), ContractError);

  InteriorPointSolver once(LinearSdp(0), {});
  (void)once.run();
  CHECK_THROWS_AS(once.run(), ContractError);
}

TEST_CASE("unbounded objective along an absent variable is a numerical failure") {
  LinearSdp p(2);
  p.objective(1) = 1.0;
  const auto b = p.add_block(scalar(1.0));
  p.coefficient(b, 0) = scalar(1.0);
  CHECK(solve(p).status == SdpStatus::NumericalFailure);
}

TEST_CASE("JSON dump round-trips") {
  LinearSdp p(1);
  p.objective(0) = 1.0;
  const auto b = p.add_block(diag2(-1.0, 3.0), "interval");
  p.coefficient(b, 0) = diag2(1.0, -1.0);
  const LinearSdp q = sdp_from_json(to_json(p));
  REQUIRE(q.blocks.size() == 1);
  CHECK(q.blocks[0].label == "interval");
  CHECK(q.blocks[0].F0 == p.blocks[0].F0);
  CHECK(q.blocks[0].F[0] == p.blocks[0].F[0]);
  CHECK(q.objective == p.objective);
}

TEST_CASE("randomized small SDPs agree with the grid oracle and pass the eigenvalue recheck") {
  std::mt19937_64 rng(1001);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t vars = 1 + static_cast<std::size_t>(trial % 2);
    const LinearSdp p = testing::random_small_sdp(rng, vars);
    const SdpSolution s = solve(p);
    CAPTURE(trial);
    CAPTURE(s.message);
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(p.min_eigenvalue_at(s.y) >= -1e-6);
    const testing::GridResult g = testing::grid_search(p);
    REQUIRE(g.feasible);
    CHECK(std::abs(s.objective_value - g.best) <= 1e-3);
  }
}

TEST_CASE("adding a constraint block never lowers the optimum") {
  std::mt19937_64 rng(77);
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    LinearSdp p = testing::random_small_sdp(rng, 2);
    const SdpSolution base = solve(p);
    REQUIRE(base.status == SdpStatus::Optimal);
    const Eigen::Index d = 2;
    Matrix F0 = testing::random_symmetric(rng, d) + 1.5 * Matrix::Identity(d, d);
    const auto b = p.add_block(F0, "extra");
    for (std::size_t j = 0; j < 2; ++j) p.coefficient(b, j) = testing::random_symmetric(rng, d);
    const SdpSolution more = solve(p);
    REQUIRE(more.status != SdpStatus::NumericalFailure);
    if (more.status == SdpStatus::Optimal) {
      CHECK(more.objective_value >= base.objective_value - 1e-6);
      ++compared;
    }
  }
  CHECK(compared > 10);
}

TEST_CASE("positive scaling of a block preserves the status") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> su(0.1, 10.0);
  for (int trial = 0; trial < 40; ++trial) {
    LinearSdp p = testing::random_small_sdp(rng, 1 + static_cast<std::size_t>(trial % 2));
    if (trial % 2 == 1) {
      // Push every block down by more than its best margin: infeasible.
      const FeasibilityMargin fm = feasibility_margin(p);
      REQUIRE(fm.status == SdpStatus::Optimal);
      for (auto& blk : p.blocks) blk.F0 -= (fm.margin + 0.05) * Matrix::Identity(blk.dim(), blk.dim());
    }
    const SdpStatus before = solve(p).status;
    REQUIRE(before != SdpStatus::NumericalFailure);
    CHECK(before == (trial % 2 == 1 ? SdpStatus::Infeasible : SdpStatus::Optimal));
    LinearSdp q = p;
    const std::size_t b = static_cast<std::size_t>(rng() % q.blocks.size());
    const double s = su(rng);
    q.blocks[b].F0 *= s;
    for (auto& Fj : q.blocks[b].F) Fj *= s;
    CHECK(solve(q).status == before);
  }
}
