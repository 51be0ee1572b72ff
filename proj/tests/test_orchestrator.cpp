#include <stdexcept>

#include <doctest.h>

#include "test_support.hpp"
#include "viso/orchestrator.hpp"

using namespace viso;
using viso::testing::make_instance;

namespace {

// gains [1, 2], unit budget and noise: dist reaches min-SE ~0.263, fast and
// exact land near the max-min optimum ~0.53. Targets between those values
// separate the solvers cleanly.
Instance pair_instance(double gamma) {
  return make_instance(1, 2, {1.0, 2.0}, {1.0}, 1.0, gamma, "pair");
}

SolverPlan plan_of(const Instance& inst, SolverId first, std::vector<SolverId> fallback) {
  SolverPlan plan;
  plan.first = first;
  plan.fallback = std::move(fallback);
  plan.criterion = AcceptanceCriterion::for_instance(inst);
  return plan;
}

}  // namespace

TEST_CASE("first attempt accepted stops the chain") {
  const auto inst = pair_instance(0.2);
  const auto plan = plan_of(inst, SolverId::Dist, {SolverId::Exact, SolverId::Fast});
  const auto outcome = orchestrate(inst, plan, SolverConfig{}, RouterKind::Rule);
  REQUIRE(outcome.attempts.size() == 1);
  CHECK(outcome.resolved);
  CHECK(outcome.final_solver == SolverId::Dist);
  CHECK(outcome.attempts.back().accepted);
  CHECK(outcome.final_r_ver == outcome.attempts.back().r_ver);
  CHECK(outcome.total_cost_units == outcome.attempts[0].cost_units);
}

TEST_CASE("second attempt accepted after a rejection") {
  const auto inst = pair_instance(0.4);
  const auto plan = plan_of(inst, SolverId::Dist, {SolverId::Exact, SolverId::Fast});
  const auto outcome = orchestrate(inst, plan, SolverConfig{}, RouterKind::Rule);
  REQUIRE(outcome.attempts.size() == 2);
  CHECK(outcome.resolved);
  CHECK(outcome.final_solver == SolverId::Exact);
  CHECK_FALSE(outcome.attempts[0].accepted);
  CHECK(outcome.attempts[0].feasible);
  CHECK(outcome.attempts[1].accepted);
  CHECK(outcome.total_cost_units ==
        outcome.attempts[0].cost_units + outcome.attempts[1].cost_units);
}

TEST_CASE("exhausted chain returns unresolved with counted runtime") {
  const auto inst = pair_instance(10.0);  // far above every solver
  const auto plan = plan_of(inst, SolverId::Fast, {SolverId::Exact, SolverId::Dist});
  const auto outcome = orchestrate(inst, plan, SolverConfig{}, RouterKind::Rule);
  REQUIRE(outcome.attempts.size() == 3);
  CHECK_FALSE(outcome.resolved);
  CHECK_FALSE(outcome.final_solver.has_value());
  CHECK(outcome.final_r_ver == 0.0);
  for (const auto& attempt : outcome.attempts) CHECK_FALSE(attempt.accepted);
  double wall = 0.0;
  std::uint64_t cost = 0;
  for (const auto& attempt : outcome.attempts) {
    wall += attempt.wall_time_s;
    cost += attempt.cost_units;
  }
  CHECK(outcome.total_wall_time_s == doctest::Approx(wall).epsilon(1e-12));
  CHECK(outcome.total_cost_units == cost);
  // the last rejected candidate still carries its verified rate
  CHECK(outcome.attempts.back().r_ver > 0.0);
}

TEST_CASE("at most one accepted attempt and it terminates the list") {
  for (double gamma : {0.0, 0.2, 0.3, 0.4, 0.5, 0.52, 0.6, 2.0}) {
    const auto inst = pair_instance(gamma);
    const auto plan = plan_of(inst, SolverId::Dist, {SolverId::Fast, SolverId::Exact});
    const auto outcome = orchestrate(inst, plan, SolverConfig{}, RouterKind::Rule);
    int accepted = 0;
    for (const auto& attempt : outcome.attempts) accepted += attempt.accepted ? 1 : 0;
    CHECK(accepted <= 1);
    if (accepted == 1) {
      CHECK(outcome.attempts.back().accepted);
      CHECK(outcome.resolved);
    }
  }
}

TEST_CASE("max_attempts cuts the chain") {
  const auto inst = pair_instance(0.4);
  auto plan = plan_of(inst, SolverId::Dist, {SolverId::Exact, SolverId::Fast});
  plan.budget.max_attempts = 1;
  const auto outcome = orchestrate(inst, plan, SolverConfig{}, RouterKind::Rule);
  CHECK(outcome.attempts.size() == 1);
  CHECK_FALSE(outcome.resolved);

  plan.budget.max_attempts = 0;
  CHECK_THROWS_AS(orchestrate(inst, plan, SolverConfig{}, RouterKind::Rule),
                  std::invalid_argument);
}

TEST_CASE("cost cap lets the in-flight attempt finish") {
  const auto inst = pair_instance(0.4);
  auto plan = plan_of(inst, SolverId::Dist, {SolverId::Exact, SolverId::Fast});
  plan.budget.cost_cap = 1;  // below even the dist cost of 2
  const auto outcome = orchestrate(inst, plan, SolverConfig{}, RouterKind::Rule);
  REQUIRE(outcome.attempts.size() == 1);  // first attempt recorded, then the cap stops the loop
  CHECK_FALSE(outcome.resolved);
  CHECK(outcome.attempts[0].solver == SolverId::Dist);
}

TEST_CASE("run_method basics") {
  MethodContext ctx;
  CHECK(run_method(std::vector<Instance>{}, RouterKind::AlwaysFast, ctx).empty());

  std::vector<Instance> instances;
  for (double gamma : {0.1, 0.3, 0.45}) instances.push_back(pair_instance(gamma));
  instances[0].id = "a";
  instances[1].id = "b";
  instances[2].id = "c";

  const auto outcomes = run_method(instances, RouterKind::AlwaysDist, ctx);
  REQUIRE(outcomes.size() == 3);
  for (const auto& outcome : outcomes) {
    CHECK(outcome.attempts.size() == 1);
    CHECK(outcome.method == RouterKind::AlwaysDist);
  }
  CHECK(outcomes[0].resolved);        // 0.1 < dist rate
  CHECK_FALSE(outcomes[1].resolved);  // 0.3 > dist rate, no fallback for fixed policies
  CHECK(outcomes[0].instance_id == "a");

  CHECK_THROWS_AS(run_method(instances, RouterKind::Agent, ctx), std::invalid_argument);
}

TEST_CASE("parallel run matches sequential run") {
  Rng rng(501);
  std::vector<Instance> instances;
  for (int i = 0; i < 12; ++i) {
    auto inst = viso::testing::random_instance(rng, 4, 3);
    inst.id = "inst_" + std::to_string(i);
    inst.gamma_target = rng.uniform(0.0, 1.0);
    instances.push_back(std::move(inst));
  }
  MethodContext seq;
  MethodContext par;
  par.jobs = 4;
  const auto a = run_method(instances, RouterKind::AlwaysExact, seq);
  const auto b = run_method(instances, RouterKind::AlwaysExact, par);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].instance_id == b[i].instance_id);
    CHECK(a[i].resolved == b[i].resolved);
    CHECK(a[i].final_r_ver == b[i].final_r_ver);
    CHECK(a[i].total_cost_units == b[i].total_cost_units);
  }
}

TEST_CASE("replaying verification reproduces every recorded attempt") {
  Rng rng(502);
  MethodContext ctx;
  std::vector<Instance> instances;
  for (int i = 0; i < 8; ++i) {
    auto inst = viso::testing::random_instance(rng, 4, 3);
    inst.id = "inst_" + std::to_string(i);
    inst.gamma_target = rng.uniform(0.0, 1.2);
    instances.push_back(std::move(inst));
  }
  ctx.rule_cfg = rule_config_from_train(instances);
  const auto outcomes = run_method(instances, RouterKind::Rule, ctx);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto crit = AcceptanceCriterion::for_instance(instances[i]);
    for (const auto& attempt : outcomes[i].attempts) {
      const auto replay = verify(instances[i], attempt.candidate, crit);
      CHECK(replay.accepted == attempt.accepted);
      CHECK(replay.feasible == attempt.feasible);
      CHECK(replay.r_ver == attempt.r_ver);  // bit-exact
    }
  }
}
