#include "viso/orchestrator.hpp"

#include <atomic>
#include <stdexcept>
#include <thread>

namespace viso {

OrchestrationOutcome orchestrate(const Instance& inst, const SolverPlan& plan,
                                 const SolverConfig& solver_cfg, RouterKind method) {
  plan.validate();
  const auto chain = plan.chain();
  if (chain.empty()) throw std::invalid_argument("orchestrate: empty solver chain");

  const int max_attempts =
      plan.budget.max_attempts ? *plan.budget.max_attempts : static_cast<int>(chain.size());

  OrchestrationOutcome outcome;
  outcome.instance_id = inst.id;
  outcome.method = method;

  for (const SolverId solver : chain) {
    if (static_cast<int>(outcome.attempts.size()) >= max_attempts) break;

    SolverResult result = run_solver(solver, inst, solver_cfg);
    const VerificationReport report = verify(inst, result.candidate, plan.criterion);

    AttemptRecord attempt;
    attempt.solver = solver;
    attempt.accepted = report.accepted;
    attempt.r_ver = report.r_ver;
    attempt.feasible = report.feasible;
    attempt.cost_units = result.cost_units;
    attempt.wall_time_s = result.wall_time_s;
    attempt.candidate = std::move(result.candidate);

    outcome.total_cost_units += attempt.cost_units;
    outcome.total_wall_time_s += attempt.wall_time_s;
    outcome.attempts.push_back(std::move(attempt));

    if (report.accepted) {
      outcome.resolved = true;
      outcome.final_solver = solver;
      outcome.final_r_ver = report.r_ver;
      break;
    }
    // Budget check follows the acceptance check: paid-for work is never
    // discarded, the chain just stops extending.
    if (plan.budget.cost_cap && outcome.total_cost_units > *plan.budget.cost_cap) break;
  }
  return outcome;
}

SolverPlan make_plan(const Instance& inst, RouterKind kind, const MethodContext& ctx) {
  const auto crit = AcceptanceCriterion::for_instance(inst, ctx.feas_tol_rel, ctx.rate_tol_rel);
  SolverPlan plan;
  switch (kind) {
    case RouterKind::AlwaysFast:
    case RouterKind::AlwaysExact:
    case RouterKind::AlwaysDist:
      plan = route_fixed(kind, crit);
      break;
    case RouterKind::Rule:
      plan = route_rule(extract_descriptor(inst), ctx.rule_cfg, crit);
      break;
    case RouterKind::Agent:
      if (!ctx.memory || ctx.memory->empty())
        throw std::invalid_argument("make_plan: agent routing requires a non-empty memory");
      plan = route_agent(extract_descriptor(inst), *ctx.memory, ctx.agent_k, crit);
      break;
  }
  plan.budget = ctx.budget;
  return plan;
}

std::vector<OrchestrationOutcome> run_method(std::span<const Instance> instances,
                                             RouterKind kind, const MethodContext& ctx) {
  // Validate plan inputs up front; workers must not throw.
  if (kind == RouterKind::Agent) {
    if (!ctx.memory || ctx.memory->empty())
      throw std::invalid_argument("run_method: agent routing requires a non-empty memory");
    if (ctx.agent_k < 1 || ctx.agent_k > static_cast<int>(ctx.memory->size()))
      throw std::invalid_argument("run_method: agent_k must be in [1, memory size]");
  }

  std::vector<OrchestrationOutcome> outcomes(instances.size());
  auto worker_body = [&](std::size_t i) {
    outcomes[i] = orchestrate(instances[i], make_plan(instances[i], kind, ctx), ctx.solver_cfg, kind);
  };

  if (ctx.jobs <= 1 || instances.size() <= 1) {
    for (std::size_t i = 0; i < instances.size(); ++i) worker_body(i);
    return outcomes;
  }

  // Outcomes land in a pre-sized slot per instance, so output order is
  // deterministic no matter which worker finishes first.
  std::atomic<std::size_t> next{0};
  const int n_workers = std::min<int>(ctx.jobs, static_cast<int>(instances.size()));
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < instances.size(); i = next.fetch_add(1)) {
        worker_body(i);
      }
    });
  }
  for (auto& t : workers) t.join();
  return outcomes;
}

}  // namespace viso
