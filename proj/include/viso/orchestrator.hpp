#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viso/router.hpp"

namespace viso {

/// One solver attempt as recorded by the loop; every field except the wall
/// time is reproducible from (instance, candidate) alone.
struct AttemptRecord {
  SolverId solver = SolverId::Fast;
  bool accepted = false;
  double r_ver = 0.0;
  bool feasible = false;
  std::uint64_t cost_units = 0;
  double wall_time_s = 0.0;
  PowerAllocation candidate;  // serialized only in audit mode
};

struct OrchestrationOutcome {
  std::string instance_id;
  RouterKind method = RouterKind::Rule;
  std::vector<AttemptRecord> attempts;
  bool resolved = false;
  std::optional<SolverId> final_solver;  // set iff some attempt was accepted
  double final_r_ver = 0.0;              // 0 when unresolved
  std::uint64_t total_cost_units = 0;
  double total_wall_time_s = 0.0;
};

/// Sequential attempts with independent verification and early stopping at
/// the first acceptance; returns unresolved when the chain, the attempt
/// budget, or the cost cap is exhausted first.
OrchestrationOutcome orchestrate(const Instance& inst, const SolverPlan& plan,
                                 const SolverConfig& solver_cfg, RouterKind method);

/// Everything a routing method needs besides the instances.
struct MethodContext {
  SolverConfig solver_cfg;
  RuleConfig rule_cfg;                              // Rule only
  const std::vector<MemoryEntry>* memory = nullptr; // Agent only
  int agent_k = 1;
  double feas_tol_rel = 1e-9;
  double rate_tol_rel = 1e-6;
  BudgetPolicy budget;
  int jobs = 1;  // instances may be orchestrated concurrently
};

SolverPlan make_plan(const Instance& inst, RouterKind kind, const MethodContext& ctx);

/// One outcome per instance, in input order regardless of jobs.
std::vector<OrchestrationOutcome> run_method(std::span<const Instance> instances,
                                             RouterKind kind, const MethodContext& ctx);

}  // namespace viso
