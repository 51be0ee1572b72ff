#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>

#include "viso/model.hpp"

namespace viso {

/// The trusted portfolio: a low-latency iterative solver, a stronger
/// bisection-based feasibility solver, and a one-shot distributed heuristic.
enum class SolverId { Fast, Exact, Dist };

inline constexpr std::array<SolverId, 3> kPortfolio{SolverId::Fast, SolverId::Exact,
                                                    SolverId::Dist};

const char* solver_name(SolverId id);
SolverId parse_solver(const std::string& name);  // throws std::invalid_argument

struct SolverConfig {
  int fast_iters = 20;
  double fast_shift_frac = 0.1;    // fraction of the top user's power moved per step
  int exact_bisect_iters = 40;     // outer bisection probes
  int exact_inner_iters = 200;     // scale-and-project iterations per probe
  double exact_tol_rel = 1e-4;     // relative SINR slack when declaring a probe feasible
  double dist_alpha = 1.0;         // gain exponent of the proportional rule

  void validate() const;
};

struct SolverResult {
  SolverId solver = SolverId::Fast;
  PowerAllocation candidate;
  /// Deterministic work count: L*K per pass over the allocation matrix,
  /// whether a SINR-vector evaluation or an allocation construction (the
  /// dist rule is exactly one such pass). Wall time is reported separately
  /// and never feeds any decision.
  std::uint64_t cost_units = 0;
  double wall_time_s = 0.0;
  bool converged = false;
  /// Informational only; the verifier never reads it.
  double self_reported_rate = 0.0;
};

/// Iterative min-max repair: start from the budget-saturating channel
/// proportional split, then repeatedly move a fraction of the best user's
/// power toward the worst user until the min rate stops improving. Row sums
/// stay at the budgets throughout.
SolverResult solve_fast(const Instance& inst, const SolverConfig& cfg);

/// Bisection on a common SINR target over [0, t_hi] with t_hi the noise
/// limited single-user bound; each probe runs feasibility_inner and the
/// allocation of the highest feasible probe is returned.
SolverResult solve_exact(const Instance& inst, const SolverConfig& cfg);

/// Scale-and-project fixed point for a fixed SINR target. Always returns a
/// budget-feasible allocation; the flag says whether the target was met
/// within exact_tol_rel. eval_count, when given, accumulates SINR-vector
/// evaluations for cost accounting.
std::pair<PowerAllocation, bool> feasibility_inner(const Instance& inst, double target_sinr,
                                                   const SolverConfig& cfg,
                                                   std::uint64_t* eval_count = nullptr);

/// One-shot local rule, no coordination: eta[l][k] = P_l * g^alpha / sum_k' g^alpha.
SolverResult solve_dist(const Instance& inst, const SolverConfig& cfg);

/// Exhaustive max-min search over per-AP simplex grids (test oracle; guarded
/// to L*K <= 6). Returns the best allocation and its min SE.
std::pair<PowerAllocation, double> oracle_grid_search(const Instance& inst, int resolution);

SolverResult run_solver(SolverId id, const Instance& inst, const SolverConfig& cfg);

}  // namespace viso
