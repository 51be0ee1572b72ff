#pragma once

#include <utility>
#include <vector>

#include "viso/model.hpp"

namespace viso {

/// Acceptance rule applied by the independent checker: a candidate passes iff
/// it is budget-feasible and its recomputed common rate clears the target.
struct AcceptanceCriterion {
  double gamma_target = 0.0;
  double feas_tol_rel = 1e-9;  // relative per-AP budget slack
  double rate_tol_rel = 1e-6;  // relative target slack

  static AcceptanceCriterion for_instance(const Instance& inst, double feas_tol = 1e-9,
                                          double rate_tol = 1e-6);
  void validate() const;  // tolerances must lie in (0, 1e-2]
};

struct Violation {
  int ap = 0;
  double excess = 0.0;  // row power minus budget
};

/// Everything the verifier recomputes from (instance, candidate); nothing is
/// copied from solver-reported values.
struct VerificationReport {
  bool feasible = false;
  std::vector<Violation> violations;
  double r_ver = 0.0;   // verified common rate
  bool accepted = false;
  double margin = 0.0;  // r_ver - gamma_target
};

/// Per-AP budget check: feasible iff every entry is a valid power and every
/// row sum stays within p_max * (1 + feas_tol_rel).
std::pair<bool, std::vector<Violation>> check_feasible(const Instance& inst,
                                                       const PowerAllocation& alloc,
                                                       double feas_tol_rel);

/// Independent verification. Non-finite or negative candidate entries yield a
/// rejected report rather than an exception, so a broken solver degrades to a
/// fallback event.
VerificationReport verify(const Instance& inst, const PowerAllocation& alloc,
                          const AcceptanceCriterion& crit);

}  // namespace viso
