#include "viso/verifier.hpp"

#include <cmath>
#include <stdexcept>

namespace viso {

AcceptanceCriterion AcceptanceCriterion::for_instance(const Instance& inst, double feas_tol,
                                                      double rate_tol) {
  AcceptanceCriterion c;
  c.gamma_target = inst.gamma_target;
  c.feas_tol_rel = feas_tol;
  c.rate_tol_rel = rate_tol;
  c.validate();
  return c;
}

void AcceptanceCriterion::validate() const {
  if (!std::isfinite(gamma_target) || gamma_target < 0.0)
    throw std::invalid_argument("criterion: gamma_target must be finite and >= 0");
  if (!(feas_tol_rel > 0.0 && feas_tol_rel <= 1e-2))
    throw std::invalid_argument("criterion: feas_tol_rel must be in (0, 1e-2]");
  if (!(rate_tol_rel > 0.0 && rate_tol_rel <= 1e-2))
    throw std::invalid_argument("criterion: rate_tol_rel must be in (0, 1e-2]");
}

std::pair<bool, std::vector<Violation>> check_feasible(const Instance& inst,
                                                       const PowerAllocation& alloc,
                                                       double feas_tol_rel) {
  if (alloc.eta.rows != inst.L || alloc.eta.cols != inst.K)
    throw std::invalid_argument("check_feasible: allocation dimensions do not match instance");

  std::vector<Violation> violations;
  for (int l = 0; l < inst.L; ++l) {
    double row_sum = 0.0;
    bool bad_entry = false;
    for (int k = 0; k < inst.K; ++k) {
      const double v = alloc.eta(l, k);
      if (!std::isfinite(v) || v < 0.0) bad_entry = true;
      row_sum += v;
    }
    const double cap = inst.budget.p_max[l] * (1.0 + feas_tol_rel);
    if (bad_entry || !(row_sum <= cap)) {
      violations.push_back({l, row_sum - inst.budget.p_max[l]});
    }
  }
  return {violations.empty(), std::move(violations)};
}

VerificationReport verify(const Instance& inst, const PowerAllocation& alloc,
                          const AcceptanceCriterion& crit) {
  VerificationReport report;
  auto [feasible, violations] = check_feasible(inst, alloc, crit.feas_tol_rel);
  report.feasible = feasible;
  report.violations = std::move(violations);

  bool computable = true;
  for (double v : alloc.eta.data) {
    if (!std::isfinite(v) || v < 0.0) {
      computable = false;
      break;
    }
  }
  // r_ver is always recomputed here, never taken from the solver. For garbage
  // candidates the rate is pinned to zero and the verdict stays "rejected".
  report.r_ver = computable ? min_rate(compute_se(inst, alloc)) : 0.0;
  report.margin = report.r_ver - crit.gamma_target;
  report.accepted =
      report.feasible && report.r_ver >= crit.gamma_target * (1.0 - crit.rate_tol_rel);
  return report;
}

}  // namespace viso
