#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "viso/solvers.hpp"
#include "viso/verifier.hpp"

namespace viso {

/// Sequential-call budget over the ordered solver list.
struct BudgetPolicy {
  /// Attempts allowed; unset means the full chain length.
  std::optional<int> max_attempts;
  /// Cumulative cost_units cap; the in-flight solver always completes and is
  /// verified before the cap stops the chain.
  std::optional<std::uint64_t> cost_cap;

  void validate() const;
};

/// Router output: first solver, ordered fallback list, budget, acceptance rule.
struct SolverPlan {
  SolverId first = SolverId::Fast;
  std::vector<SolverId> fallback;
  BudgetPolicy budget;
  AcceptanceCriterion criterion;

  std::vector<SolverId> chain() const;  // [first; fallback...]
  void validate() const;                // no duplicates, first not in fallback
};

}  // namespace viso
