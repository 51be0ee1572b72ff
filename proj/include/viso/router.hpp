#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "viso/plan.hpp"

namespace viso {

/// Compact indicators of regime difficulty, all pure functions of the
/// instance and symmetric in the user indexing.
struct Descriptor {
  int L = 0;
  int K = 0;
  double load_ratio = 0.0;   // K / L
  double gamma_target = 0.0;
  double budget_mean = 0.0;
  double budget_min = 0.0;
  double gain_log_mean = 0.0;  // log10 stats over positive gains
  double gain_log_std = 0.0;
  double gain_log_min = 0.0;
  double gain_log_max = 0.0;
  double imbalance = 0.0;  // Gini of per-user total gain, in [0, 1]

  static constexpr int kNumFeatures = 11;
  std::array<double, kNumFeatures> features() const;
};

/// Sentinel for log statistics when no positive gain exists.
inline constexpr double kGainLogFloor = -30.0;

enum class RouterKind { AlwaysFast, AlwaysExact, AlwaysDist, Rule, Agent };

const char* router_name(RouterKind kind);
RouterKind parse_router(const std::string& name);  // throws std::invalid_argument

/// Thresholds of the hand-designed rule; defaults come from train-split
/// quantiles rather than hard-coded constants.
struct RuleConfig {
  double theta_gamma = 0.0;
  double theta_load = 0.0;
  double theta_imbalance = 0.0;
};

/// One record of verified experience: descriptor plus the verified best
/// solver on that train instance.
struct MemoryEntry {
  Descriptor descriptor;
  SolverId label = SolverId::Fast;
  double best_rate = 0.0;
  std::string instance_id;
};

Descriptor extract_descriptor(const Instance& inst);

/// Linear-interpolation quantile of an unsorted sample; q in [0, 1].
double quantile(std::vector<double> values, double q);

/// 60th-percentile thresholds of (gamma_target, load_ratio, imbalance) over
/// the train split.
RuleConfig rule_config_from_train(std::span<const Instance> train);

/// Fixed policies: the named solver first, no fallback.
SolverPlan route_fixed(RouterKind kind, const AcceptanceCriterion& crit);

/// Threshold rule: any difficulty indicator above its threshold sends the
/// instance to the exact solver first; otherwise the fast solver leads.
SolverPlan route_rule(const Descriptor& desc, const RuleConfig& cfg,
                      const AcceptanceCriterion& crit);

/// Labels every train instance with its verified best solver: the accepted
/// candidate of highest verified rate, falling back to the best feasible one;
/// ties break on cost_units, then Fast < Exact < Dist.
std::vector<MemoryEntry> build_memory(std::span<const Instance> train, const SolverConfig& cfg,
                                      double feas_tol_rel = 1e-9, double rate_tol_rel = 1e-6);

/// Nearest-neighbor retrieval over the memory with z-score normalized
/// features (zero-variance features are ignored). Majority label of the k
/// nearest wins; label ties resolve to the single nearest neighbor and
/// distance ties to the lower instance id.
SolverPlan route_agent(const Descriptor& desc, std::span<const MemoryEntry> memory, int k,
                       const AcceptanceCriterion& crit);

}  // namespace viso
