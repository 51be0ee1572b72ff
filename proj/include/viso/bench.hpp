#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viso/orchestrator.hpp"

namespace viso {

inline constexpr std::uint64_t kDefaultSeed = 22;
inline constexpr const char* kGeneratorVersion = "viso-gen-1";

/// Propagation and target-drawing parameters of one split.
struct GenParams {
  int L_lo = 4, L_hi = 10;
  int K_lo = 2, K_hi = 6;
  double area_m = 1000.0;   // square side
  double pl_exp = 3.5;      // path-loss exponent
  double shadow_db = 8.0;   // log-normal shadowing std
  double p_max_w = 0.2;     // per-AP budget
  double sigma2_w = 1e-13;  // noise power
  /// gamma_target = frac * (min SE of a quick dist-solver pass), frac uniform
  /// in [gamma_frac_lo, gamma_frac_hi].
  double gamma_frac_lo = 0.6;
  double gamma_frac_hi = 1.1;
  /// Shifted split only: concentrate one random user's gain onto its
  /// strongest AP until its interference coupling (sum of squared gains)
  /// grows by shift_factor, keeping the user's total gain fixed. The target
  /// is anchored before the transform, so the instance is harder than its
  /// descriptor suggests.
  bool shift_transform = false;
  double shift_factor = 10.0;

  void validate() const;
};

struct BenchmarkSpec {
  std::uint64_t seed = kDefaultSeed;
  int n_train = 6, n_test = 8, n_stress = 6, n_shifted = 6;
  GenParams train, test, stress, shifted;

  static BenchmarkSpec defaults(std::uint64_t seed = kDefaultSeed);
  void validate() const;  // counts >= 1, params valid
};

/// Deterministic four-regime benchmark; one named PRNG stream per split.
/// Instances come out in split order: train, test, stress, shifted.
std::vector<Instance> generate_benchmark(const BenchmarkSpec& spec);

/// Outcomes of one method over a shared instance pool.
struct MethodOutcomes {
  std::string method;
  std::vector<OrchestrationOutcome> outcomes;
};

/// Rate of the final returned candidate: the accepted one when resolved,
/// otherwise the last rejected attempt's verified rate (0 with no candidate).
double returned_rate(const OrchestrationOutcome& outcome);

using RegretTable = std::map<std::string, std::map<std::string, double>>;  // method -> instance -> regret

/// Instance-level selection regret against the ex-post best verified value
/// among the compared methods. Throws if methods cover different instances.
RegretTable compute_regret(std::span<const MethodOutcomes> methods);

struct MetricsRow {
  std::string method;
  std::string group;  // overall | train | test | stress | shifted | ID | OOD
  double accepted_rate = 0.0;
  double feasible_rate = 0.0;
  double avg_ver_rate = 0.0;
  double avg_wall_time_s = 0.0;
  double avg_cost_units = 0.0;
  double avg_regret = 0.0;
  double fallback_rate = 0.0;
  double avg_attempts = 0.0;
  int n_instances = 0;
  std::optional<double> combined_score;  // avg(r_ver - lambda * wall time), when requested
};

/// Per-method rows for overall, each split, ID (train+test) and OOD
/// (stress+shifted) groups.
std::vector<MetricsRow> aggregate_metrics(std::span<const MethodOutcomes> methods,
                                          const RegretTable& regrets,
                                          const std::map<std::string, Split>& split_of,
                                          std::optional<double> lambda = std::nullopt);

struct FailureCase {
  std::string instance_id;
  std::string method;
  std::optional<SolverId> solver;  // empty when the method left the instance unresolved
  bool accepted = false;
  std::optional<double> r_ver;
  double wall_time_s = 0.0;
};

/// Rows for every method on each instance where some method is unresolved or
/// some regret exceeds regret_rel_threshold relative to the best value.
std::vector<FailureCase> collect_failures(std::span<const MethodOutcomes> methods,
                                          const RegretTable& regrets,
                                          double regret_rel_threshold);

/// Writes metrics.csv, failures.csv and a human-readable report.txt.
void emit_report(std::span<const MetricsRow> rows, std::span<const FailureCase> failures,
                 const std::filesystem::path& out_dir);

/// Round-trip-exact decimal formatting used by every emitted file.
std::string format_double(double v);

}  // namespace viso
