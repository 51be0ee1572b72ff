#include "viso/router.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace viso {

void BudgetPolicy::validate() const {
  if (max_attempts && *max_attempts < 1)
    throw std::invalid_argument("budget policy: max_attempts must be >= 1");
}

std::vector<SolverId> SolverPlan::chain() const {
  std::vector<SolverId> out;
  out.reserve(1 + fallback.size());
  out.push_back(first);
  out.insert(out.end(), fallback.begin(), fallback.end());
  return out;
}

void SolverPlan::validate() const {
  budget.validate();
  criterion.validate();
  const auto solvers = chain();
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    for (std::size_t j = i + 1; j < solvers.size(); ++j) {
      if (solvers[i] == solvers[j]) throw std::invalid_argument("plan: duplicate solver in chain");
    }
  }
}

std::array<double, Descriptor::kNumFeatures> Descriptor::features() const {
  return {static_cast<double>(L),
          static_cast<double>(K),
          load_ratio,
          gamma_target,
          budget_mean,
          budget_min,
          gain_log_mean,
          gain_log_std,
          gain_log_min,
          gain_log_max,
          imbalance};
}

const char* router_name(RouterKind kind) {
  switch (kind) {
    case RouterKind::AlwaysFast: return "always_fast";
    case RouterKind::AlwaysExact: return "always_exact";
    case RouterKind::AlwaysDist: return "always_dist";
    case RouterKind::Rule: return "rule";
    case RouterKind::Agent: return "agent";
  }
  return "rule";
}

RouterKind parse_router(const std::string& name) {
  if (name == "always_fast") return RouterKind::AlwaysFast;
  if (name == "always_exact") return RouterKind::AlwaysExact;
  if (name == "always_dist") return RouterKind::AlwaysDist;
  if (name == "rule") return RouterKind::Rule;
  if (name == "agent") return RouterKind::Agent;
  throw std::invalid_argument("unknown router: " + name);
}

namespace {

double gini(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  double sum = 0.0;
  for (double v : x) sum += v;
  if (sum <= 0.0) return 0.0;
  const double mean = sum / n;
  double abs_diff = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) abs_diff += std::abs(x[i] - x[j]);
  }
  return abs_diff / (2.0 * n * n * mean);
}

std::vector<SolverId> others_exact_fast_dist(SolverId first) {
  std::vector<SolverId> out;
  for (SolverId s : {SolverId::Exact, SolverId::Fast, SolverId::Dist}) {
    if (s != first) out.push_back(s);
  }
  return out;
}

}  // namespace

Descriptor extract_descriptor(const Instance& inst) {
  Descriptor d;
  d.L = inst.L;
  d.K = inst.K;
  d.load_ratio = static_cast<double>(inst.K) / inst.L;
  d.gamma_target = inst.gamma_target;

  double bsum = 0.0, bmin = inst.budget.p_max[0];
  for (double p : inst.budget.p_max) {
    bsum += p;
    bmin = std::min(bmin, p);
  }
  d.budget_mean = bsum / inst.L;
  d.budget_min = bmin;

  std::vector<double> logs;
  logs.reserve(inst.gains.g.data.size());
  for (double g : inst.gains.g.data) {
    if (g > 0.0) logs.push_back(std::log10(g));
  }
  if (logs.empty()) {
    d.gain_log_mean = d.gain_log_min = d.gain_log_max = kGainLogFloor;
    d.gain_log_std = 0.0;
  } else {
    double m = 0.0;
    for (double v : logs) m += v;
    m /= logs.size();
    double var = 0.0, lmin = logs[0], lmax = logs[0];
    for (double v : logs) {
      var += (v - m) * (v - m);
      lmin = std::min(lmin, v);
      lmax = std::max(lmax, v);
    }
    d.gain_log_mean = m;
    d.gain_log_std = std::sqrt(var / logs.size());
    d.gain_log_min = lmin;
    d.gain_log_max = lmax;
  }

  std::vector<double> user_total(inst.K, 0.0);
  for (int k = 0; k < inst.K; ++k) {
    for (int l = 0; l < inst.L; ++l) user_total[k] += inst.gains.g(l, k);
  }
  d.imbalance = gini(user_total);
  return d;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  const double pos = q * (values.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(i);
  return values[i] + frac * (values[i + 1] - values[i]);
}

RuleConfig rule_config_from_train(std::span<const Instance> train) {
  if (train.empty()) throw std::invalid_argument("rule_config_from_train: empty train split");
  std::vector<double> gammas, loads, imbs;
  for (const Instance& inst : train) {
    const Descriptor d = extract_descriptor(inst);
    gammas.push_back(d.gamma_target);
    loads.push_back(d.load_ratio);
    imbs.push_back(d.imbalance);
  }
  RuleConfig cfg;
  cfg.theta_gamma = quantile(std::move(gammas), 0.6);
  cfg.theta_load = quantile(std::move(loads), 0.6);
  cfg.theta_imbalance = quantile(std::move(imbs), 0.6);
  return cfg;
}

SolverPlan route_fixed(RouterKind kind, const AcceptanceCriterion& crit) {
  SolverPlan plan;
  switch (kind) {
    case RouterKind::AlwaysFast: plan.first = SolverId::Fast; break;
    case RouterKind::AlwaysExact: plan.first = SolverId::Exact; break;
    case RouterKind::AlwaysDist: plan.first = SolverId::Dist; break;
    default: throw std::invalid_argument("route_fixed: kind must be a fixed policy");
  }
  plan.criterion = crit;
  plan.validate();
  return plan;
}

SolverPlan route_rule(const Descriptor& desc, const RuleConfig& cfg,
                      const AcceptanceCriterion& crit) {
  SolverPlan plan;
  const bool hard = desc.gamma_target > cfg.theta_gamma || desc.load_ratio > cfg.theta_load ||
                    desc.imbalance > cfg.theta_imbalance;
  if (hard) {
    plan.first = SolverId::Exact;
    plan.fallback = {SolverId::Fast, SolverId::Dist};
  } else {
    plan.first = SolverId::Fast;
    plan.fallback = {SolverId::Exact, SolverId::Dist};
  }
  plan.criterion = crit;
  plan.validate();
  return plan;
}

std::vector<MemoryEntry> build_memory(std::span<const Instance> train, const SolverConfig& cfg,
                                      double feas_tol_rel, double rate_tol_rel) {
  if (train.empty()) throw std::invalid_argument("build_memory: empty train split");

  std::vector<MemoryEntry> memory;
  memory.reserve(train.size());
  for (const Instance& inst : train) {
    const auto crit = AcceptanceCriterion::for_instance(inst, feas_tol_rel, rate_tol_rel);
    bool have_best = false;
    // Selection key, best-first: accepted, feasible, r_ver desc, cost asc,
    // solver order Fast < Exact < Dist.
    std::tuple<int, int, double, std::int64_t, int> best_key;
    SolverId best_solver = SolverId::Fast;
    double best_rate = 0.0;
    for (SolverId id : kPortfolio) {
      const SolverResult result = run_solver(id, inst, cfg);
      const VerificationReport report = verify(inst, result.candidate, crit);
      const std::tuple<int, int, double, std::int64_t, int> key{
          report.accepted ? 1 : 0, report.feasible ? 1 : 0, report.r_ver,
          -static_cast<std::int64_t>(result.cost_units), -static_cast<int>(id)};
      if (!have_best || key > best_key) {
        have_best = true;
        best_key = key;
        best_solver = id;
        best_rate = report.r_ver;
      }
    }
    memory.push_back({extract_descriptor(inst), best_solver, best_rate, inst.id});
  }
  return memory;
}

SolverPlan route_agent(const Descriptor& desc, std::span<const MemoryEntry> memory, int k,
                       const AcceptanceCriterion& crit) {
  if (memory.empty()) throw std::invalid_argument("route_agent: empty memory");
  if (k < 1 || k > static_cast<int>(memory.size()))
    throw std::invalid_argument("route_agent: k must be in [1, memory size]");

  constexpr int n_feat = Descriptor::kNumFeatures;
  std::array<double, n_feat> mean{}, stddev{};
  for (const MemoryEntry& entry : memory) {
    const auto f = entry.descriptor.features();
    for (int i = 0; i < n_feat; ++i) mean[i] += f[i];
  }
  for (int i = 0; i < n_feat; ++i) mean[i] /= static_cast<double>(memory.size());
  for (const MemoryEntry& entry : memory) {
    const auto f = entry.descriptor.features();
    for (int i = 0; i < n_feat; ++i) stddev[i] += (f[i] - mean[i]) * (f[i] - mean[i]);
  }
  for (int i = 0; i < n_feat; ++i) stddev[i] = std::sqrt(stddev[i] / memory.size());

  const auto query = desc.features();
  struct Scored {
    double distance;
    const MemoryEntry* entry;
  };
  std::vector<Scored> scored;
  scored.reserve(memory.size());
  for (const MemoryEntry& entry : memory) {
    const auto f = entry.descriptor.features();
    double sq = 0.0;
    for (int i = 0; i < n_feat; ++i) {
      if (stddev[i] > 0.0) {
        const double diff = (query[i] - mean[i]) / stddev[i] - (f[i] - mean[i]) / stddev[i];
        sq += diff * diff;
      }
    }
    scored.push_back({std::sqrt(sq), &entry});
  }
  // Sorting on (distance, instance_id) makes retrieval independent of the
  // memory's storage order.
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.entry->instance_id < b.entry->instance_id;
  });

  std::array<int, 3> votes{};
  for (int i = 0; i < k; ++i) votes[static_cast<int>(scored[i].entry->label)]++;
  const int top = *std::max_element(votes.begin(), votes.end());
  SolverId first = scored[0].entry->label;  // label tie -> nearest neighbor wins
  int winners = 0;
  for (int s = 0; s < 3; ++s) {
    if (votes[s] == top) ++winners;
  }
  if (winners == 1) {
    for (int s = 0; s < 3; ++s) {
      if (votes[s] == top) first = static_cast<SolverId>(s);
    }
  }

  SolverPlan plan;
  plan.first = first;
  plan.fallback = others_exact_fast_dist(first);
  plan.criterion = crit;
  plan.validate();
  return plan;
}

}  // namespace viso
