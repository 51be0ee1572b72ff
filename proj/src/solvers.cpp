#include "viso/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace viso {

namespace {

constexpr double kSinrEpsGuard = 1e-30;  // division guard at eta = 0

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Budget-saturating split proportional to g^2 per AP row; an AP with no
/// usable gain transmits nothing.
PowerAllocation channel_proportional_alloc(const Instance& inst) {
  PowerAllocation alloc{Mat(inst.L, inst.K)};
  const Mat& g = inst.gains.g;
  for (int l = 0; l < inst.L; ++l) {
    double wsum = 0.0;
    for (int k = 0; k < inst.K; ++k) wsum += g(l, k) * g(l, k);
    if (wsum <= 0.0) continue;
    for (int k = 0; k < inst.K; ++k) {
      alloc.eta(l, k) = inst.budget.p_max[l] * g(l, k) * g(l, k) / wsum;
    }
  }
  return alloc;
}

int argmin_index(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] < v[best]) best = i;  // ties keep the lowest index
  }
  return best;
}

int argmax_index(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

const char* solver_name(SolverId id) {
  switch (id) {
    case SolverId::Fast: return "fast";
    case SolverId::Exact: return "exact";
    case SolverId::Dist: return "dist";
  }
  return "fast";
}

SolverId parse_solver(const std::string& name) {
  if (name == "fast") return SolverId::Fast;
  if (name == "exact") return SolverId::Exact;
  if (name == "dist") return SolverId::Dist;
  throw std::invalid_argument("unknown solver: " + name);
}

void SolverConfig::validate() const {
  if (fast_iters < 1) throw std::invalid_argument("config: fast_iters must be >= 1");
  if (!(fast_shift_frac > 0.0 && fast_shift_frac < 1.0))
    throw std::invalid_argument("config: fast_shift_frac must be in (0, 1)");
  if (exact_bisect_iters < 1) throw std::invalid_argument("config: exact_bisect_iters must be >= 1");
  if (exact_inner_iters < 1) throw std::invalid_argument("config: exact_inner_iters must be >= 1");
  if (!(exact_tol_rel > 0.0)) throw std::invalid_argument("config: exact_tol_rel must be > 0");
  if (!(dist_alpha > 0.0)) throw std::invalid_argument("config: dist_alpha must be > 0");
}

SolverResult solve_fast(const Instance& inst, const SolverConfig& cfg) {
  inst.validate();
  cfg.validate();
  const auto start = Clock::now();
  const std::size_t work = static_cast<std::size_t>(inst.L) * inst.K;

  PowerAllocation alloc = channel_proportional_alloc(inst);
  std::uint64_t evals = 1;
  std::vector<double> se = compute_se(inst, alloc).se;
  double cur_min = *std::min_element(se.begin(), se.end());

  for (int it = 0; it < cfg.fast_iters; ++it) {
    const int k_min = argmin_index(se);
    const int k_max = argmax_index(se);
    if (k_min == k_max) break;  // K = 1 or a flat profile: nothing to move

    const Mat snapshot = alloc.eta;
    for (int l = 0; l < inst.L; ++l) {
      const double delta = cfg.fast_shift_frac * alloc.eta(l, k_max);
      alloc.eta(l, k_max) -= delta;
      alloc.eta(l, k_min) += delta;
    }
    se = compute_se(inst, alloc).se;
    ++evals;
    const double new_min = *std::min_element(se.begin(), se.end());
    if (!(new_min > cur_min)) {
      alloc.eta = snapshot;  // keep the min-SE trajectory monotone
      break;
    }
    cur_min = new_min;
  }

  SolverResult res;
  res.solver = SolverId::Fast;
  res.candidate = std::move(alloc);
  res.cost_units = (1 + evals) * work;  // init pass plus SE evaluations
  res.converged = true;
  res.self_reported_rate = cur_min;
  res.wall_time_s = seconds_since(start);
  return res;
}

std::pair<PowerAllocation, bool> feasibility_inner(const Instance& inst, double target_sinr,
                                                   const SolverConfig& cfg,
                                                   std::uint64_t* eval_count) {
  if (!(target_sinr >= 0.0)) throw std::invalid_argument("feasibility_inner: target_sinr must be >= 0");

  PowerAllocation alloc = channel_proportional_alloc(inst);
  if (eval_count) ++*eval_count;  // the init pass counts like any other matrix pass
  const double accept_level = target_sinr * (1.0 - cfg.exact_tol_rel);

  for (int it = 0; it < cfg.exact_inner_iters; ++it) {
    const auto sinr = compute_sinr(inst, alloc);
    if (eval_count) ++*eval_count;
    const double worst = *std::min_element(sinr.begin(), sinr.end());
    if (worst >= accept_level) return {std::move(alloc), true};

    // Scale each user's column toward the target, then project overloaded
    // AP rows back onto their budgets.
    for (int k = 0; k < inst.K; ++k) {
      const double d = target_sinr / std::max(sinr[k], kSinrEpsGuard);
      for (int l = 0; l < inst.L; ++l) alloc.eta(l, k) *= d;
    }
    for (int l = 0; l < inst.L; ++l) {
      double row = 0.0;
      for (int k = 0; k < inst.K; ++k) row += alloc.eta(l, k);
      if (row > inst.budget.p_max[l]) {
        const double scale = inst.budget.p_max[l] / row;
        for (int k = 0; k < inst.K; ++k) alloc.eta(l, k) *= scale;
      }
    }
  }
  return {std::move(alloc), false};
}

SolverResult solve_exact(const Instance& inst, const SolverConfig& cfg) {
  inst.validate();
  cfg.validate();
  const auto start = Clock::now();
  const std::size_t work = static_cast<std::size_t>(inst.L) * inst.K;

  // Noise-limited single-user bound: all budget coherently serving one user.
  double t_hi = 0.0;
  for (int k = 0; k < inst.K; ++k) {
    double amp = 0.0;
    for (int l = 0; l < inst.L; ++l) amp += std::sqrt(inst.budget.p_max[l]) * inst.gains.g(l, k);
    t_hi = std::max(t_hi, amp * amp / inst.noise.sigma2);
  }

  double lo = 0.0, hi = t_hi;
  std::uint64_t evals = 0;
  PowerAllocation best{Mat(inst.L, inst.K)};
  bool converged = false;
  for (int it = 0; it < cfg.exact_bisect_iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    auto [alloc, feasible] = feasibility_inner(inst, mid, cfg, &evals);
    if (feasible) {
      lo = mid;
      best = std::move(alloc);
      converged = true;
    } else {
      hi = mid;
    }
  }

  SolverResult res;
  res.solver = SolverId::Exact;
  res.cost_units = evals * work;
  res.converged = converged;
  res.self_reported_rate = converged ? min_rate(compute_se(inst, best)) : 0.0;
  res.candidate = std::move(best);
  res.wall_time_s = seconds_since(start);
  return res;
}

SolverResult solve_dist(const Instance& inst, const SolverConfig& cfg) {
  inst.validate();
  cfg.validate();
  const auto start = Clock::now();

  PowerAllocation alloc{Mat(inst.L, inst.K)};
  const Mat& g = inst.gains.g;
  for (int l = 0; l < inst.L; ++l) {
    double wsum = 0.0;
    for (int k = 0; k < inst.K; ++k) wsum += std::pow(g(l, k), cfg.dist_alpha);
    if (wsum <= 0.0) continue;  // dead AP: row of zeros
    for (int k = 0; k < inst.K; ++k) {
      alloc.eta(l, k) = inst.budget.p_max[l] * std::pow(g(l, k), cfg.dist_alpha) / wsum;
    }
  }

  SolverResult res;
  res.solver = SolverId::Dist;
  res.cost_units = static_cast<std::uint64_t>(inst.L) * inst.K;
  res.converged = true;
  res.self_reported_rate = min_rate(compute_se(inst, alloc));
  res.candidate = std::move(alloc);
  res.wall_time_s = seconds_since(start);
  return res;
}

namespace {

struct GridSearchState {
  const Instance& inst;
  int resolution;
  PowerAllocation current;
  PowerAllocation best;
  double best_min_se = -std::numeric_limits<double>::infinity();

  void evaluate() {
    const double value = min_rate(compute_se(inst, current));
    if (value > best_min_se) {
      best_min_se = value;
      best = current;
    }
  }

  // Enumerate one AP row as a composition of `resolution` power ticks.
  void fill_row(int l, int k, int remaining) {
    const double p = inst.budget.p_max[l];
    if (k == inst.K - 1) {
      current.eta(l, k) = p * remaining / resolution;
      next_ap(l + 1);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      current.eta(l, k) = p * c / resolution;
      fill_row(l, k + 1, remaining - c);
    }
  }

  void next_ap(int l) {
    if (l == inst.L) {
      evaluate();
      return;
    }
    fill_row(l, 0, resolution);
  }
};

}  // namespace

std::pair<PowerAllocation, double> oracle_grid_search(const Instance& inst, int resolution) {
  inst.validate();
  if (inst.L * inst.K > 6)
    throw std::invalid_argument("oracle_grid_search: instance too large (L*K must be <= 6)");
  if (resolution < 8) throw std::invalid_argument("oracle_grid_search: resolution must be >= 8");

  GridSearchState state{inst, resolution, PowerAllocation{Mat(inst.L, inst.K)},
                        PowerAllocation{Mat(inst.L, inst.K)}};
  state.next_ap(0);
  return {std::move(state.best), state.best_min_se};
}

SolverResult run_solver(SolverId id, const Instance& inst, const SolverConfig& cfg) {
  switch (id) {
    case SolverId::Fast: return solve_fast(inst, cfg);
    case SolverId::Exact: return solve_exact(inst, cfg);
    case SolverId::Dist: return solve_dist(inst, cfg);
  }
  throw std::invalid_argument("run_solver: bad solver id");
}

}  // namespace viso
