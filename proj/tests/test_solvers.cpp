#include <cmath>

#include <stdexcept>

#include <doctest.h>

#include "test_support.hpp"
#include "viso/solvers.hpp"
#include "viso/verifier.hpp"

using namespace viso;
using viso::testing::make_instance;
using viso::testing::random_instance;

namespace {

// The fast solver's starting point, reproduced independently for the
// monotonicity checks: budget-saturating g^2-proportional split.
PowerAllocation init_allocation(const Instance& inst) {
  PowerAllocation alloc{Mat(inst.L, inst.K)};
  for (int l = 0; l < inst.L; ++l) {
    double wsum = 0.0;
    for (int k = 0; k < inst.K; ++k) wsum += inst.gains.g(l, k) * inst.gains.g(l, k);
    if (wsum <= 0.0) continue;
    for (int k = 0; k < inst.K; ++k)
      alloc.eta(l, k) = inst.budget.p_max[l] * inst.gains.g(l, k) * inst.gains.g(l, k) / wsum;
  }
  return alloc;
}

}  // namespace

TEST_CASE("fast solver: single user takes the full budget") {
  const auto inst = make_instance(3, 1, {1.0, 0.5, 2.0}, {0.7, 0.4, 1.1}, 1.0, 0.0);
  const auto res = solve_fast(inst, SolverConfig{});
  CHECK(res.converged);
  for (int l = 0; l < 3; ++l) {
    CHECK(res.candidate.eta(l, 0) == doctest::Approx(inst.budget.p_max[l]).epsilon(1e-15));
  }
}

TEST_CASE("fast solver: symmetric pair stays at the even split") {
  const auto inst = make_instance(1, 2, {1.0, 1.0}, {1.0}, 1.0, 0.0);
  const auto res = solve_fast(inst, SolverConfig{});
  CHECK(res.candidate.eta(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(res.candidate.eta(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fast solver: weak user gains power and min rate never drops") {
  const auto inst = make_instance(1, 2, {1.0, 2.0}, {1.0}, 1.0, 0.0);
  const auto res = solve_fast(inst, SolverConfig{});
  // init is g^2-proportional: [0.2, 0.8]; the weak user must end above that
  CHECK(res.candidate.eta(0, 0) > 0.2);
  const double init_min = min_rate(compute_se(inst, init_allocation(inst)));
  const double final_min = min_rate(compute_se(inst, res.candidate));
  CHECK(final_min >= init_min);
  CHECK(res.self_reported_rate == doctest::Approx(final_min).epsilon(1e-12));
}

TEST_CASE("fast solver: min rate is monotone along the iteration budget") {
  // deterministic iterations mean a larger budget replays the same prefix,
  // so the achieved min rate must be nondecreasing in fast_iters
  const auto inst = make_instance(2, 3, {1.0, 2.0, 0.4, 0.7, 0.3, 1.5}, {1.0, 0.8}, 0.5, 0.0);
  SolverConfig cfg;
  double previous = 0.0;
  for (int budget = 1; budget <= 20; ++budget) {
    cfg.fast_iters = budget;
    const double value = min_rate(compute_se(inst, solve_fast(inst, cfg).candidate));
    CHECK(value >= previous);
    previous = value;
  }
}

TEST_CASE("feasibility_inner edges") {
  const auto inst = make_instance(1, 2, {1.0, 2.0}, {1.0}, 1.0, 0.0);
  const SolverConfig cfg;

  auto [alloc0, ok0] = feasibility_inner(inst, 0.0, cfg);
  CHECK(ok0);

  // noise-limited single-user bound for this instance: (sqrt(1)*2)^2 / 1 = 4
  auto [alloc_hi, ok_hi] = feasibility_inner(inst, 4.0 * 1.01, cfg);
  CHECK_FALSE(ok_hi);
  auto [feas, viol] = check_feasible(inst, alloc_hi, 1e-9);
  CHECK(feas);  // even a failed probe returns a budget-feasible allocation
  CHECK(viol.empty());

  // 90% of the max-min optimum SINR (4/9 for gains [1,2]) must be reachable
  auto [alloc90, ok90] = feasibility_inner(inst, 0.9 * 4.0 / 9.0, cfg);
  CHECK(ok90);
  CHECK_THROWS_AS(feasibility_inner(inst, -1.0, cfg), std::invalid_argument);

  // symmetric pair: 90% of the grid-oracle optimum is feasible as well
  const auto sym = make_instance(1, 2, {1.0, 1.0}, {1.0}, 1.0, 0.0);
  const auto [sym_alloc, sym_value] = oracle_grid_search(sym, 64);
  const double sym_opt_sinr = std::pow(2.0, sym_value) - 1.0;
  CHECK(feasibility_inner(sym, 0.9 * sym_opt_sinr, cfg).second);
}

TEST_CASE("exact solver: matches the grid oracle on the symmetric pair") {
  const auto inst = make_instance(1, 2, {1.0, 1.0}, {1.0}, 1.0, 0.0);
  const SolverConfig cfg;
  const auto res = solve_exact(inst, cfg);
  CHECK(res.converged);
  const auto [oracle_alloc, oracle_value] = oracle_grid_search(inst, 64);
  const double exact_value = min_rate(compute_se(inst, res.candidate));
  CHECK(std::abs(exact_value - oracle_value) <= cfg.exact_tol_rel * oracle_value);
}

TEST_CASE("exact solver: single user saturates every budget") {
  const auto inst = make_instance(2, 1, {1.0, 0.7}, {0.5, 0.8}, 1.0, 0.0);
  const auto res = solve_exact(inst, SolverConfig{});
  CHECK(res.converged);
  for (int l = 0; l < 2; ++l) {
    CHECK(res.candidate.eta(l, 0) >= inst.budget.p_max[l] * (1.0 - 1e-3));
    CHECK(res.candidate.eta(l, 0) <= inst.budget.p_max[l] * (1.0 + 1e-12));
  }
}

TEST_CASE("exact solver ignores gamma_target") {
  auto inst = make_instance(1, 2, {1.0, 2.0}, {1.0}, 1.0, 0.1);
  const auto low = solve_exact(inst, SolverConfig{});
  inst.gamma_target = 5.0;
  const auto high = solve_exact(inst, SolverConfig{});
  CHECK(low.candidate.eta.data == high.candidate.eta.data);
  CHECK(low.cost_units == high.cost_units);
}

TEST_CASE("dist solver: proportional split") {
  const auto single = make_instance(2, 1, {1.0, 3.0}, {0.4, 0.9}, 1.0, 0.0);
  const auto res1 = solve_dist(single, SolverConfig{});
  CHECK(res1.candidate.eta(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(res1.candidate.eta(1, 0) == doctest::Approx(0.9).epsilon(1e-15));

  const auto pair = make_instance(1, 2, {1.0, 3.0}, {1.0}, 1.0, 0.0);
  const auto res2 = solve_dist(pair, SolverConfig{});
  CHECK(res2.candidate.eta(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(res2.candidate.eta(0, 1) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(res2.cost_units == 2);

  // dead AP transmits nothing
  const auto dead = make_instance(2, 2, {0.0, 0.0, 1.0, 1.0}, {1.0, 1.0}, 1.0, 0.0);
  const auto res3 = solve_dist(dead, SolverConfig{});
  CHECK(res3.candidate.eta(0, 0) == 0.0);
  CHECK(res3.candidate.eta(0, 1) == 0.0);
}

TEST_CASE("grid oracle: guards and small cases") {
  const auto big = make_instance(4, 2, std::vector<double>(8, 1.0), std::vector<double>(4, 1.0),
                                 1.0, 0.0);
  CHECK_THROWS_AS(oracle_grid_search(big, 64), std::invalid_argument);
  const auto pair = make_instance(1, 2, {1.0, 1.0}, {1.0}, 1.0, 0.0);
  CHECK_THROWS_AS(oracle_grid_search(pair, 4), std::invalid_argument);

  const auto single = make_instance(2, 1, {1.0, 0.5}, {0.3, 0.6}, 1.0, 0.0);
  const auto [alloc, value] = oracle_grid_search(single, 16);
  CHECK(alloc.eta(0, 0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(alloc.eta(1, 0) == doctest::Approx(0.6).epsilon(1e-15));

  // exchange symmetry: the even split is optimal
  const auto [sym_alloc, sym_value] = oracle_grid_search(pair, 64);
  CHECK(sym_alloc.eta(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sym_value == doctest::Approx(0.4150374992788438).epsilon(1e-12));
}

TEST_CASE("grid oracle: frozen regression value") {
  // independent enumeration (resolution 256) of max-min SE for gains [1, 2],
  // unit budget and noise: optimum at eta = [157/256, 99/256]
  const auto inst = make_instance(1, 2, {1.0, 2.0}, {1.0}, 1.0, 0.0);
  const auto [alloc, value] = oracle_grid_search(inst, 256);
  CHECK(value == doctest::Approx(0.5283247856079557).epsilon(1e-12));
  CHECK(alloc.eta(0, 0) == doctest::Approx(0.61328125).epsilon(1e-15));
}

TEST_CASE("property: every portfolio output verifies feasible on 1000 instances") {
  Rng rng(301);
  const SolverConfig cfg;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto inst = random_instance(rng, 5, 4);
    const bool check_determinism = trial % 10 == 0;
    for (SolverId id : kPortfolio) {
      const auto a = run_solver(id, inst, cfg);
      const auto [feasible, violations] = check_feasible(inst, a.candidate, 1e-9);
      CHECK(feasible);
      CHECK(violations.empty());
      if (check_determinism) {
        const auto b = run_solver(id, inst, cfg);
        CHECK(a.candidate.eta.data == b.candidate.eta.data);  // bitwise
        CHECK(a.cost_units == b.cost_units);
      }
    }
  }
}

TEST_CASE("property: per-instance cost ordering dist < fast < exact") {
  Rng rng(302);
  const SolverConfig cfg;
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = random_instance(rng, 5, 4);
    const auto d = solve_dist(inst, cfg).cost_units;
    const auto f = solve_fast(inst, cfg).cost_units;
    const auto e = solve_exact(inst, cfg).cost_units;
    CHECK(d < f);
    CHECK(f < e);
  }
}

TEST_CASE("property: fast never falls below its own initialization") {
  Rng rng(303);
  const SolverConfig cfg;
  for (int trial = 0; trial < 120; ++trial) {
    const auto inst = random_instance(rng, 5, 4);
    const double init_min = min_rate(compute_se(inst, init_allocation(inst)));
    const double fast_min = min_rate(compute_se(inst, solve_fast(inst, cfg).candidate));
    CHECK(fast_min >= init_min * (1.0 - 1e-12));
  }
}

TEST_CASE("property: exact dominates dist on tiny instances") {
  Rng rng(304);
  const SolverConfig cfg;
  for (int trial = 0; trial < 25; ++trial) {
    const auto inst = random_instance(rng, 2, 2);
    const double e = min_rate(compute_se(inst, solve_exact(inst, cfg).candidate));
    const double d = min_rate(compute_se(inst, solve_dist(inst, cfg).candidate));
    CHECK(e >= d * (1.0 - 1e-3));  // exact stops within its inner SINR tolerance
  }
}
