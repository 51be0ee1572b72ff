#include "viso/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include "viso/rng.hpp"

namespace viso {

namespace {

constexpr double kPathGainRef = 1e-3;  // channel-gain-squared reference at 1 m
constexpr double kMinDistanceM = 10.0;

struct SplitStream {
  Split split;
  std::uint64_t salt;
  int id_base;
};

constexpr SplitStream kStreams[] = {
    {Split::Train, 0x7A11, 0},
    {Split::Test, 0x7E57, 100},
    {Split::Stress, 0x57E5, 200},
    {Split::Shifted, 0x5F17, 300},
};

struct Point {
  double x, y;
};

/// Concentrates the victim user's gain toward its strongest AP until the sum
/// of squared gains reaches shift_factor times its original value (or as far
/// as full concentration allows). The column sum is preserved exactly up to
/// rounding, so per-user totals and the imbalance descriptor stay put.
void apply_shift_transform(Mat& g, int victim, double shift_factor) {
  const int L = g.rows;
  std::vector<double> col(L);
  double total = 0.0, ssq = 0.0;
  int strongest = 0;
  for (int l = 0; l < L; ++l) {
    col[l] = g(l, victim);
    total += col[l];
    ssq += col[l] * col[l];
    if (col[l] > col[strongest]) strongest = l;
  }
  if (ssq <= 0.0) return;

  // v(b) = col + b * (conc - col) with conc the fully concentrated column;
  // |v(b)|^2 is quadratic in b, solve for the target coupling.
  std::vector<double> dv(L);
  for (int l = 0; l < L; ++l) dv[l] = (l == strongest ? total : 0.0) - col[l];
  double a = 0.0, b_lin = 0.0;
  for (int l = 0; l < L; ++l) {
    a += dv[l] * dv[l];
    b_lin += 2.0 * col[l] * dv[l];
  }
  const double c = ssq - shift_factor * ssq;
  double blend = 1.0;
  if (a > 0.0) {
    const double disc = b_lin * b_lin - 4.0 * a * c;
    if (disc >= 0.0) {
      const double root = (-b_lin + std::sqrt(disc)) / (2.0 * a);
      if (root >= 0.0 && root <= 1.0) blend = root;
    }
  }
  for (int l = 0; l < L; ++l) g(l, victim) = col[l] + blend * dv[l];
}

std::vector<Instance> generate_split(std::uint64_t seed, const SplitStream& stream, int count,
                                     const GenParams& params) {
  Rng rng(stream_seed(seed, stream.salt));
  const SolverConfig estimator_cfg;  // dist defaults for the gamma anchor

  std::vector<Instance> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int L = rng.uniform_int(params.L_lo, params.L_hi);
    const int K = rng.uniform_int(params.K_lo, params.K_hi);

    std::vector<Point> aps(L), ues(K);
    for (auto& p : aps) p = {rng.next_unit() * params.area_m, rng.next_unit() * params.area_m};
    for (auto& p : ues) p = {rng.next_unit() * params.area_m, rng.next_unit() * params.area_m};

    Mat shadow(L, K);
    for (int l = 0; l < L; ++l) {
      for (int k = 0; k < K; ++k) shadow(l, k) = rng.normal(0.0, params.shadow_db);
    }
    const double frac = rng.uniform(params.gamma_frac_lo, params.gamma_frac_hi);
    // Drawn unconditionally so the stream position is independent of the
    // shift flag; only shifted splits consume the value.
    const int victim = rng.uniform_int(0, K - 1);

    Mat g(L, K);
    for (int l = 0; l < L; ++l) {
      for (int k = 0; k < K; ++k) {
        const double d = std::max(std::hypot(aps[l].x - ues[k].x, aps[l].y - ues[k].y),
                                  kMinDistanceM);
        g(l, k) = std::sqrt(kPathGainRef * std::pow(d, -params.pl_exp) *
                            std::pow(10.0, shadow(l, k) / 10.0));
      }
    }

    char id[48];
    std::snprintf(id, sizeof(id), "inst_%s_%03d", split_name(stream.split), stream.id_base + i);
    Instance inst;
    inst.id = id;
    inst.split = stream.split;
    inst.L = L;
    inst.K = K;
    inst.gains = ChannelGains{std::move(g)};
    inst.budget.p_max.assign(L, params.p_max_w);
    inst.noise.sigma2 = params.sigma2_w;
    inst.gamma_target = 0.0;

    // Anchor the target to a cheap achievability estimate; for the shifted
    // split this happens before the transform, which is what makes those
    // instances deceptively hard.
    const SolverResult estimate = solve_dist(inst, estimator_cfg);
    inst.gamma_target = frac * min_rate(compute_se(inst, estimate.candidate));
    if (params.shift_transform) apply_shift_transform(inst.gains.g, victim, params.shift_factor);

    inst.validate();
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace

void GenParams::validate() const {
  if (L_lo < 1 || L_hi < L_lo) throw std::invalid_argument("gen params: bad L range");
  if (K_lo < 1 || K_hi < K_lo) throw std::invalid_argument("gen params: bad K range");
  if (!(area_m > 0.0)) throw std::invalid_argument("gen params: area must be > 0");
  if (!(pl_exp > 2.0)) throw std::invalid_argument("gen params: pl_exp must be > 2");
  if (shadow_db < 0.0) throw std::invalid_argument("gen params: shadow_db must be >= 0");
  if (!(p_max_w > 0.0)) throw std::invalid_argument("gen params: p_max_w must be > 0");
  if (!(sigma2_w > 0.0)) throw std::invalid_argument("gen params: sigma2_w must be > 0");
  if (!(gamma_frac_lo >= 0.0) || gamma_frac_hi < gamma_frac_lo)
    throw std::invalid_argument("gen params: bad gamma fraction range");
  if (!(shift_factor >= 1.0)) throw std::invalid_argument("gen params: shift_factor must be >= 1");
}

BenchmarkSpec BenchmarkSpec::defaults(std::uint64_t seed) {
  BenchmarkSpec spec;
  spec.seed = seed;
  // train/test keep the GenParams defaults.
  spec.stress.L_lo = 8;
  spec.stress.L_hi = 12;
  spec.stress.K_lo = 2;
  spec.stress.K_hi = 2;
  spec.stress.pl_exp = 2.2;
  spec.stress.shadow_db = 2.0;
  spec.stress.gamma_frac_lo = 1.0;
  spec.stress.gamma_frac_hi = 1.4;
  spec.shifted.gamma_frac_lo = 0.9;
  spec.shifted.gamma_frac_hi = 1.3;
  spec.shifted.shift_transform = true;
  return spec;
}

void BenchmarkSpec::validate() const {
  if (n_train < 1 || n_test < 1 || n_stress < 1 || n_shifted < 1)
    throw std::invalid_argument("benchmark spec: split counts must be >= 1");
  train.validate();
  test.validate();
  stress.validate();
  shifted.validate();
}

std::vector<Instance> generate_benchmark(const BenchmarkSpec& spec) {
  spec.validate();
  std::vector<Instance> all;
  const GenParams* params[] = {&spec.train, &spec.test, &spec.stress, &spec.shifted};
  const int counts[] = {spec.n_train, spec.n_test, spec.n_stress, spec.n_shifted};
  for (int s = 0; s < 4; ++s) {
    auto split = generate_split(spec.seed, kStreams[s], counts[s], *params[s]);
    all.insert(all.end(), std::make_move_iterator(split.begin()),
               std::make_move_iterator(split.end()));
  }
  return all;
}

double returned_rate(const OrchestrationOutcome& outcome) {
  return outcome.attempts.empty() ? 0.0 : outcome.attempts.back().r_ver;
}

RegretTable compute_regret(std::span<const MethodOutcomes> methods) {
  if (methods.empty()) throw std::invalid_argument("compute_regret: no methods");

  std::set<std::string> reference_ids;
  for (const auto& outcome : methods.front().outcomes) reference_ids.insert(outcome.instance_id);
  for (const auto& method : methods) {
    std::set<std::string> ids;
    for (const auto& outcome : method.outcomes) ids.insert(outcome.instance_id);
    if (ids != reference_ids || ids.size() != method.outcomes.size())
      throw std::invalid_argument("compute_regret: methods cover different instance sets");
  }

  std::map<std::string, double> best;
  for (const auto& method : methods) {
    for (const auto& outcome : method.outcomes) {
      const double v = returned_rate(outcome);
      auto [it, inserted] = best.emplace(outcome.instance_id, v);
      if (!inserted) it->second = std::max(it->second, v);
    }
  }

  RegretTable table;
  for (const auto& method : methods) {
    auto& row = table[method.method];
    for (const auto& outcome : method.outcomes) {
      row[outcome.instance_id] = best.at(outcome.instance_id) - returned_rate(outcome);
    }
  }
  return table;
}

namespace {

MetricsRow make_row(const std::string& method, const std::string& group,
                    std::span<const OrchestrationOutcome* const> outcomes,
                    const std::map<std::string, double>& regret_row,
                    std::optional<double> lambda) {
  MetricsRow row;
  row.method = method;
  row.group = group;
  row.n_instances = static_cast<int>(outcomes.size());
  if (outcomes.empty()) return row;

  const double n = static_cast<double>(outcomes.size());
  double combined = 0.0;
  for (const OrchestrationOutcome* o : outcomes) {
    const double rate = returned_rate(*o);
    row.accepted_rate += o->resolved ? 1.0 : 0.0;
    row.feasible_rate += (!o->attempts.empty() && o->attempts.back().feasible) ? 1.0 : 0.0;
    row.avg_ver_rate += rate;
    row.avg_wall_time_s += o->total_wall_time_s;
    row.avg_cost_units += static_cast<double>(o->total_cost_units);
    row.avg_regret += regret_row.at(o->instance_id);
    row.fallback_rate += o->attempts.size() >= 2 ? 1.0 : 0.0;
    row.avg_attempts += static_cast<double>(o->attempts.size());
    if (lambda) combined += rate - *lambda * o->total_wall_time_s;
  }
  row.accepted_rate /= n;
  row.feasible_rate /= n;
  row.avg_ver_rate /= n;
  row.avg_wall_time_s /= n;
  row.avg_cost_units /= n;
  row.avg_regret /= n;
  row.fallback_rate /= n;
  row.avg_attempts /= n;
  if (lambda) row.combined_score = combined / n;
  return row;
}

}  // namespace

std::vector<MetricsRow> aggregate_metrics(std::span<const MethodOutcomes> methods,
                                          const RegretTable& regrets,
                                          const std::map<std::string, Split>& split_of,
                                          std::optional<double> lambda) {
  struct Group {
    std::string name;
    std::vector<Split> splits;
  };
  const Group groups[] = {
      {"overall", {Split::Train, Split::Test, Split::Stress, Split::Shifted}},
      {"train", {Split::Train}},
      {"test", {Split::Test}},
      {"stress", {Split::Stress}},
      {"shifted", {Split::Shifted}},
      {"ID", {Split::Train, Split::Test}},
      {"OOD", {Split::Stress, Split::Shifted}},
  };

  std::vector<MetricsRow> rows;
  for (const Group& group : groups) {
    for (const MethodOutcomes& method : methods) {
      std::vector<const OrchestrationOutcome*> selected;
      for (const auto& outcome : method.outcomes) {
        const auto it = split_of.find(outcome.instance_id);
        if (it == split_of.end())
          throw std::invalid_argument("aggregate_metrics: unknown instance " + outcome.instance_id);
        if (std::find(group.splits.begin(), group.splits.end(), it->second) != group.splits.end())
          selected.push_back(&outcome);
      }
      if (selected.empty()) continue;
      rows.push_back(make_row(method.method, group.name, selected, regrets.at(method.method),
                              lambda));
    }
  }
  return rows;
}

std::vector<FailureCase> collect_failures(std::span<const MethodOutcomes> methods,
                                          const RegretTable& regrets,
                                          double regret_rel_threshold) {
  std::map<std::string, double> best;
  std::set<std::string> flagged;
  for (const auto& method : methods) {
    for (const auto& outcome : method.outcomes) {
      const double v = returned_rate(outcome);
      auto [it, inserted] = best.emplace(outcome.instance_id, v);
      if (!inserted) it->second = std::max(it->second, v);
      if (!outcome.resolved) flagged.insert(outcome.instance_id);
    }
  }
  for (const auto& [method, row] : regrets) {
    for (const auto& [instance, regret] : row) {
      const double v_star = best.count(instance) ? best.at(instance) : 0.0;
      if (v_star > 0.0 && regret > regret_rel_threshold * v_star) flagged.insert(instance);
    }
  }

  std::vector<FailureCase> cases;
  for (const std::string& instance : flagged) {
    for (const auto& method : methods) {
      const auto it = std::find_if(method.outcomes.begin(), method.outcomes.end(),
                                   [&](const auto& o) { return o.instance_id == instance; });
      if (it == method.outcomes.end()) continue;
      FailureCase fc;
      fc.instance_id = instance;
      fc.method = method.method;
      fc.accepted = it->resolved;
      if (it->resolved) {
        fc.solver = it->final_solver;
        fc.r_ver = it->final_r_ver;
      }
      fc.wall_time_s = it->total_wall_time_s;
      cases.push_back(std::move(fc));
    }
  }
  return cases;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void write_or_throw(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string metrics_csv(std::span<const MetricsRow> rows) {
  std::string csv =
      "method,group,accepted_rate,feasible_rate,avg_ver_rate,avg_wall_time_s,"
      "avg_cost_units,avg_regret,fallback_rate,avg_attempts,n_instances";
  const bool with_score = !rows.empty() && rows.front().combined_score.has_value();
  if (with_score) csv += ",combined_score";
  csv += "\n";
  for (const MetricsRow& r : rows) {
    csv += r.method + "," + r.group + "," + format_double(r.accepted_rate) + "," +
           format_double(r.feasible_rate) + "," + format_double(r.avg_ver_rate) + "," +
           format_double(r.avg_wall_time_s) + "," + format_double(r.avg_cost_units) + "," +
           format_double(r.avg_regret) + "," + format_double(r.fallback_rate) + "," +
           format_double(r.avg_attempts) + "," + std::to_string(r.n_instances);
    if (with_score) csv += "," + format_double(r.combined_score.value_or(0.0));
    csv += "\n";
  }
  return csv;
}

std::string failures_csv(std::span<const FailureCase> failures) {
  std::string csv = "instance_id,method,solver,accepted,r_ver,wall_time_s\n";
  for (const FailureCase& fc : failures) {
    csv += fc.instance_id + "," + fc.method + ",";
    csv += fc.solver ? solver_name(*fc.solver) : "--";
    csv += fc.accepted ? ",T," : ",F,";
    csv += fc.r_ver ? format_double(*fc.r_ver) : std::string("--");
    csv += "," + format_double(fc.wall_time_s) + "\n";
  }
  return csv;
}

std::string text_report(std::span<const MetricsRow> rows, std::span<const FailureCase> failures) {
  std::string out;
  char line[256];
  std::string current_group;
  for (const MetricsRow& r : rows) {
    if (r.group != current_group) {
      current_group = r.group;
      out += "\n== " + current_group + " ==\n";
      std::snprintf(line, sizeof(line), "%-14s %9s %9s %12s %12s %12s %10s %9s %9s %5s\n",
                    "method", "acc_rate", "feas_rate", "ver_rate", "wall_s", "regret",
                    "cost", "fallback", "attempts", "n");
      out += line;
    }
    std::snprintf(line, sizeof(line),
                  "%-14s %9.4f %9.4f %12.5g %12.5g %12.5g %10.0f %9.4f %9.4f %5d\n",
                  r.method.c_str(), r.accepted_rate, r.feasible_rate, r.avg_ver_rate,
                  r.avg_wall_time_s, r.avg_regret, r.avg_cost_units, r.fallback_rate,
                  r.avg_attempts, r.n_instances);
    out += line;
  }
  out += "\n== failure cases ==\n";
  std::snprintf(line, sizeof(line), "%-18s %-14s %-7s %-9s %-12s %s\n", "instance", "method",
                "solver", "accepted", "r_ver", "wall_s");
  out += line;
  for (const FailureCase& fc : failures) {
    std::snprintf(line, sizeof(line), "%-18s %-14s %-7s %-9s %-12s %.5g\n",
                  fc.instance_id.c_str(), fc.method.c_str(),
                  fc.solver ? solver_name(*fc.solver) : "--", fc.accepted ? "T" : "F",
                  fc.r_ver ? format_double(*fc.r_ver).c_str() : "--", fc.wall_time_s);
    out += line;
  }
  return out;
}

}  // namespace

void emit_report(std::span<const MetricsRow> rows, std::span<const FailureCase> failures,
                 const std::filesystem::path& out_dir) {
  if (rows.empty()) throw std::invalid_argument("emit_report: no metric rows");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  write_or_throw(out_dir / "metrics.csv", metrics_csv(rows));
  write_or_throw(out_dir / "failures.csv", failures_csv(failures));
  write_or_throw(out_dir / "report.txt", text_report(rows, failures));
}

}  // namespace viso
