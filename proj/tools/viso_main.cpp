// viso: benchmark CLI for verifier-in-the-loop solver orchestration.
// Subcommands: gen, memory, run, report. Exit codes: 0 ok, 2 bad flags,
// 3 I/O failure, 4 missing memory / empty train split, 5 inconsistent
// instance coverage across outcome files.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "viso/json_io.hpp"

namespace fs = std::filesystem;
using namespace viso;

namespace {

constexpr int kExitBadFlags = 2;
constexpr int kExitIo = 3;
constexpr int kExitMissingInput = 4;
constexpr int kExitCoverage = 5;

struct ExitWith {
  int code;
  std::string message;
};

json load_config(const std::string& path) {
  return path.empty() ? json::object() : load_json_file(path);
}

// --config values override flags.
template <typename T>
void override_from(const json& cfg, const char* key, T& value) {
  if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

std::uint64_t resolve_seed(const json& cfg, const CLI::Option* seed_opt, std::uint64_t flag_value) {
  if (cfg.contains("seed")) return cfg.at("seed").get<std::uint64_t>();
  if (seed_opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("VISO_SEED")) return std::strtoull(env, nullptr, 10);
  return flag_value;
}

std::vector<RouterKind> parse_methods(const std::string& spec) {
  static const std::vector<RouterKind> all{RouterKind::AlwaysFast, RouterKind::AlwaysExact,
                                           RouterKind::AlwaysDist, RouterKind::Rule,
                                           RouterKind::Agent};
  if (spec == "all") return all;
  std::vector<RouterKind> out;
  std::string token;
  for (std::size_t pos = 0; pos <= spec.size(); ++pos) {
    if (pos == spec.size() || spec[pos] == ',') {
      if (!token.empty()) out.push_back(parse_router(token));
      token.clear();
    } else {
      token += spec[pos];
    }
  }
  if (out.empty()) throw ExitWith{kExitBadFlags, "no methods requested"};
  return out;
}

std::vector<Instance> train_split(const std::vector<Instance>& instances) {
  std::vector<Instance> train;
  for (const Instance& inst : instances) {
    if (inst.split == Split::Train) train.push_back(inst);
  }
  return train;
}

// ---------------------------------------------------------------- gen ----

struct GenArgs {
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  int n_train = 6, n_test = 8, n_stress = 6, n_shifted = 6;
  std::string config;
};

int cmd_gen(GenArgs args, const CLI::Option* seed_opt) {
  const json cfg = load_config(args.config);
  args.seed = resolve_seed(cfg, seed_opt, args.seed);
  override_from(cfg, "out", args.out);
  override_from(cfg, "train", args.n_train);
  override_from(cfg, "test", args.n_test);
  override_from(cfg, "stress", args.n_stress);
  override_from(cfg, "shifted", args.n_shifted);

  BenchmarkSpec spec = BenchmarkSpec::defaults(args.seed);
  spec.n_train = args.n_train;
  spec.n_test = args.n_test;
  spec.n_stress = args.n_stress;
  spec.n_shifted = args.n_shifted;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ExitWith{kExitBadFlags, e.what()};
  }

  const auto instances = generate_benchmark(spec);
  save_benchmark(args.out, spec, instances);
  std::printf("generated %zu instances: train=%d test=%d stress=%d shifted=%d (seed %llu)\n",
              instances.size(), spec.n_train, spec.n_test, spec.n_stress, spec.n_shifted,
              static_cast<unsigned long long>(spec.seed));
  std::printf("wrote %s\n", args.out.c_str());
  return 0;
}

// ------------------------------------------------------------- memory ----

struct MemoryArgs {
  std::string bench;
  std::string out;
  std::string config;
};

int cmd_memory(MemoryArgs args) {
  const json cfg = load_config(args.config);
  override_from(cfg, "bench", args.bench);
  override_from(cfg, "out", args.out);

  const BenchmarkFile file = load_benchmark(args.bench);
  const auto train = train_split(file.instances);
  if (train.empty()) throw ExitWith{kExitMissingInput, "benchmark has no train split"};

  const auto memory = build_memory(train, SolverConfig{});
  save_memory(args.out, memory);

  int counts[3] = {0, 0, 0};
  for (const MemoryEntry& entry : memory) counts[static_cast<int>(entry.label)]++;
  std::printf("memory entries: %zu (fast=%d exact=%d dist=%d)\n", memory.size(), counts[0],
              counts[1], counts[2]);
  std::printf("wrote %s\n", args.out.c_str());
  return 0;
}

// ---------------------------------------------------------------- run ----

struct RunArgs {
  std::string bench;
  std::string out_dir;
  std::string methods = "all";
  std::string memory_path;
  bool audit = false;
  int jobs = 1;
  int agent_k = 1;
  double feas_tol = 1e-9;
  double rate_tol = 1e-6;
  int max_attempts = 0;  // 0 = full chain
  std::uint64_t cost_cap = 0;  // 0 = none
  std::string config;
};

int cmd_run(RunArgs args) {
  const json cfg = load_config(args.config);
  override_from(cfg, "bench", args.bench);
  override_from(cfg, "out_dir", args.out_dir);
  override_from(cfg, "methods", args.methods);
  override_from(cfg, "memory", args.memory_path);
  override_from(cfg, "audit", args.audit);
  override_from(cfg, "jobs", args.jobs);
  override_from(cfg, "agent_k", args.agent_k);
  override_from(cfg, "feas_tol", args.feas_tol);
  override_from(cfg, "rate_tol", args.rate_tol);
  override_from(cfg, "max_attempts", args.max_attempts);
  override_from(cfg, "cost_cap", args.cost_cap);

  const auto kinds = parse_methods(args.methods);
  const BenchmarkFile file = load_benchmark(args.bench);
  const auto train = train_split(file.instances);

  MethodContext ctx;
  ctx.agent_k = args.agent_k;
  ctx.feas_tol_rel = args.feas_tol;
  ctx.rate_tol_rel = args.rate_tol;
  ctx.jobs = args.jobs;
  if (args.max_attempts > 0) ctx.budget.max_attempts = args.max_attempts;
  if (args.cost_cap > 0) ctx.budget.cost_cap = args.cost_cap;

  const bool wants_rule = std::count(kinds.begin(), kinds.end(), RouterKind::Rule) > 0;
  const bool wants_agent = std::count(kinds.begin(), kinds.end(), RouterKind::Agent) > 0;
  if (wants_rule) {
    const bool explicit_thetas = cfg.contains("theta_gamma") && cfg.contains("theta_load") &&
                                 cfg.contains("theta_imbalance");
    if (explicit_thetas) {
      ctx.rule_cfg.theta_gamma = cfg.at("theta_gamma").get<double>();
      ctx.rule_cfg.theta_load = cfg.at("theta_load").get<double>();
      ctx.rule_cfg.theta_imbalance = cfg.at("theta_imbalance").get<double>();
    } else {
      if (train.empty())
        throw ExitWith{kExitMissingInput, "rule router needs a train split for thresholds"};
      ctx.rule_cfg = rule_config_from_train(train);
    }
  }
  std::vector<MemoryEntry> memory;
  if (wants_agent) {
    if (!args.memory_path.empty()) {
      memory = load_memory(args.memory_path);
    } else if (!train.empty()) {
      memory = build_memory(train, ctx.solver_cfg, ctx.feas_tol_rel, ctx.rate_tol_rel);
      std::printf("note: no --memory given, built %zu entries from the train split\n",
                  memory.size());
    }
    if (memory.empty())
      throw ExitWith{kExitMissingInput, "agent router needs --memory or a non-empty train split"};
    ctx.memory = &memory;
  }

  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  for (const RouterKind kind : kinds) {
    const auto outcomes = run_method(file.instances, kind, ctx);
    const fs::path path = fs::path(args.out_dir) / (std::string("outcomes_") + router_name(kind) + ".jsonl");
    save_outcomes_jsonl(path, outcomes, args.audit);

    int accepted = 0, fallbacks = 0;
    double attempts = 0.0;
    for (const auto& outcome : outcomes) {
      accepted += outcome.resolved ? 1 : 0;
      fallbacks += outcome.attempts.size() >= 2 ? 1 : 0;
      attempts += static_cast<double>(outcome.attempts.size());
    }
    const double n = outcomes.empty() ? 1.0 : static_cast<double>(outcomes.size());
    std::printf("method=%s accepted=%d/%zu (%.4f) fallback_rate=%.4f avg_attempts=%.4f\n",
                router_name(kind), accepted, outcomes.size(), accepted / n, fallbacks / n,
                attempts / n);
  }
  return 0;
}

// ------------------------------------------------------------- report ----

struct ReportArgs {
  std::string bench;
  std::string outcomes_dir;
  std::string out_dir = ".";
  double lambda = 0.0;
  bool lambda_set = false;
  double fail_regret = 0.25;
  std::string config;
};

int cmd_report(ReportArgs args, const CLI::Option* lambda_opt) {
  const json cfg = load_config(args.config);
  override_from(cfg, "bench", args.bench);
  override_from(cfg, "outcomes", args.outcomes_dir);
  override_from(cfg, "out_dir", args.out_dir);
  override_from(cfg, "fail_regret", args.fail_regret);
  args.lambda_set = lambda_opt->count() > 0 || cfg.contains("lambda");
  override_from(cfg, "lambda", args.lambda);

  const BenchmarkFile file = load_benchmark(args.bench);
  std::map<std::string, Split> split_of;
  for (const Instance& inst : file.instances) split_of[inst.id] = inst.split;

  // Canonical method order keeps reports byte-comparable between runs.
  std::vector<MethodOutcomes> methods;
  for (const char* name : {"always_fast", "always_exact", "always_dist", "rule", "agent"}) {
    const fs::path path = fs::path(args.outcomes_dir) / (std::string("outcomes_") + name + ".jsonl");
    if (!fs::exists(path)) continue;
    methods.push_back({name, load_outcomes_jsonl(path)});
  }
  if (methods.empty()) throw ExitWith{kExitIo, "no outcomes_*.jsonl files in " + args.outcomes_dir};

  RegretTable regrets;
  std::vector<MetricsRow> rows;
  try {
    regrets = compute_regret(methods);
    rows = aggregate_metrics(methods, regrets, split_of,
                             args.lambda_set ? std::optional<double>(args.lambda) : std::nullopt);
  } catch (const std::invalid_argument& e) {
    throw ExitWith{kExitCoverage, e.what()};
  }
  const auto failures = collect_failures(methods, regrets, args.fail_regret);
  emit_report(rows, failures, args.out_dir);

  std::printf("%-14s %9s %9s %12s %12s %9s %9s\n", "method", "acc_rate", "feas_rate", "ver_rate",
              "avg_regret", "fallback", "attempts");
  for (const MetricsRow& row : rows) {
    if (row.group != "overall") continue;
    std::printf("%-14s %9.4f %9.4f %12.5g %12.5g %9.4f %9.4f\n", row.method.c_str(),
                row.accepted_rate, row.feasible_rate, row.avg_ver_rate, row.avg_regret,
                row.fallback_rate, row.avg_attempts);
  }
  std::printf("wrote %s/metrics.csv, failures.csv, report.txt\n", args.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verifier-in-the-loop solver orchestration benchmark for cell-free downlink "
               "max-min power control"};
  app.require_subcommand(1);

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "generate a seeded four-regime benchmark");
  auto* gen_seed = gen->add_option("--seed", gen_args.seed, "generator seed (VISO_SEED as fallback)");
  gen->add_option("--out", gen_args.out, "output benchmark JSON")->required();
  gen->add_option("--train", gen_args.n_train, "train split size");
  gen->add_option("--test", gen_args.n_test, "test split size");
  gen->add_option("--stress", gen_args.n_stress, "stress split size");
  gen->add_option("--shifted", gen_args.n_shifted, "shifted split size");
  gen->add_option("--config", gen_args.config, "JSON config overriding flags");

  MemoryArgs memory_args;
  auto* memory = app.add_subcommand("memory", "build the oracle-labeled memory from the train split");
  memory->add_option("--bench", memory_args.bench, "benchmark JSON")->required();
  memory->add_option("--out", memory_args.out, "output memory JSON")->required();
  memory->add_option("--config", memory_args.config, "JSON config overriding flags");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "orchestrate the requested methods over a benchmark");
  run->add_option("--bench", run_args.bench, "benchmark JSON")->required();
  run->add_option("--out-dir", run_args.out_dir, "directory for outcomes_<method>.jsonl")->required();
  run->add_option("--methods", run_args.methods,
                  "comma list of always_fast,always_exact,always_dist,rule,agent or 'all'");
  run->add_option("--memory", run_args.memory_path, "memory JSON for the agent router");
  run->add_flag("--audit", run_args.audit, "embed candidate allocations for replay verification");
  run->add_option("--jobs", run_args.jobs, "parallel workers over instances");
  run->add_option("--agent-k", run_args.agent_k, "neighbors consulted by the agent router");
  run->add_option("--feas-tol", run_args.feas_tol, "relative per-AP budget slack");
  run->add_option("--rate-tol", run_args.rate_tol, "relative target slack");
  run->add_option("--max-attempts", run_args.max_attempts, "attempt cap (0 = full chain)");
  run->add_option("--cost-cap", run_args.cost_cap, "cumulative cost_units cap (0 = none)");
  run->add_option("--config", run_args.config, "JSON config overriding flags");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "aggregate outcome files into metric tables");
  report->add_option("--bench", report_args.bench, "benchmark JSON (split membership)")->required();
  report->add_option("--outcomes", report_args.outcomes_dir, "directory with outcomes_*.jsonl")
      ->required();
  report->add_option("--out-dir", report_args.out_dir, "directory for metrics.csv/failures.csv/report.txt");
  auto* lambda_opt = report->add_option("--lambda", report_args.lambda,
                                        "emit combined score avg(r_ver - lambda*runtime)");
  report->add_option("--fail-regret", report_args.fail_regret,
                     "relative regret threshold for the failure listing");
  report->add_option("--config", report_args.config, "JSON config overriding flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadFlags;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_args, gen_seed);
    if (memory->parsed()) return cmd_memory(memory_args);
    if (run->parsed()) return cmd_run(run_args);
    if (report->parsed()) return cmd_report(report_args, lambda_opt);
  } catch (const ExitWith& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  } catch (const std::runtime_error& e) {  // file I/O and parse failures
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadFlags;
  }
  return 0;
}
